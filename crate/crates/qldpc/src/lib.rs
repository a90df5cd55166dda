// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! Hypergraph-product LDPC codes with constant-depth syndrome-extraction
//! circuits on layered planar layouts.
//!
//! The crate is organised as a pipeline:
//!
//! * [`codes`] builds CSS codes as hypergraph products of bipartite Tanner
//!   graphs (random biregular graphs or cycle graphs for the toric family),
//!   with GF(2) linear algebra in [`gf2`].
//! * [`layout`] assigns cardinal directions (N/S/E/W) to Tanner edges from
//!   balanced cyclic vertex orderings, and decomposes qubit connectivity into
//!   stacked planar layers.
//! * [`circuits`] synthesises stabilizer-measurement circuits: the coloration
//!   schedule (edge-coloring based, depth `deg + 2` per basis) and the
//!   cardinal schedule (direction-interleaved, depth `sum of directional
//!   degrees + 2`), plus a propagation oracle that certifies a circuit
//!   measures exactly the code's stabilizers.
//! * [`noise`] runs Pauli-frame simulations under circuit-level depolarizing
//!   noise and records per-round syndrome histories.
//! * [`decoder`] recovers from syndrome histories with normalized min-sum
//!   belief propagation alternated with small-set-flip.
//! * [`harness`] estimates logical failure rates over Monte Carlo trials,
//!   fits the failure-rate model, and tabulates qubit overheads against the
//!   surface code.
//!
//! Monte Carlo trials and search restarts run in parallel through rayon when
//! the default `parallel` feature is enabled; every code path is also
//! available sequentially and produces bit-identical results either way.

pub mod circuits;
pub mod codes;
pub mod decoder;
pub mod gf2;
pub mod graph;
pub mod harness;
pub mod layout;
pub mod noise;
