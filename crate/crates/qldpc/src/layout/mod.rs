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

//! Geometric layout of product codes: vertex orderings with balanced
//! up/down neighbor splits, compass direction labels on Tanner edges,
//! grid placement, and decomposition of the qubit connectivity graph into
//! planar layers.
//!
//! An ordering labels the vertices of a seed graph 0..|V|-1. Neighbor
//! offsets are taken cyclically; a vertex is balanced when its neighbors
//! split as evenly as possible between forward ("up") and backward ("down")
//! offsets. Balanced orderings of both seed graphs make the four compass
//! subgraphs of the product's Tanner graph as sparse as possible, which is
//! what bounds the cardinal measurement circuit's depth.

mod decomposition;
mod directions;
mod planarity;

pub use decomposition::{
    count_straight_line_crossings, grid_positions, grid_positions_with, layered_layout,
    planar_decomposition, tanner_connectivity, EdgeLayers, PlanarLayers, Strategy,
};
pub use directions::{
    assign_directions, lemma_bounds_check, DirectedTanner, Direction, LemmaBounds, StabKind,
    TannerEdge,
};
pub use planarity::is_planar;

use crate::codes::BipartiteGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LayoutError {
    #[error("ordering covers {got} vertices but the graph has {want}")]
    OrderingMismatch { got: usize, want: usize },
    #[error("labels do not form a permutation of 0..n")]
    NotAPermutation,
    #[error("code carries no product structure, so axis orderings do not apply")]
    NotAProduct,
    #[error("strategy {strategy:?} produced {layers} layers, above the bound {bound}")]
    LayerBoundExceeded {
        strategy: Strategy,
        layers: usize,
        bound: usize,
    },
    #[error("the directional strategy needs a product code; use layered_layout")]
    DirectionalNeedsProduct,
}

/// A bijective labeling of a graph's vertices with 0..n-1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexOrdering {
    labels: Vec<u32>,
}

impl VertexOrdering {
    /// The identity labeling: vertex v gets label v.
    pub fn consecutive(n: usize) -> Self {
        VertexOrdering {
            labels: (0..n as u32).collect(),
        }
    }

    pub fn from_labels(labels: Vec<u32>) -> Result<Self, LayoutError> {
        let mut seen = vec![false; labels.len()];
        for &l in &labels {
            if (l as usize) >= labels.len() || seen[l as usize] {
                return Err(LayoutError::NotAPermutation);
            }
            seen[l as usize] = true;
        }
        Ok(VertexOrdering { labels })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, v: u32) -> u32 {
        self.labels[v as usize]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }
}

/// Per-vertex split of neighbors into forward and backward cyclic offsets.
///
/// `up[v]` counts neighbors at offset 0 < l <= n/2 from v's label, `down[v]`
/// the rest. A vertex is balanced when `up - down` equals its degree mod 2;
/// `defect[v]` measures the deviation and `total_defect` sums it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BalanceReport {
    pub up: Vec<usize>,
    pub down: Vec<usize>,
    pub defect: Vec<usize>,
    pub total_defect: usize,
}

/// True when the cyclic offset from label `ls` to label `lt` lies in the
/// forward half (0, n/2].
fn forward_offset(ls: u32, lt: u32, n: usize) -> bool {
    let l = (lt as usize + n - ls as usize) % n;
    l > 0 && 2 * l <= n
}

/// Forward-neighbor count and degree of `v` under the given labels.
fn up_count(g: &BipartiteGraph, labels: &[u32], v: u32) -> (usize, usize) {
    let n = g.vertex_count();
    let bits = g.bits() as u32;
    let lv = labels[v as usize];
    if v < bits {
        let nb = g.bit_neighbors(v);
        let up = nb
            .iter()
            .filter(|&&c| forward_offset(lv, labels[(bits + c) as usize], n))
            .count();
        (up, nb.len())
    } else {
        let nb = g.check_neighbors(v - bits);
        let up = nb
            .iter()
            .filter(|&&b| forward_offset(lv, labels[b as usize], n))
            .count();
        (up, nb.len())
    }
}

fn vertex_defect(g: &BipartiteGraph, labels: &[u32], v: u32) -> usize {
    let (up, degree) = up_count(g, labels, v);
    let down = degree - up;
    (up as isize - down as isize - (degree % 2) as isize).unsigned_abs()
}

/// Computes the balance split of every vertex under `ord`.
pub fn balance_report(
    g: &BipartiteGraph,
    ord: &VertexOrdering,
) -> Result<BalanceReport, LayoutError> {
    let n = g.vertex_count();
    if ord.n() != n {
        return Err(LayoutError::OrderingMismatch {
            got: ord.n(),
            want: n,
        });
    }
    let mut up = vec![0usize; n];
    let mut down = vec![0usize; n];
    let mut defect = vec![0usize; n];
    let mut total = 0usize;
    for v in 0..n as u32 {
        let (u, degree) = up_count(g, ord.labels(), v);
        up[v as usize] = u;
        down[v as usize] = degree - u;
        let d =
            (u as isize - (degree - u) as isize - (degree % 2) as isize).unsigned_abs();
        defect[v as usize] = d;
        total += d;
    }
    Ok(BalanceReport {
        up,
        down,
        defect,
        total_defect: total,
    })
}

/// Knobs for the annealed label-swap search.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Swap proposals per restart.
    pub swaps: usize,
    /// Independent restarts; the best result wins (ties to the lowest
    /// restart index, so the outcome is deterministic in `seed`).
    pub restarts: usize,
    pub initial_temperature: f64,
    /// Geometric cooling factor applied per proposal.
    pub cooling: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            swaps: 100_000,
            restarts: 8,
            initial_temperature: 2.0,
            cooling: 0.9999,
        }
    }
}

#[derive(Clone, Debug)]
pub struct OrderingSearch {
    pub ordering: VertexOrdering,
    pub total_defect: usize,
}

/// Searches for a vertex ordering minimizing the total balance defect.
///
/// Annealed local search: propose swapping the labels of two random
/// vertices, always accept non-increasing defect, and accept increases with
/// probability exp(-delta/temperature) under geometric cooling. Restarts run
/// independently (in parallel when the `parallel` feature is on) and the
/// lowest (defect, restart index) wins, so results depend only on `seed` and
/// the config.
pub fn find_balanced_ordering(
    g: &BipartiteGraph,
    seed: u64,
    config: &SearchConfig,
) -> OrderingSearch {
    let n = g.vertex_count();
    if n <= 1 {
        return OrderingSearch {
            ordering: VertexOrdering::consecutive(n),
            total_defect: 0,
        };
    }
    let bits = g.bits() as u32;
    let push_neighbors = |affected: &mut Vec<u32>, v: u32| {
        if v < bits {
            for &c in g.bit_neighbors(v) {
                affected.push(bits + c);
            }
        } else {
            for &b in g.check_neighbors(v - bits) {
                affected.push(b);
            }
        }
    };
    let run = |restart: usize| -> (usize, usize, Vec<u32>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(restart as u64);
        let mut labels: Vec<u32> = (0..n as u32).collect();
        for i in (1..n).rev() {
            let j = rng.gen_range(0..=i);
            labels.swap(i, j);
        }
        let mut current: usize = (0..n as u32).map(|v| vertex_defect(g, &labels, v)).sum();
        let mut best = labels.clone();
        let mut best_defect = current;
        let mut temperature = config.initial_temperature;
        let mut affected: Vec<u32> = Vec::with_capacity(16);
        for _ in 0..config.swaps {
            if best_defect == 0 {
                break;
            }
            let a = rng.gen_range(0..n as u32);
            let mut b = rng.gen_range(0..n as u32 - 1);
            if b >= a {
                b += 1;
            }
            affected.clear();
            affected.push(a);
            affected.push(b);
            push_neighbors(&mut affected, a);
            push_neighbors(&mut affected, b);
            affected.sort_unstable();
            affected.dedup();
            let before: usize = affected.iter().map(|&v| vertex_defect(g, &labels, v)).sum();
            labels.swap(a as usize, b as usize);
            let after: usize = affected.iter().map(|&v| vertex_defect(g, &labels, v)).sum();
            let delta = after as isize - before as isize;
            let accept = delta <= 0
                || rng.gen::<f64>() < (-(delta as f64) / temperature.max(1e-12)).exp();
            if accept {
                current = (current + after) - before;
                if current < best_defect {
                    best_defect = current;
                    best.copy_from_slice(&labels);
                }
            } else {
                labels.swap(a as usize, b as usize);
            }
            temperature *= config.cooling;
        }
        (best_defect, restart, best)
    };

    let winner = best_restart(config.restarts.max(1), run);
    OrderingSearch {
        ordering: VertexOrdering { labels: winner.2 },
        total_defect: winner.0,
    }
}

#[cfg(feature = "parallel")]
fn best_restart(
    restarts: usize,
    run: impl Fn(usize) -> (usize, usize, Vec<u32>) + Send + Sync,
) -> (usize, usize, Vec<u32>) {
    use rayon::prelude::*;
    (0..restarts)
        .into_par_iter()
        .map(run)
        .min_by_key(|(defect, restart, _)| (*defect, *restart))
        .expect("at least one restart")
}

#[cfg(not(feature = "parallel"))]
fn best_restart(
    restarts: usize,
    run: impl Fn(usize) -> (usize, usize, Vec<u32>) + Send + Sync,
) -> (usize, usize, Vec<u32>) {
    (0..restarts)
        .map(run)
        .min_by_key(|(defect, restart, _)| (*defect, *restart))
        .expect("at least one restart")
}

/// Labels the 2d-cycle Tanner graph of `BipartiteGraph::cycle(d)` in walk
/// order: bit j gets label 2j, the check joining bits j and j+1 gets 2j+1.
pub fn cycle_walk_ordering(d: usize) -> VertexOrdering {
    let mut labels = vec![0u32; 2 * d];
    for j in 0..d {
        labels[j] = 2 * j as u32;
        labels[d + j] = 2 * j as u32 + 1;
    }
    VertexOrdering { labels }
}
