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

//! Compass direction labels on the Tanner graph of a product code.
//!
//! Every Tanner edge joins a stabilizer at product coordinate (i, j) to a
//! data qubit differing in exactly one coordinate. Edges changing the first
//! coordinate are horizontal (E or W), edges changing the second are
//! vertical (N or S). The direction is read off the cyclic label offset
//! from the stabilizer's coordinate to the qubit's coordinate on that axis:
//! forward offsets point N (or E), backward offsets point S (or W).
//!
//! An offset of exactly half the axis length is its own inverse, so both
//! traversal senses of the same seed edge would receive the same direction
//! under the pure offset rule. That breaks the pairing that direction
//! labels exist to provide (each seed edge seen from the stabilizer side
//! and from the qubit side must get opposite directions, or the cardinal
//! schedule loses its cancellation structure). We break the tie by label
//! order: a half-offset edge points forward exactly when the source label
//! is smaller.

use crate::codes::CssCode;
use crate::layout::{LayoutError, VertexOrdering};
use serde::{Deserialize, Serialize};

/// Compass directions in the order the cardinal schedule visits them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    E,
    N,
    S,
    W,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::E, Direction::N, Direction::S, Direction::W];

    pub fn is_horizontal(self) -> bool {
        matches!(self, Direction::E | Direction::W)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StabKind {
    X,
    Z,
}

/// One Tanner edge: stabilizer `stab` (of `kind`) acting on data qubit
/// `qubit`, labeled with its compass direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TannerEdge {
    pub kind: StabKind,
    pub stab: u32,
    pub qubit: u32,
    pub direction: Direction,
}

/// The Tanner graph of a product code with every edge given a compass
/// direction, plus degree accounting for the four directional subgraphs.
#[derive(Clone, Debug)]
pub struct DirectedTanner {
    n: usize,
    x_stabs: usize,
    z_stabs: usize,
    edges: Vec<TannerEdge>,
    /// Incidence counts indexed by [direction][tanner vertex], vertices
    /// numbered data qubits first, then X stabilizers, then Z stabilizers.
    incidence: [Vec<u32>; 4],
}

impl DirectedTanner {
    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn x_stabs(&self) -> usize {
        self.x_stabs
    }

    pub fn z_stabs(&self) -> usize {
        self.z_stabs
    }

    pub fn edges(&self) -> &[TannerEdge] {
        &self.edges
    }

    /// Maximum vertex degree of the full Tanner graph.
    pub fn degree(&self) -> usize {
        let total = self.n + self.x_stabs + self.z_stabs;
        (0..total)
            .map(|v| {
                Direction::ALL
                    .iter()
                    .map(|&d| self.incidence[d as usize][v] as usize)
                    .sum()
            })
            .max()
            .unwrap_or(0)
    }

    /// Maximum vertex degree of the subgraph of edges pointing `d`.
    pub fn direction_degree(&self, d: Direction) -> usize {
        self.incidence[d as usize]
            .iter()
            .map(|&c| c as usize)
            .max()
            .unwrap_or(0)
    }

    /// Sum of the four directional subgraph degrees: the layer-degree
    /// budget of the cardinal schedule.
    pub fn direction_degree_sum(&self) -> usize {
        Direction::ALL
            .iter()
            .map(|&d| self.direction_degree(d))
            .sum()
    }
}

/// Direction of the edge whose source-axis label is `ls` and target-axis
/// label `lt` on an axis with `m` vertices; `horizontal` picks E/W over N/S.
fn edge_direction(ls: u32, lt: u32, m: usize, horizontal: bool) -> Direction {
    let l = (lt as usize + m - ls as usize) % m;
    debug_assert!(l != 0, "stabilizer and qubit share the axis coordinate");
    let forward = 2 * l < m || (2 * l == m && ls < lt);
    match (horizontal, forward) {
        (true, true) => Direction::E,
        (true, false) => Direction::W,
        (false, true) => Direction::N,
        (false, false) => Direction::S,
    }
}

/// Assigns a compass direction to every Tanner edge of a product code,
/// using `ord1` to label the first-axis seed graph and `ord2` the second.
pub fn assign_directions(
    code: &CssCode,
    ord1: &VertexOrdering,
    ord2: &VertexOrdering,
) -> Result<DirectedTanner, LayoutError> {
    let hgp = code.hgp().ok_or(LayoutError::NotAProduct)?;
    let (m1, m2) = (hgp.g1.vertex_count(), hgp.g2.vertex_count());
    if ord1.n() != m1 {
        return Err(LayoutError::OrderingMismatch {
            got: ord1.n(),
            want: m1,
        });
    }
    if ord2.n() != m2 {
        return Err(LayoutError::OrderingMismatch {
            got: ord2.n(),
            want: m2,
        });
    }
    let n = code.n();
    let x_stabs = code.num_x_stabs();
    let z_stabs = code.num_z_stabs();
    let total = n + x_stabs + z_stabs;
    let mut edges = Vec::new();
    let mut incidence: [Vec<u32>; 4] = std::array::from_fn(|_| vec![0u32; total]);

    let mut push = |kind: StabKind, stab: u32, qubit: u32, direction: Direction| {
        edges.push(TannerEdge {
            kind,
            stab,
            qubit,
            direction,
        });
        let stab_vertex = match kind {
            StabKind::X => n + stab as usize,
            StabKind::Z => n + x_stabs + stab as usize,
        };
        incidence[direction as usize][qubit as usize] += 1;
        incidence[direction as usize][stab_vertex] += 1;
    };

    for (kind, stabs, labels) in [
        (StabKind::X, x_stabs, &hgp.x_stab_labels),
        (StabKind::Z, z_stabs, &hgp.z_stab_labels),
    ] {
        for stab in 0..stabs {
            let (si, sj) = labels[stab];
            let support = match kind {
                StabKind::X => code.x_support(stab),
                StabKind::Z => code.z_support(stab),
            };
            for &q in support {
                let (qi, qj) = hgp.qubit_labels[q as usize];
                let direction = if sj == qj {
                    edge_direction(ord1.label(si), ord1.label(qi), m1, true)
                } else {
                    debug_assert_eq!(si, qi, "edge changes exactly one coordinate");
                    edge_direction(ord2.label(sj), ord2.label(qj), m2, false)
                };
                push(kind, stab as u32, q, direction);
            }
        }
    }

    Ok(DirectedTanner {
        n,
        x_stabs,
        z_stabs,
        edges,
        incidence,
    })
}

/// Degree bounds linking the four directional subgraphs to the full Tanner
/// graph: deg(T) <= sum over directions <= 2 deg(T).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct LemmaBounds {
    pub lower_ok: bool,
    pub upper_ok: bool,
    pub degree: usize,
    pub sum: usize,
}

pub fn lemma_bounds_check(dt: &DirectedTanner) -> LemmaBounds {
    let degree = dt.degree();
    let sum = dt.direction_degree_sum();
    LemmaBounds {
        lower_ok: degree <= sum,
        upper_ok: sum <= 2 * degree,
        degree,
        sum,
    }
}
