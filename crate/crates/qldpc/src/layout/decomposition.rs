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

//! Decomposition of a qubit connectivity graph into planar layers over a
//! fixed grid placement.
//!
//! A graph of maximum degree d always splits into ceil(d/2) planar layers:
//! pad odd-degree vertices with phantom edges until the multigraph is
//! 2*ceil(d/2)-regular, walk an Euler circuit to orient it, split the
//! orientation into perfect matchings of the out/in bipartite graph, and
//! read each matching as a 2-factor. Dropping the phantom edges leaves
//! disjoint cycles and paths, which are planar no matter where the vertices
//! sit. The directional strategy instead uses the four compass subgraphs
//! of a product code's Tanner graph and keeps them only if they pass the
//! planarity test and the layer bound; otherwise it falls back.

use crate::codes::CssCode;
use crate::graph::{BipartiteMulti, Graph, Multigraph};
use crate::layout::{is_planar, DirectedTanner, LayoutError, StabKind, VertexOrdering};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    TwoFactor,
    Directional,
    Greedy,
}

/// An edge partition of a connectivity graph with per-layer planarity
/// certificates.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgeLayers {
    pub layers: Vec<Vec<(u32, u32)>>,
    pub layer_planar: Vec<bool>,
}

impl EdgeLayers {
    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    pub fn all_planar(&self) -> bool {
        self.layer_planar.iter().all(|&p| p)
    }
}

/// A full layered layout: grid placement plus a certified edge partition.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlanarLayers {
    /// (row, col) per connectivity vertex: data qubits first, then X
    /// ancillas, then Z ancillas.
    pub positions: Vec<(u32, u32)>,
    pub layers: Vec<Vec<(u32, u32)>>,
    pub layer_planar: Vec<bool>,
    /// Strategy that actually produced the layers (directional falls back
    /// to two-factor when its layers fail certification).
    pub strategy_used: Strategy,
    /// Maximum degree of the connectivity graph.
    pub max_degree: usize,
    /// The guaranteed layer bound ceil(max_degree / 2).
    pub layer_bound: usize,
    /// Interior intersections of the naive one-layer straight-line drawing.
    pub single_layer_crossings: usize,
}

impl PlanarLayers {
    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }
}

fn layer_graph(n: usize, edges: &[(u32, u32)]) -> Graph {
    let mut g = Graph::new(n);
    for &(u, v) in edges {
        g.add_edge(u, v);
    }
    g
}

fn certify(n: usize, layers: Vec<Vec<(u32, u32)>>) -> EdgeLayers {
    let layer_planar = layers
        .iter()
        .map(|edges| is_planar(&layer_graph(n, edges)))
        .collect();
    EdgeLayers {
        layers,
        layer_planar,
    }
}

/// Splits the edges of `g` into at most ceil(max_degree/2) planar layers.
///
/// `TwoFactor` always meets the bound; `Greedy` packs edges into planar
/// layers first-fit and fails if it needs more. The `Directional` strategy
/// needs product structure; use [`layered_layout`].
pub fn planar_decomposition(g: &Graph, strategy: Strategy) -> Result<EdgeLayers, LayoutError> {
    match strategy {
        Strategy::TwoFactor => Ok(two_factor_layers(g)),
        Strategy::Greedy => greedy_layers(g),
        Strategy::Directional => Err(LayoutError::DirectionalNeedsProduct),
    }
}

fn two_factor_layers(g: &Graph) -> EdgeLayers {
    let n = g.n();
    let delta = g.max_degree();
    if delta == 0 {
        return EdgeLayers {
            layers: Vec::new(),
            layer_planar: Vec::new(),
        };
    }
    let k = delta.div_ceil(2);
    let target = 2 * k;

    let real_edges = g.edges();
    let mut mg = Multigraph::new(n);
    for &(u, v) in real_edges {
        mg.add_edge(u, v);
    }
    // Phantom padding: list every missing edge endpoint ("stub") and pair
    // stubs consecutively; pairs on the same vertex become loops. Only
    // degrees matter for the factorization, so any pairing works.
    let mut stubs = Vec::new();
    for v in 0..n as u32 {
        for _ in mg.degree(v)..target {
            stubs.push(v);
        }
    }
    debug_assert_eq!(stubs.len() % 2, 0);
    for pair in stubs.chunks(2) {
        mg.add_edge(pair[0], pair[1]);
    }

    // Orient along Euler circuits: out-degree = in-degree = k everywhere.
    let mut oriented: Vec<(u32, u32, u32)> = Vec::new();
    for tour in mg.euler_circuits() {
        oriented.extend(tour);
    }
    let mut bm = BipartiteMulti::new(n, n);
    for &(_, tail, head) in &oriented {
        bm.add_edge(tail, head);
    }
    let matchings = bm.split_regular_into_matchings(k);

    let real_count = real_edges.len() as u32;
    let mut layers = Vec::new();
    for matching in matchings {
        let mut edges: Vec<(u32, u32)> = matching
            .into_iter()
            .map(|bm_edge| oriented[bm_edge as usize].0)
            .filter(|&mg_edge| mg_edge < real_count)
            .map(|mg_edge| real_edges[mg_edge as usize])
            .collect();
        edges.sort_unstable();
        if !edges.is_empty() {
            layers.push(edges);
        }
    }
    certify(n, layers)
}

fn greedy_layers(g: &Graph) -> Result<EdgeLayers, LayoutError> {
    let n = g.n();
    let delta = g.max_degree();
    let bound = delta.div_ceil(2);
    let mut layers: Vec<Vec<(u32, u32)>> = Vec::new();
    for &(u, v) in g.edges() {
        let mut placed = false;
        for layer in &mut layers {
            layer.push((u, v));
            if is_planar(&layer_graph(n, layer)) {
                placed = true;
                break;
            }
            layer.pop();
        }
        if !placed {
            if layers.len() == bound {
                return Err(LayoutError::LayerBoundExceeded {
                    strategy: Strategy::Greedy,
                    layers: layers.len() + 1,
                    bound,
                });
            }
            layers.push(vec![(u, v)]);
        }
    }
    Ok(certify(n, layers))
}

/// The four compass subgraphs of a directed Tanner graph as connectivity
/// layers (vertex numbering: data, then X ancillas, then Z ancillas).
pub fn directional_layers(dt: &DirectedTanner) -> EdgeLayers {
    let n = dt.n_qubits();
    let total = n + dt.x_stabs() + dt.z_stabs();
    let mut by_direction: Vec<Vec<(u32, u32)>> = vec![Vec::new(); 4];
    for e in dt.edges() {
        let stab_vertex = match e.kind {
            StabKind::X => n + e.stab as usize,
            StabKind::Z => n + dt.x_stabs() + e.stab as usize,
        } as u32;
        let pair = (e.qubit.min(stab_vertex), e.qubit.max(stab_vertex));
        by_direction[e.direction as usize].push(pair);
    }
    let mut layers: Vec<Vec<(u32, u32)>> = by_direction
        .into_iter()
        .filter(|l| !l.is_empty())
        .collect();
    for layer in &mut layers {
        layer.sort_unstable();
    }
    certify(total, layers)
}

/// The CNOT connectivity graph of any stabilizer-measurement circuit for
/// `code`: one ancilla per stabilizer, joined to its support.
pub fn tanner_connectivity(code: &CssCode) -> Graph {
    let n = code.n();
    let rx = code.num_x_stabs();
    let mut g = Graph::new(n + rx + code.num_z_stabs());
    for r in 0..rx {
        for &q in code.x_support(r) {
            g.add_edge(q, (n + r) as u32);
        }
    }
    for r in 0..code.num_z_stabs() {
        for &q in code.z_support(r) {
            g.add_edge(q, (n + rx + r) as u32);
        }
    }
    g
}

/// Grid placement of all data and ancilla qubits of a product code: column
/// = first-axis label, row = second-axis label. Every grid cell of the
/// |V1| x |V2| rectangle is occupied by exactly one qubit or ancilla.
pub fn grid_positions_with(
    code: &CssCode,
    ord1: &VertexOrdering,
    ord2: &VertexOrdering,
) -> Result<Vec<(u32, u32)>, LayoutError> {
    let hgp = code.hgp().ok_or(LayoutError::NotAProduct)?;
    if ord1.n() != hgp.g1.vertex_count() {
        return Err(LayoutError::OrderingMismatch {
            got: ord1.n(),
            want: hgp.g1.vertex_count(),
        });
    }
    if ord2.n() != hgp.g2.vertex_count() {
        return Err(LayoutError::OrderingMismatch {
            got: ord2.n(),
            want: hgp.g2.vertex_count(),
        });
    }
    let place = |(i, j): (u32, u32)| (ord2.label(j), ord1.label(i));
    Ok(hgp
        .qubit_labels
        .iter()
        .chain(&hgp.x_stab_labels)
        .chain(&hgp.z_stab_labels)
        .map(|&c| place(c))
        .collect())
}

/// [`grid_positions_with`] under the identity orderings.
pub fn grid_positions(code: &CssCode) -> Result<Vec<(u32, u32)>, LayoutError> {
    let hgp = code.hgp().ok_or(LayoutError::NotAProduct)?;
    grid_positions_with(
        code,
        &VertexOrdering::consecutive(hgp.g1.vertex_count()),
        &VertexOrdering::consecutive(hgp.g2.vertex_count()),
    )
}

/// Number of edge pairs whose open segments intersect when all edges are
/// drawn as straight lines in one layer: transversal crossings plus
/// collinear overlaps. Touching at an endpoint does not count.
pub fn count_straight_line_crossings(
    positions: &[(u32, u32)],
    edges: &[(u32, u32)],
) -> usize {
    let p = |v: u32| {
        let (r, c) = positions[v as usize];
        (i64::from(c), i64::from(r))
    };
    let orient = |a: (i64, i64), b: (i64, i64), c: (i64, i64)| -> i64 {
        ((b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)).signum()
    };
    let mut count = 0;
    for (idx, &(a, b)) in edges.iter().enumerate() {
        for &(c, d) in &edges[idx + 1..] {
            if a == c || a == d || b == c || b == d {
                continue;
            }
            let (p1, p2, p3, p4) = (p(a), p(b), p(c), p(d));
            let d1 = orient(p3, p4, p1);
            let d2 = orient(p3, p4, p2);
            let d3 = orient(p1, p2, p3);
            let d4 = orient(p1, p2, p4);
            if d1 * d2 < 0 && d3 * d4 < 0 {
                count += 1;
            } else if d1 == 0 && d2 == 0 && d3 == 0 && d4 == 0 {
                // Collinear: count interior overlap along the spanning axis.
                let key: fn((i64, i64)) -> i64 = if p1.0 != p2.0 {
                    |q| q.0
                } else {
                    |q| q.1
                };
                let (lo1, hi1) = (key(p1).min(key(p2)), key(p1).max(key(p2)));
                let (lo2, hi2) = (key(p3).min(key(p4)), key(p3).max(key(p4)));
                if lo1.max(lo2) < hi1.min(hi2) {
                    count += 1;
                }
            }
        }
    }
    count
}

/// Full layout pipeline for a product code: direction assignment, grid
/// placement, and a certified planar layering of the Tanner connectivity.
///
/// `Directional` keeps the four compass layers only when every one passes
/// the planarity test and the count respects the ceil(degree/2) bound;
/// otherwise it silently falls back to the always-valid two-factor
/// construction (see `strategy_used` in the result).
pub fn layered_layout(
    code: &CssCode,
    ord1: &VertexOrdering,
    ord2: &VertexOrdering,
    strategy: Strategy,
) -> Result<PlanarLayers, LayoutError> {
    let connectivity = tanner_connectivity(code);
    let max_degree = connectivity.max_degree();
    let layer_bound = max_degree.div_ceil(2);
    let (edge_layers, strategy_used) = match strategy {
        Strategy::Directional => {
            let dt = crate::layout::assign_directions(code, ord1, ord2)?;
            let candidate = directional_layers(&dt);
            if candidate.all_planar() && candidate.layer_count() <= layer_bound {
                (candidate, Strategy::Directional)
            } else {
                (two_factor_layers(&connectivity), Strategy::TwoFactor)
            }
        }
        other => (planar_decomposition(&connectivity, other)?, other),
    };
    if edge_layers.layer_count() > layer_bound {
        return Err(LayoutError::LayerBoundExceeded {
            strategy: strategy_used,
            layers: edge_layers.layer_count(),
            bound: layer_bound,
        });
    }
    let positions = grid_positions_with(code, ord1, ord2)?;
    let single_layer_crossings =
        count_straight_line_crossings(&positions, connectivity.edges());
    Ok(PlanarLayers {
        positions,
        layers: edge_layers.layers,
        layer_planar: edge_layers.layer_planar,
        strategy_used,
        max_degree,
        layer_bound,
        single_layer_crossings,
    })
}
