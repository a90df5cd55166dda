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

//! Minimum edge colorings of bipartite graphs.
//!
//! A proper edge coloring partitions the edge set into matchings; each
//! matching becomes one timestep of parallel CNOTs, so the palette size is
//! the CNOT depth of a schedule. Bipartite graphs are class 1: the chromatic
//! index equals the maximum degree, and the optimum is found by embedding
//! the graph in a regular bipartite multigraph and peeling perfect matchings.

use crate::circuits::CircuitError;
use crate::graph::{BipartiteMulti, Graph};

/// A proper edge coloring using the minimum palette.
#[derive(Clone, Debug)]
pub struct EdgeColoring {
    /// Color of each edge, indexed in the edge order of the input graph.
    pub colors: Vec<u32>,
    /// Palette size; equals the maximum degree of the graph.
    pub color_count: usize,
}

/// Two-colors the vertices of `g` by BFS, or reports an odd cycle.
fn two_color(g: &Graph) -> Result<Vec<u8>, CircuitError> {
    let n = g.n();
    let mut side = vec![u8::MAX; n];
    for start in 0..n as u32 {
        if side[start as usize] != u8::MAX {
            continue;
        }
        side[start as usize] = 0;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in g.neighbors(v) {
                if side[w as usize] == u8::MAX {
                    side[w as usize] = 1 - side[v as usize];
                    queue.push_back(w);
                } else if side[w as usize] == side[v as usize] {
                    return Err(CircuitError::NotBipartite);
                }
            }
        }
    }
    Ok(side)
}

/// Properly colors the edges of a bipartite graph with exactly `max_degree`
/// colors. Fails with [`CircuitError::NotBipartite`] if `g` has an odd cycle.
///
/// The graph is padded with dummy vertices and parallel dummy edges until
/// both classes are Δ-regular and equal-sized; the padded multigraph splits
/// into Δ perfect matchings, and each real edge inherits the index of the
/// matching containing it.
pub fn bipartite_edge_coloring(g: &Graph) -> Result<EdgeColoring, CircuitError> {
    let m = g.edge_count();
    let delta = g.max_degree();
    let side = two_color(g)?;
    if m == 0 {
        return Ok(EdgeColoring {
            colors: Vec::new(),
            color_count: 0,
        });
    }

    // Compact per-class vertex indices.
    let mut left_of = vec![u32::MAX; g.n()];
    let mut right_of = vec![u32::MAX; g.n()];
    let (mut n_left, mut n_right) = (0u32, 0u32);
    for v in 0..g.n() {
        if side[v] == 0 {
            left_of[v] = n_left;
            n_left += 1;
        } else {
            right_of[v] = n_right;
            n_right += 1;
        }
    }
    let classes = n_left.max(n_right) as usize;

    let mut multi = BipartiteMulti::new(classes, classes);
    for &(u, v) in g.edges() {
        let (l, r) = if side[u as usize] == 0 {
            (left_of[u as usize], right_of[v as usize])
        } else {
            (left_of[v as usize], right_of[u as usize])
        };
        multi.add_edge(l, r);
    }

    // Pad to Δ-regularity with parallel dummy edges. Both classes carry the
    // same total deficit (Δ·classes − m), so the greedy pairing terminates.
    let mut left_deg = vec![0usize; classes];
    let mut right_deg = vec![0usize; classes];
    for &(l, r) in &multi.endpoints {
        left_deg[l as usize] += 1;
        right_deg[r as usize] += 1;
    }
    let (mut l, mut r) = (0usize, 0usize);
    loop {
        while l < classes && left_deg[l] == delta {
            l += 1;
        }
        while r < classes && right_deg[r] == delta {
            r += 1;
        }
        if l == classes {
            debug_assert_eq!(r, classes, "class deficits must balance");
            break;
        }
        multi.add_edge(l as u32, r as u32);
        left_deg[l] += 1;
        right_deg[r] += 1;
    }

    let matchings = multi.split_regular_into_matchings(delta);
    let mut colors = vec![u32::MAX; m];
    for (c, matching) in matchings.iter().enumerate() {
        for &e in matching {
            if (e as usize) < m {
                colors[e as usize] = c as u32;
            }
        }
    }
    debug_assert!(colors.iter().all(|&c| c != u32::MAX));
    Ok(EdgeColoring {
        colors,
        color_count: delta,
    })
}
