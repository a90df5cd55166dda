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

//! Bipartite Tanner graphs: the classical seeds of the hypergraph product.
//!
//! The generator draws from the configuration model (uniform stub matching,
//! resampled until simple) and then hill-climbs double-edge swaps to clear
//! cycles shorter than the requested girth. Everything is deterministic in
//! the seed; restart `a` uses stream `a` of a counter-mode generator.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex ({0}, {1}) out of range")]
    VertexOutOfRange(u32, u32),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(u32, u32),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenerateError {
    #[error("infeasible parameters: {0}")]
    BadParameters(String),
    #[error("girth {girth_min} not reached within {attempts} restarts")]
    BudgetExhausted { girth_min: usize, attempts: usize },
}

/// Bipartite graph with `bits` bit vertices and `checks` check vertices.
///
/// The unified vertex numbering used by orderings and the hypergraph product
/// is bits first (`0..bits`), then checks (`bits..bits+checks`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteGraph {
    bits: usize,
    checks: usize,
    bit_adj: Vec<Vec<u32>>,
    check_adj: Vec<Vec<u32>>,
}

impl BipartiteGraph {
    pub fn new(
        bits: usize,
        checks: usize,
        edges: &[(u32, u32)],
    ) -> Result<Self, GraphError> {
        let mut g = BipartiteGraph {
            bits,
            checks,
            bit_adj: vec![Vec::new(); bits],
            check_adj: vec![Vec::new(); checks],
        };
        for &(b, c) in edges {
            if (b as usize) >= bits || (c as usize) >= checks {
                return Err(GraphError::VertexOutOfRange(b, c));
            }
            if g.bit_adj[b as usize].contains(&c) {
                return Err(GraphError::DuplicateEdge(b, c));
            }
            g.bit_adj[b as usize].push(c);
            g.check_adj[c as usize].push(b);
        }
        for adj in g.bit_adj.iter_mut().chain(g.check_adj.iter_mut()) {
            adj.sort_unstable();
        }
        Ok(g)
    }

    /// Tanner graph of the length-`d` cyclic repetition code: check `j`
    /// touches bits `j` and `j+1 (mod d)`. Requires `d >= 2`.
    pub fn cycle(d: usize) -> Self {
        assert!(d >= 2, "cycle repetition code needs d >= 2");
        let edges: Vec<(u32, u32)> = (0..d as u32)
            .flat_map(|j| [(j, j), ((j + 1) % d as u32, j)])
            .collect();
        Self::new(d, d, &edges).expect("cycle graph is simple")
    }

    /// One bit, one check, one edge: the smallest Tanner graph.
    pub fn single_edge() -> Self {
        Self::new(1, 1, &[(0, 0)]).expect("single edge is simple")
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn checks(&self) -> usize {
        self.checks
    }

    pub fn vertex_count(&self) -> usize {
        self.bits + self.checks
    }

    pub fn bit_neighbors(&self, b: u32) -> &[u32] {
        &self.bit_adj[b as usize]
    }

    pub fn check_neighbors(&self, c: u32) -> &[u32] {
        &self.check_adj[c as usize]
    }

    pub fn edge_count(&self) -> usize {
        self.bit_adj.iter().map(|a| a.len()).sum()
    }

    /// Edges as (bit, check) pairs, sorted.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut e: Vec<(u32, u32)> = (0..self.bits as u32)
            .flat_map(|b| self.bit_adj[b as usize].iter().map(move |&c| (b, c)))
            .collect();
        e.sort_unstable();
        e
    }

    /// Degree under the unified numbering (bits then checks).
    pub fn unified_degree(&self, v: u32) -> usize {
        let v = v as usize;
        if v < self.bits {
            self.bit_adj[v].len()
        } else {
            self.check_adj[v - self.bits].len()
        }
    }

    /// Neighbors under the unified numbering (bits then checks).
    pub fn unified_neighbors(&self, v: u32) -> Vec<u32> {
        let vu = v as usize;
        if vu < self.bits {
            self.bit_adj[vu]
                .iter()
                .map(|&c| c + self.bits as u32)
                .collect()
        } else {
            self.check_adj[vu - self.bits].clone()
        }
    }

    pub fn max_degree(&self) -> usize {
        (0..self.vertex_count() as u32)
            .map(|v| self.unified_degree(v))
            .max()
            .unwrap_or(0)
    }

    pub fn is_biregular(&self, bit_degree: usize, check_degree: usize) -> bool {
        self.bit_adj.iter().all(|a| a.len() == bit_degree)
            && self.check_adj.iter().all(|a| a.len() == check_degree)
    }

    /// Length of a shortest cycle, or None for a forest. Bipartite, so any
    /// value returned is even and at least 4.
    pub fn girth(&self) -> Option<usize> {
        let n = self.vertex_count();
        let mut best = usize::MAX;
        for start in 0..n as u32 {
            if let Some(len) = self.shortest_cycle_bound_from(start, best) {
                best = best.min(len);
            }
        }
        if best == usize::MAX {
            None
        } else {
            Some(best)
        }
    }

    /// BFS from `start`; returns the best cycle-length bound found, pruned
    /// at `cap`. The minimum of this bound over all start vertices is the
    /// girth.
    fn shortest_cycle_bound_from(&self, start: u32, cap: usize) -> Option<usize> {
        let n = self.vertex_count();
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![u32::MAX; n];
        let mut queue = std::collections::VecDeque::new();
        dist[start as usize] = 0;
        queue.push_back(start);
        let mut best = None;
        while let Some(u) = queue.pop_front() {
            let du = dist[u as usize];
            // A future encounter closes a cycle of length at least 2*du.
            if 2 * du >= best.unwrap_or(cap) {
                break;
            }
            for w in self.unified_neighbors(u) {
                if dist[w as usize] == usize::MAX {
                    dist[w as usize] = du + 1;
                    parent[w as usize] = u;
                    queue.push_back(w);
                } else if parent[u as usize] != w && parent[w as usize] != u {
                    let len = du + dist[w as usize] + 1;
                    if len < best.unwrap_or(cap) {
                        best = Some(len);
                    }
                }
            }
        }
        best
    }

    /// Some simple cycle of length < `shorter_than`, as (bit, check) edges.
    fn short_cycle_edges(&self, shorter_than: usize) -> Option<Vec<(u32, u32)>> {
        let n = self.vertex_count();
        for start in 0..n as u32 {
            let mut dist = vec![usize::MAX; n];
            let mut parent = vec![u32::MAX; n];
            let mut queue = std::collections::VecDeque::new();
            dist[start as usize] = 0;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                if 2 * dist[u as usize] >= shorter_than {
                    break;
                }
                for w in self.unified_neighbors(u) {
                    if dist[w as usize] == usize::MAX {
                        dist[w as usize] = dist[u as usize] + 1;
                        parent[w as usize] = u;
                        queue.push_back(w);
                    } else if parent[u as usize] != w
                        && parent[w as usize] != u
                        && dist[u as usize] + dist[w as usize] + 1 < shorter_than
                    {
                        return Some(self.close_cycle(u, w, &parent));
                    }
                }
            }
        }
        None
    }

    /// Walk both ancestor chains to their divergence point and emit the
    /// simple cycle closed by edge {u, w}.
    fn close_cycle(&self, u: u32, w: u32, parent: &[u32]) -> Vec<(u32, u32)> {
        let chain = |mut v: u32| {
            let mut path = vec![v];
            while parent[v as usize] != u32::MAX {
                v = parent[v as usize];
                path.push(v);
            }
            path
        };
        let (mut pu, mut pw) = (chain(u), chain(w));
        // Strip the shared tail (both chains end at the BFS root), leaving
        // both ending at the divergence vertex.
        while pu.len() >= 2 && pw.len() >= 2 && pu[pu.len() - 2] == pw[pw.len() - 2] {
            pu.pop();
            pw.pop();
        }
        debug_assert_eq!(pu.last(), pw.last());
        let mut cycle_vertices = pu;
        pw.pop();
        cycle_vertices.extend(pw.iter().rev().copied());

        let bits = self.bits as u32;
        let m = cycle_vertices.len();
        (0..m)
            .map(|i| {
                let (a, b) = (cycle_vertices[i], cycle_vertices[(i + 1) % m]);
                if a < bits {
                    (a, b - bits)
                } else {
                    (b, a - bits)
                }
            })
            .collect()
    }
}

/// Number of vertices whose depth-limited BFS sees a cycle shorter than
/// `girth_min`; zero means girth >= girth_min.
fn short_cycle_vertex_count(g: &BipartiteGraph, girth_min: usize) -> usize {
    (0..g.vertex_count() as u32)
        .filter(|&v| g.shortest_cycle_bound_from(v, girth_min).is_some())
        .count()
}

/// Random (bit_degree, check_degree)-biregular bipartite graph with girth at
/// least `girth_min`, scaled by `s`: `s * check_degree / gcd` bit vertices
/// and `s * bit_degree / gcd` check vertices. For the (3,4) family this is
/// 4s bits and 3s checks.
pub fn random_biregular(
    s: usize,
    bit_degree: usize,
    check_degree: usize,
    girth_min: usize,
    seed: u64,
    attempt_budget: usize,
) -> Result<BipartiteGraph, GenerateError> {
    if s == 0 || bit_degree == 0 || check_degree == 0 {
        return Err(GenerateError::BadParameters(
            "s and both degrees must be positive".into(),
        ));
    }
    if girth_min % 2 != 0 || girth_min < 4 {
        return Err(GenerateError::BadParameters(
            "bipartite girth must be an even number >= 4".into(),
        ));
    }
    let g = gcd(bit_degree, check_degree);
    let bits = s * check_degree / g;
    let checks = s * bit_degree / g;
    if bit_degree > checks || check_degree > bits {
        return Err(GenerateError::BadParameters(format!(
            "degree exceeds opposite side: ({bit_degree},{check_degree}) on {bits}+{checks} vertices"
        )));
    }
    let edge_count = bits * bit_degree;

    for attempt in 0..attempt_budget {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt as u64);
        let Some(mut edges) = sample_simple_configuration(
            bits,
            checks,
            bit_degree,
            check_degree,
            &mut rng,
        ) else {
            continue;
        };
        let graph = BipartiteGraph::new(bits, checks, &edges).expect("sampled simple");
        let mut bad = short_cycle_vertex_count(&graph, girth_min);
        if bad == 0 {
            return Ok(graph);
        }

        // Double-edge swaps: replace {(b1,c1),(b2,c2)} by {(b1,c2),(b2,c1)},
        // keeping the degree sequence; accept when the count of vertices on
        // short cycles does not grow.
        let swap_budget = 60 * edge_count;
        let mut stale = 0usize;
        for _ in 0..swap_budget {
            let graph = BipartiteGraph::new(bits, checks, &edges).expect("swaps keep it simple");
            let cycle = graph
                .short_cycle_edges(girth_min)
                .expect("bad > 0 implies a short cycle exists");
            let &(b1, c1) = cycle.choose(&mut rng).expect("cycle is nonempty");
            let i = edges
                .iter()
                .position(|&e| e == (b1, c1))
                .expect("cycle edge present");
            let j = rng.gen_range(0..edges.len());
            let (b2, c2) = edges[j];
            if b1 == b2
                || c1 == c2
                || graph.bit_neighbors(b1).contains(&c2)
                || graph.bit_neighbors(b2).contains(&c1)
            {
                continue;
            }
            edges[i] = (b1, c2);
            edges[j] = (b2, c1);
            let swapped = BipartiteGraph::new(bits, checks, &edges).expect("still simple");
            let new_bad = short_cycle_vertex_count(&swapped, girth_min);
            if new_bad <= bad {
                stale = if new_bad < bad { 0 } else { stale + 1 };
                bad = new_bad;
                if bad == 0 {
                    return Ok(swapped);
                }
            } else {
                edges[i] = (b1, c1);
                edges[j] = (b2, c2);
                stale += 1;
            }
            if stale > 40 * edge_count {
                break;
            }
        }
    }
    Err(GenerateError::BudgetExhausted {
        girth_min,
        attempts: attempt_budget,
    })
}

fn sample_simple_configuration(
    bits: usize,
    checks: usize,
    bit_degree: usize,
    check_degree: usize,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<(u32, u32)>> {
    let bit_stubs: Vec<u32> = (0..bits as u32).flat_map(|b| vec![b; bit_degree]).collect();
    let mut check_stubs: Vec<u32> = (0..checks as u32)
        .flat_map(|c| vec![c; check_degree])
        .collect();
    'resample: for _ in 0..200 {
        check_stubs.shuffle(rng);
        let mut seen = std::collections::HashSet::with_capacity(bit_stubs.len());
        for (b, c) in bit_stubs.iter().zip(&check_stubs) {
            if !seen.insert((*b, *c)) {
                continue 'resample;
            }
        }
        return Some(bit_stubs.iter().copied().zip(check_stubs).collect());
    }
    None
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
