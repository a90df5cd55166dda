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

//! Plain undirected graphs plus the two multigraph workhorses shared by
//! edge coloring and 2-factor extraction: Euler circuits and perfect-matching
//! peeling of regular bipartite multigraphs.

use serde::{Deserialize, Serialize};

/// Simple undirected graph (no loops, no parallel edges).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    edges: Vec<(u32, u32)>,
    adj: Vec<Vec<u32>>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            n,
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut g = Self::new(n);
        for (u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    /// Adds `{u, v}`; returns false (and does nothing) for loops and
    /// duplicates.
    pub fn add_edge(&mut self, u: u32, v: u32) -> bool {
        assert!((u as usize) < self.n && (v as usize) < self.n, "vertex out of range");
        if u == v || self.has_edge(u, v) {
            return false;
        }
        self.adj[u as usize].push(v);
        self.adj[v as usize].push(u);
        let e = if u < v { (u, v) } else { (v, u) };
        self.edges.push(e);
        true
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adj[u as usize].contains(&v)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as (min, max) pairs in insertion order.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n as u32).map(|v| self.degree(v)).max().unwrap_or(0)
    }
}

/// Multigraph with explicit edge identities; loops and parallel edges allowed.
/// Used internally where padding to regularity requires them.
#[derive(Clone, Debug)]
pub(crate) struct Multigraph {
    pub n: usize,
    pub endpoints: Vec<(u32, u32)>,
    /// Edge ids incident to each vertex; a loop id appears twice.
    pub adj: Vec<Vec<u32>>,
}

impl Multigraph {
    pub fn new(n: usize) -> Self {
        Multigraph {
            n,
            endpoints: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    pub fn add_edge(&mut self, u: u32, v: u32) -> u32 {
        assert!((u as usize) < self.n && (v as usize) < self.n, "vertex out of range");
        let id = self.endpoints.len() as u32;
        self.endpoints.push((u, v));
        self.adj[u as usize].push(id);
        self.adj[v as usize].push(id);
        id
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    /// Euler circuits, one per connected component that carries edges.
    /// Every vertex must have even degree. Each circuit is the traversal as
    /// (edge id, tail, head) triples, consecutive triples sharing a vertex.
    pub fn euler_circuits(&self) -> Vec<Vec<(u32, u32, u32)>> {
        let m = self.endpoints.len();
        for v in 0..self.n {
            assert!(self.degree(v as u32) % 2 == 0, "odd degree at {v}");
        }
        let mut used = vec![false; m];
        let mut cursor = vec![0usize; self.n];
        let mut circuits = Vec::new();
        for start in 0..self.n as u32 {
            if cursor[start as usize] >= self.adj[start as usize].len() {
                continue;
            }
            // Hierholzer: walk until stuck, splicing sub-tours via the stack.
            let mut stack: Vec<(u32, Option<u32>)> = vec![(start, None)];
            let mut tour: Vec<(u32, u32, u32)> = Vec::new();
            while let Some(&(v, via)) = stack.last() {
                let vl = &self.adj[v as usize];
                let mut advanced = false;
                while cursor[v as usize] < vl.len() {
                    let e = vl[cursor[v as usize]];
                    cursor[v as usize] += 1;
                    if used[e as usize] {
                        continue;
                    }
                    used[e as usize] = true;
                    let (a, b) = self.endpoints[e as usize];
                    let w = if a == v { b } else { a };
                    stack.push((w, Some(e)));
                    advanced = true;
                    break;
                }
                if !advanced {
                    stack.pop();
                    if let (Some(e), Some(&(prev, _))) = (via, stack.last()) {
                        tour.push((e, prev, v));
                    }
                }
            }
            tour.reverse();
            if !tour.is_empty() {
                circuits.push(tour);
            }
        }
        debug_assert!(used.iter().all(|&u| u), "euler traversal missed edges");
        circuits
    }
}

/// Bipartite multigraph with `left` + `right` vertex classes.
#[derive(Clone, Debug)]
pub(crate) struct BipartiteMulti {
    pub left: usize,
    pub right: usize,
    /// (left vertex, right vertex) per edge id.
    pub endpoints: Vec<(u32, u32)>,
    pub left_adj: Vec<Vec<u32>>,
}

impl BipartiteMulti {
    pub fn new(left: usize, right: usize) -> Self {
        BipartiteMulti {
            left,
            right,
            endpoints: Vec::new(),
            left_adj: vec![Vec::new(); left],
        }
    }

    pub fn add_edge(&mut self, l: u32, r: u32) -> u32 {
        assert!((l as usize) < self.left && (r as usize) < self.right);
        let id = self.endpoints.len() as u32;
        self.endpoints.push((l, r));
        self.left_adj[l as usize].push(id);
        id
    }

    /// Splits a k-regular bipartite multigraph into k perfect matchings
    /// (edge-id lists). König: a regular bipartite multigraph always has a
    /// perfect matching, and removing one keeps it regular.
    pub fn split_regular_into_matchings(&self, k: usize) -> Vec<Vec<u32>> {
        assert_eq!(self.left, self.right, "regular bipartite classes must balance");
        for l in 0..self.left {
            assert_eq!(self.left_adj[l].len(), k, "left vertex {l} not {k}-regular");
        }
        let mut right_deg = vec![0usize; self.right];
        for &(_, r) in &self.endpoints {
            right_deg[r as usize] += 1;
        }
        for (r, &d) in right_deg.iter().enumerate() {
            assert_eq!(d, k, "right vertex {r} not {k}-regular");
        }

        let mut assigned = vec![false; self.endpoints.len()];
        let mut matchings = Vec::with_capacity(k);
        for _ in 0..k {
            // Kuhn's augmenting paths over the still-unassigned edges.
            let mut match_left: Vec<Option<u32>> = vec![None; self.left];
            let mut match_right: Vec<Option<u32>> = vec![None; self.right];
            for l in 0..self.left as u32 {
                let mut seen = vec![false; self.right];
                let ok = self.augment(l, &assigned, &mut match_left, &mut match_right, &mut seen);
                assert!(ok, "regular bipartite multigraph must admit a perfect matching");
            }
            let mut matching = Vec::with_capacity(self.left);
            for l in 0..self.left {
                let e = match_left[l].expect("perfect matching covers all left vertices");
                assigned[e as usize] = true;
                matching.push(e);
            }
            matchings.push(matching);
        }
        debug_assert!(assigned.iter().all(|&a| a));
        matchings
    }

    fn augment(
        &self,
        l: u32,
        assigned: &[bool],
        match_left: &mut Vec<Option<u32>>,
        match_right: &mut Vec<Option<u32>>,
        seen: &mut [bool],
    ) -> bool {
        for &e in &self.left_adj[l as usize] {
            if assigned[e as usize] {
                continue;
            }
            let r = self.endpoints[e as usize].1 as usize;
            if seen[r] {
                continue;
            }
            seen[r] = true;
            let free = match match_right[r] {
                None => true,
                Some(old) => {
                    let ol = self.endpoints[old as usize].0;
                    self.augment(ol, assigned, match_left, match_right, seen)
                }
            };
            if free {
                match_left[l as usize] = Some(e);
                match_right[r] = Some(e);
                return true;
            }
        }
        false
    }
}
