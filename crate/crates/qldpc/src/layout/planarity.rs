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

//! Left-right planarity test.
//!
//! Linear-time decision procedure: one DFS orients the graph and computes
//! low points and nesting depths, a second DFS over nesting-ordered
//! adjacency lists maintains a stack of conflict pairs of back-edge
//! intervals and rejects exactly when two return edges are forced onto the
//! same side with crossing intervals. Graphs denser than the Euler bound
//! (|E| > 3|V| - 6) are rejected up front.

use crate::graph::Graph;

#[derive(Clone, Copy, Default, PartialEq, Eq, Debug)]
struct Interval {
    low: Option<u32>,
    high: Option<u32>,
}

impl Interval {
    fn is_empty(&self) -> bool {
        self.low.is_none() && self.high.is_none()
    }
}

#[derive(Clone, Copy, Default, Debug)]
struct ConflictPair {
    l: Interval,
    r: Interval,
}

impl ConflictPair {
    fn swap(&mut self) {
        std::mem::swap(&mut self.l, &mut self.r);
    }
}

struct Lr {
    /// adj[v] = (edge id, other endpoint).
    adj: Vec<Vec<(u32, u32)>>,
    /// Oriented head of each edge (tail -> head), set during orientation.
    head: Vec<u32>,
    tail: Vec<u32>,
    oriented: Vec<bool>,
    height: Vec<Option<u32>>,
    parent_edge: Vec<Option<u32>>,
    lowpt: Vec<u32>,
    lowpt2: Vec<u32>,
    nesting: Vec<u32>,
    /// Outgoing edges per vertex, sorted by nesting depth.
    ordered: Vec<Vec<u32>>,
    s: Vec<ConflictPair>,
    stack_bottom: Vec<usize>,
    lowpt_edge: Vec<Option<u32>>,
    refer: Vec<Option<u32>>,
    /// Per-edge flag marking a tree edge whose child is being expanded.
    pending: Vec<bool>,
    /// Adjacency cursors for the iterative DFS passes.
    cursor: Vec<usize>,
}

impl Lr {
    fn new(g: &Graph) -> Self {
        let n = g.n();
        let edges = g.edges();
        let m = edges.len();
        let mut adj = vec![Vec::new(); n];
        for (id, &(u, v)) in edges.iter().enumerate() {
            adj[u as usize].push((id as u32, v));
            adj[v as usize].push((id as u32, u));
        }
        Lr {
            adj,
            head: vec![0; m],
            tail: vec![0; m],
            oriented: vec![false; m],
            height: vec![None; n],
            parent_edge: vec![None; n],
            lowpt: vec![0; m],
            lowpt2: vec![0; m],
            nesting: vec![0; m],
            ordered: vec![Vec::new(); n],
            s: Vec::new(),
            stack_bottom: vec![0; m],
            lowpt_edge: vec![None; m],
            refer: vec![None; m],
            pending: vec![false; m],
            cursor: vec![0; n],
        }
    }

    /// First DFS: orient edges away from the root, compute heights, low
    /// points, and nesting depths.
    fn orient_from(&mut self, root: u32) {
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            let vu = v as usize;
            let parent = self.parent_edge[vu];
            let hv = self.height[vu].expect("height set before visit");
            while self.cursor[vu] < self.adj[vu].len() {
                let (eid, w) = self.adj[vu][self.cursor[vu]];
                let (e, w) = (eid as usize, w);
                if self.pending[e] && self.tail[e] == v {
                    // Returning from the child expanded through this edge.
                    // The tail check matters: the child sees the same edge in
                    // its own adjacency list before the parent revisits it.
                    self.pending[e] = false;
                } else {
                    if self.oriented[e] {
                        self.cursor[vu] += 1;
                        continue;
                    }
                    self.oriented[e] = true;
                    self.tail[e] = v;
                    self.head[e] = w;
                    self.lowpt[e] = hv;
                    self.lowpt2[e] = hv;
                    if self.height[w as usize].is_none() {
                        // Tree edge: expand the child first, then finish e.
                        self.parent_edge[w as usize] = Some(eid);
                        self.height[w as usize] = Some(hv + 1);
                        self.pending[e] = true;
                        stack.push(v);
                        stack.push(w);
                        break;
                    }
                    // Back edge: returns to the ancestor's height.
                    self.lowpt[e] = self.height[w as usize].unwrap();
                }
                self.nesting[e] = 2 * self.lowpt[e];
                if self.lowpt2[e] < hv {
                    // Chordal edges nest outside non-chordal ones.
                    self.nesting[e] += 1;
                }
                if let Some(pe) = parent {
                    let pe = pe as usize;
                    if self.lowpt[e] < self.lowpt[pe] {
                        self.lowpt2[pe] = self.lowpt[pe].min(self.lowpt2[e]);
                        self.lowpt[pe] = self.lowpt[e];
                    } else if self.lowpt[e] > self.lowpt[pe] {
                        self.lowpt2[pe] = self.lowpt2[pe].min(self.lowpt[e]);
                    } else {
                        self.lowpt2[pe] = self.lowpt2[pe].min(self.lowpt2[e]);
                    }
                }
                self.cursor[vu] += 1;
            }
        }
    }

    fn conflicting(&self, i: &Interval, b: u32) -> bool {
        match i.high {
            Some(h) => self.lowpt[h as usize] > self.lowpt[b as usize],
            None => false,
        }
    }

    fn lowest(&self, p: &ConflictPair) -> u32 {
        match (p.l.low, p.r.low) {
            (None, Some(r)) => self.lowpt[r as usize],
            (Some(l), None) => self.lowpt[l as usize],
            (Some(l), Some(r)) => self.lowpt[l as usize].min(self.lowpt[r as usize]),
            (None, None) => unreachable!("lowest of an empty conflict pair"),
        }
    }

    /// Second DFS: merge and check back-edge constraints bottom-up.
    fn test_from(&mut self, root: u32) -> bool {
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            let vu = v as usize;
            let parent = self.parent_edge[vu];
            let mut halted = false;
            while self.cursor[vu] < self.ordered[vu].len() {
                let eid = self.ordered[vu][self.cursor[vu]];
                let e = eid as usize;
                let w = self.head[e];
                if self.pending[e] {
                    self.pending[e] = false;
                } else {
                    self.stack_bottom[e] = self.s.len();
                    if Some(eid) == self.parent_edge[w as usize] {
                        // Tree edge: test the subtree first.
                        self.pending[e] = true;
                        stack.push(v);
                        stack.push(w);
                        halted = true;
                        break;
                    }
                    // Back edge: its own one-element interval.
                    self.lowpt_edge[e] = Some(eid);
                    self.s.push(ConflictPair {
                        l: Interval::default(),
                        r: Interval {
                            low: Some(eid),
                            high: Some(eid),
                        },
                    });
                }
                // Integrate return edges of e into the constraints of the
                // parent edge.
                if self.lowpt[e] < self.height[vu].unwrap() {
                    let pe = parent.expect("root edges cannot return above the root");
                    if eid == self.ordered[vu][0] {
                        self.lowpt_edge[pe as usize] = self.lowpt_edge[e];
                    } else if !self.add_constraints(eid, pe) {
                        return false;
                    }
                }
                self.cursor[vu] += 1;
            }
            if !halted {
                if let Some(pe) = parent {
                    self.remove_back_edges(pe);
                }
            }
        }
        true
    }

    fn add_constraints(&mut self, ei: u32, e: u32) -> bool {
        let mut p = ConflictPair::default();
        // Merge the return edges of ei into p.r.
        loop {
            let mut q = self.s.pop().expect("ei pushed at least one pair");
            if !q.l.is_empty() {
                q.swap();
            }
            if !q.l.is_empty() {
                return false;
            }
            let q_low = q.r.low.expect("stack intervals keep both ends");
            if self.lowpt[q_low as usize] > self.lowpt[e as usize] {
                // The interval returns strictly above lowpt(e): merge.
                if p.r.is_empty() {
                    p.r.high = q.r.high;
                } else {
                    self.refer[p.r.low.unwrap() as usize] = q.r.high;
                }
                p.r.low = q.r.low;
            } else {
                // Align: it returns to lowpt(e) itself.
                self.refer[q_low as usize] = self.lowpt_edge[e as usize];
            }
            if self.s.len() == self.stack_bottom[ei as usize] {
                break;
            }
        }
        // Merge conflicting return edges of earlier siblings into p.l.
        loop {
            let conflicts = match self.s.last() {
                Some(top) => self.conflicting(&top.l, ei) || self.conflicting(&top.r, ei),
                None => false,
            };
            if !conflicts {
                break;
            }
            let mut q = self.s.pop().unwrap();
            if self.conflicting(&q.r, ei) {
                q.swap();
            }
            if self.conflicting(&q.r, ei) {
                return false;
            }
            if let Some(pr_low) = p.r.low {
                self.refer[pr_low as usize] = q.r.high;
            }
            if q.r.low.is_some() {
                p.r.low = q.r.low;
            }
            if p.l.is_empty() {
                p.l.high = q.l.high;
            } else {
                self.refer[p.l.low.unwrap() as usize] = q.l.high;
            }
            p.l.low = q.l.low;
        }
        if !(p.l.is_empty() && p.r.is_empty()) {
            self.s.push(p);
        }
        true
    }

    /// Unwind constraints that return exactly to `u`, the tail of tree
    /// edge `e`, once its subtree is done.
    fn remove_back_edges(&mut self, e: u32) {
        let u = self.tail[e as usize];
        let hu = self.height[u as usize].unwrap();
        // Drop conflict pairs consisting entirely of returns to u.
        while let Some(top) = self.s.last() {
            if self.lowest(top) == hu {
                self.s.pop();
            } else {
                break;
            }
        }
        // Trim the topmost remaining pair edge by edge.
        if let Some(mut p) = self.s.pop() {
            while let Some(h) = p.l.high {
                if self.head[h as usize] == u {
                    p.l.high = self.refer[h as usize];
                } else {
                    break;
                }
            }
            if p.l.high.is_none() {
                if let Some(low) = p.l.low {
                    // The left side just emptied: link it under the right.
                    self.refer[low as usize] = p.r.low;
                    p.l.low = None;
                }
            }
            while let Some(h) = p.r.high {
                if self.head[h as usize] == u {
                    p.r.high = self.refer[h as usize];
                } else {
                    break;
                }
            }
            if p.r.high.is_none() {
                if let Some(low) = p.r.low {
                    self.refer[low as usize] = p.l.low;
                    p.r.low = None;
                }
            }
            self.s.push(p);
        }
        // Track the highest surviving return edge for e (embedding-side
        // bookkeeping; harmless for the decision).
        if self.lowpt[e as usize] < hu {
            if let Some(top) = self.s.last() {
                let hl = top.l.high;
                let hr = top.r.high;
                self.refer[e as usize] = match (hl, hr) {
                    (Some(l), Some(r)) => {
                        if self.lowpt[l as usize] > self.lowpt[r as usize] {
                            Some(l)
                        } else {
                            Some(r)
                        }
                    }
                    (Some(l), None) => Some(l),
                    (_, r) => r,
                };
            }
        }
    }
}

/// True iff `g` admits a crossing-free drawing in the plane.
pub fn is_planar(g: &Graph) -> bool {
    let n = g.n();
    if n < 5 {
        return true;
    }
    let m = g.edge_count();
    if m > 3 * n - 6 {
        return false;
    }
    let mut lr = Lr::new(g);
    let mut roots = Vec::new();
    for v in 0..n as u32 {
        if lr.height[v as usize].is_none() {
            lr.height[v as usize] = Some(0);
            roots.push(v);
            lr.orient_from(v);
        }
    }
    {
        let Lr {
            ordered,
            tail,
            nesting,
            ..
        } = &mut lr;
        for e in 0..m as u32 {
            ordered[tail[e as usize] as usize].push(e);
        }
        for list in ordered.iter_mut() {
            list.sort_by_key(|&e| nesting[e as usize]);
        }
    }
    lr.cursor.iter_mut().for_each(|c| *c = 0);
    lr.pending.iter_mut().for_each(|p| *p = false);
    roots.into_iter().all(|r| lr.test_from(r))
}
