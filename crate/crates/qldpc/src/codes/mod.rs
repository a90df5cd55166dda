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

//! CSS codes built as hypergraph products of two bipartite Tanner graphs.
//!
//! For seeds G1 = (B1, C1, E1) and G2 = (B2, C2, E2):
//! * data qubits sit on B1xB2 and C1xC2,
//! * X stabilizers on B1xC2, Z stabilizers on C1xB2,
//! * the stabilizer at (i, j) touches (i', j) for every {i, i'} in E1 and
//!   (i, j') for every {j, j'} in E2.
//!
//! Any X/Z stabilizer pair overlaps on zero or exactly two qubits, which
//! gives commutation and is what the cardinal circuit schedule exploits.
//! With (3,4)-biregular seeds scaled by s (4s bits, 3s checks) the product
//! has n = 25s^2 data qubits, 24s^2 stabilizers, and k = s^2 when both seed
//! adjacency matrices have full rank.

mod tanner;

pub use tanner::{random_biregular, BipartiteGraph, GenerateError, GraphError};

use crate::gf2::{Echelon, Gf2Matrix, Gf2Vector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CodeError {
    #[error("check matrices disagree on qubit count: {0} vs {1}")]
    ShapeMismatch(usize, usize),
    #[error("X row {x_row} anticommutes with Z row {z_row}")]
    CommutationViolated { x_row: usize, z_row: usize },
    #[error("code file check matrices do not match the product of its seed graphs")]
    InconsistentProduct,
    #[error("seed graph malformed: {0}")]
    BadSeedGraph(#[from] GraphError),
}

/// Pauli operator up to phase: X and Z support vectors over the data qubits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PauliOperator {
    pub x: Gf2Vector,
    pub z: Gf2Vector,
}

impl PauliOperator {
    pub fn identity(n: usize) -> Self {
        PauliOperator {
            x: Gf2Vector::zeros(n),
            z: Gf2Vector::zeros(n),
        }
    }

    pub fn single_x(n: usize, q: usize) -> Self {
        let mut p = Self::identity(n);
        p.x.flip(q);
        p
    }

    pub fn single_z(n: usize, q: usize) -> Self {
        let mut p = Self::identity(n);
        p.z.flip(q);
        p
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    /// Number of qubits acted on non-trivially.
    pub fn weight(&self) -> usize {
        (0..self.n()).filter(|&q| self.x.get(q) || self.z.get(q)).count()
    }

    pub fn xor_assign(&mut self, other: &PauliOperator) {
        self.x.xor_assign(&other.x);
        self.z.xor_assign(&other.z);
    }
}

/// How an undetected operator acts on the code space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ErrorClass {
    /// Zero syndrome and a product of stabilizer generators (the identity
    /// operator included): acts trivially.
    Stabilizer,
    /// Zero syndrome but outside the stabilizer group: corrupts the encoded
    /// state.
    Logical,
    /// Nonzero syndrome.
    Detectable,
}

/// Hypergraph-product bookkeeping: seed graphs plus the (i, j) coordinates of
/// every qubit and stabilizer under the unified vertex numbering of each seed
/// (bits first, then checks).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HgpStructure {
    pub g1: BipartiteGraph,
    pub g2: BipartiteGraph,
    pub qubit_labels: Vec<(u32, u32)>,
    pub x_stab_labels: Vec<(u32, u32)>,
    pub z_stab_labels: Vec<(u32, u32)>,
}

/// CSS code: X and Z parity checks with Hx * Hz^T = 0.
#[derive(Clone, Debug)]
pub struct CssCode {
    n: usize,
    k: usize,
    hx: Gf2Matrix,
    hz: Gf2Matrix,
    x_supports: Vec<Vec<u32>>,
    z_supports: Vec<Vec<u32>>,
    qubit_x_checks: Vec<Vec<u32>>,
    qubit_z_checks: Vec<Vec<u32>>,
    x_echelon: Echelon,
    z_echelon: Echelon,
    hgp: Option<HgpStructure>,
}

impl PartialEq for CssCode {
    fn eq(&self, other: &Self) -> bool {
        self.hx == other.hx && self.hz == other.hz && self.hgp == other.hgp
    }
}

impl CssCode {
    /// Builds a CSS code from sparse check rows; verifies commutation.
    pub fn from_checks(
        n: usize,
        x_supports: Vec<Vec<u32>>,
        z_supports: Vec<Vec<u32>>,
    ) -> Result<Self, CodeError> {
        Self::assemble(n, x_supports, z_supports, None)
    }

    fn assemble(
        n: usize,
        x_supports: Vec<Vec<u32>>,
        z_supports: Vec<Vec<u32>>,
        hgp: Option<HgpStructure>,
    ) -> Result<Self, CodeError> {
        let mut x_supports = x_supports;
        let mut z_supports = z_supports;
        for s in x_supports.iter_mut().chain(z_supports.iter_mut()) {
            s.sort_unstable();
        }
        let hx = Gf2Matrix::from_sparse_rows(n, &x_supports);
        let hz = Gf2Matrix::from_sparse_rows(n, &z_supports);
        let product = hx.mul(&hz.transpose());
        if !product.is_zero() {
            let (mut bad_x, mut bad_z) = (0, 0);
            'scan: for r in 0..product.rows() {
                for c in 0..product.cols() {
                    if product.get(r, c) {
                        (bad_x, bad_z) = (r, c);
                        break 'scan;
                    }
                }
            }
            return Err(CodeError::CommutationViolated {
                x_row: bad_x,
                z_row: bad_z,
            });
        }
        let mut qubit_x_checks = vec![Vec::new(); n];
        for (row, support) in x_supports.iter().enumerate() {
            for &q in support {
                qubit_x_checks[q as usize].push(row as u32);
            }
        }
        let mut qubit_z_checks = vec![Vec::new(); n];
        for (row, support) in z_supports.iter().enumerate() {
            for &q in support {
                qubit_z_checks[q as usize].push(row as u32);
            }
        }
        let x_echelon = hx.row_echelon();
        let z_echelon = hz.row_echelon();
        let k = n - x_echelon.rank() - z_echelon.rank();
        Ok(CssCode {
            n,
            k,
            hx,
            hz,
            x_supports,
            z_supports,
            qubit_x_checks,
            qubit_z_checks,
            x_echelon,
            z_echelon,
            hgp,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Logical qubit count, n - rank(Hx) - rank(Hz).
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn hx(&self) -> &Gf2Matrix {
        &self.hx
    }

    pub fn hz(&self) -> &Gf2Matrix {
        &self.hz
    }

    pub fn num_x_stabs(&self) -> usize {
        self.x_supports.len()
    }

    pub fn num_z_stabs(&self) -> usize {
        self.z_supports.len()
    }

    /// Qubits of X stabilizer `row`, sorted.
    pub fn x_support(&self, row: usize) -> &[u32] {
        &self.x_supports[row]
    }

    pub fn z_support(&self, row: usize) -> &[u32] {
        &self.z_supports[row]
    }

    /// X stabilizer rows touching qubit `q`, sorted.
    pub fn x_checks_of(&self, q: usize) -> &[u32] {
        &self.qubit_x_checks[q]
    }

    pub fn z_checks_of(&self, q: usize) -> &[u32] {
        &self.qubit_z_checks[q]
    }

    pub fn hgp(&self) -> Option<&HgpStructure> {
        self.hgp.as_ref()
    }

    pub fn max_stabilizer_weight(&self) -> usize {
        self.x_supports
            .iter()
            .chain(&self.z_supports)
            .map(|s| s.len())
            .max()
            .unwrap_or(0)
    }
}

/// Hypergraph product of two bipartite graphs.
///
/// Qubit indexing: the B1xB2 block first (row-major in (i, j)), then C1xC2.
/// X stabilizers are row-major over B1xC2, Z stabilizers over C1xB2.
pub fn hgp(g1: &BipartiteGraph, g2: &BipartiteGraph) -> CssCode {
    let (b1, c1) = (g1.bits(), g1.checks());
    let (b2, c2) = (g2.bits(), g2.checks());
    let n = b1 * b2 + c1 * c2;
    let bb = |i: usize, j: usize| (i * b2 + j) as u32;
    let cc = |i: usize, j: usize| (b1 * b2 + i * c2 + j) as u32;

    let mut qubit_labels = Vec::with_capacity(n);
    for i in 0..b1 {
        for j in 0..b2 {
            qubit_labels.push((i as u32, j as u32));
        }
    }
    for i in 0..c1 {
        for j in 0..c2 {
            qubit_labels.push(((b1 + i) as u32, (b2 + j) as u32));
        }
    }

    let mut x_supports = Vec::with_capacity(b1 * c2);
    let mut x_stab_labels = Vec::with_capacity(b1 * c2);
    for i in 0..b1 {
        for j in 0..c2 {
            let mut support = Vec::new();
            for &b in g2.check_neighbors(j as u32) {
                support.push(bb(i, b as usize));
            }
            for &c in g1.bit_neighbors(i as u32) {
                support.push(cc(c as usize, j));
            }
            x_supports.push(support);
            x_stab_labels.push((i as u32, (b2 + j) as u32));
        }
    }

    let mut z_supports = Vec::with_capacity(c1 * b2);
    let mut z_stab_labels = Vec::with_capacity(c1 * b2);
    for i in 0..c1 {
        for j in 0..b2 {
            let mut support = Vec::new();
            for &b in g1.check_neighbors(i as u32) {
                support.push(bb(b as usize, j));
            }
            for &c in g2.bit_neighbors(j as u32) {
                support.push(cc(i, c as usize));
            }
            z_supports.push(support);
            z_stab_labels.push(((b1 + i) as u32, j as u32));
        }
    }

    let hgp = HgpStructure {
        g1: g1.clone(),
        g2: g2.clone(),
        qubit_labels,
        x_stab_labels,
        z_stab_labels,
    };
    CssCode::assemble(n, x_supports, z_supports, Some(hgp))
        .expect("hypergraph products commute by construction")
}

/// Toric code with distance `d`: the product of two cyclic repetition codes.
pub fn toric(d: usize) -> CssCode {
    let g = BipartiteGraph::cycle(d);
    hgp(&g, &g)
}

/// Syndrome of `e`: X-check outcomes (sensitive to the Z part) and Z-check
/// outcomes (sensitive to the X part).
pub fn syndrome(code: &CssCode, e: &PauliOperator) -> (Gf2Vector, Gf2Vector) {
    assert_eq!(e.n(), code.n(), "operator length mismatch");
    (code.hx.mul_vector(&e.z), code.hz.mul_vector(&e.x))
}

/// Classifies a residual operator by its action on the code space.
pub fn classify(code: &CssCode, e: &PauliOperator) -> ErrorClass {
    let (sx, sz) = syndrome(code, e);
    if !sx.is_zero() || !sz.is_zero() {
        return ErrorClass::Detectable;
    }
    if code.x_echelon.contains(&e.x) && code.z_echelon.contains(&e.z) {
        ErrorClass::Stabilizer
    } else {
        ErrorClass::Logical
    }
}

/// On-disk JSON form of a code: sparse checks plus optional product
/// structure. When seed graphs are present, loading rebuilds the product and
/// insists the stored checks match it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CodeFile {
    pub n: usize,
    pub hx: Vec<Vec<u32>>,
    pub hz: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubit_labels: Option<Vec<(u32, u32)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_stab_labels: Option<Vec<(u32, u32)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_stab_labels: Option<Vec<(u32, u32)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_graphs: Option<SeedGraphsFile>,
    /// Free-form provenance (generator parameters, selection statistics).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<serde_json::Value>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeedGraphsFile {
    pub g1: GraphFile,
    pub g2: GraphFile,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphFile {
    pub bits: usize,
    pub checks: usize,
    pub edges: Vec<(u32, u32)>,
}

impl From<&BipartiteGraph> for GraphFile {
    fn from(g: &BipartiteGraph) -> Self {
        GraphFile {
            bits: g.bits(),
            checks: g.checks(),
            edges: g.edges(),
        }
    }
}

impl TryFrom<&GraphFile> for BipartiteGraph {
    type Error = GraphError;
    fn try_from(f: &GraphFile) -> Result<Self, GraphError> {
        BipartiteGraph::new(f.bits, f.checks, &f.edges)
    }
}

impl CssCode {
    pub fn to_file(&self) -> CodeFile {
        CodeFile {
            n: self.n,
            hx: self.x_supports.clone(),
            hz: self.z_supports.clone(),
            qubit_labels: self.hgp.as_ref().map(|h| h.qubit_labels.clone()),
            x_stab_labels: self.hgp.as_ref().map(|h| h.x_stab_labels.clone()),
            z_stab_labels: self.hgp.as_ref().map(|h| h.z_stab_labels.clone()),
            seed_graphs: self.hgp.as_ref().map(|h| SeedGraphsFile {
                g1: (&h.g1).into(),
                g2: (&h.g2).into(),
            }),
            meta: None,
        }
    }

    pub fn from_file(file: &CodeFile) -> Result<Self, CodeError> {
        if let Some(seeds) = &file.seed_graphs {
            let g1 = BipartiteGraph::try_from(&seeds.g1)?;
            let g2 = BipartiteGraph::try_from(&seeds.g2)?;
            let code = hgp(&g1, &g2);
            let hx = Gf2Matrix::from_sparse_rows(file.n, &file.hx);
            let hz = Gf2Matrix::from_sparse_rows(file.n, &file.hz);
            if code.n != file.n || code.hx != hx || code.hz != hz {
                return Err(CodeError::InconsistentProduct);
            }
            Ok(code)
        } else {
            CssCode::from_checks(file.n, file.hx.clone(), file.hz.clone())
        }
    }
}
