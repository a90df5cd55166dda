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

//! Least-squares fit of the empirical failure scaling law
//! `P_L(p, k) = c1 * (p / p_t)^(c2 * k^c3)`.
//!
//! In log space the law is linear once c3 is fixed:
//! `ln P_L = a + b * (k^c3 * ln p) + c * k^c3` with `a = ln c1`, `b = c2`,
//! and `c = -c2 * ln p_t`. The fit therefore profiles c3 — a coarse grid
//! over [0.02, 1.2] refined by golden-section search, minimizing the
//! residual sum of squares of the inner linear solve — and reads the other
//! three parameters off the winning linear solution. Positivity of c1 and
//! p_t is structural (both are exponentials); c2 must come out positive or
//! the fit reports non-convergence.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FitError {
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("fit did not converge: {0}")]
    NonConvergence(String),
}

/// One aggregated observation: a code size, a physical rate, and the
/// measured failure probability.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitPoint {
    /// Number of logical qubits of the code.
    pub k: f64,
    /// Physical error rate.
    pub p: f64,
    /// Measured logical failure probability.
    pub pl: f64,
}

/// The four-parameter failure scaling law.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingLaw {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// Threshold rate: below it, failure probability falls with code size.
    pub p_t: f64,
}

impl ScalingLaw {
    /// Predicted logical failure probability at rate `p` for a code with
    /// `k` logical qubits.
    pub fn failure_rate(&self, p: f64, k: f64) -> f64 {
        self.c1 * (p / self.p_t).powf(self.c2 * k.powf(self.c3))
    }
}

impl Default for ScalingLaw {
    /// Reference constants for the (3,4) hypergraph-product family:
    /// c1 = 0.64, c2 = 1.3, c3 = 0.21, p_t = 2.8e-3.
    fn default() -> Self {
        ScalingLaw {
            c1: 0.64,
            c2: 1.3,
            c3: 0.21,
            p_t: 2.8e-3,
        }
    }
}

/// A fitted law plus goodness-of-fit diagnostics.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FitResult {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub p_t: f64,
    /// Residual sum of squares of ln P_L at the fitted parameters.
    pub rss: f64,
    /// Observations actually used (positive rate and failure probability).
    pub points: usize,
    /// sqrt(rss / (points - 3)): scatter of one log-observation.
    pub residual_stderr: f64,
    /// Covariance of the linear-stage parameters (ln c1, c2, -c2*ln p_t)
    /// at the profiled c3.
    pub linear_covariance: [[f64; 3]; 3],
}

impl FitResult {
    pub fn law(&self) -> ScalingLaw {
        ScalingLaw {
            c1: self.c1,
            c2: self.c2,
            c3: self.c3,
            p_t: self.p_t,
        }
    }
}

/// Search range for the size exponent c3.
const C3_RANGE: (f64, f64) = (0.02, 1.2);
/// Coarse grid points over [`C3_RANGE`] before golden-section refinement.
const C3_GRID: usize = 60;
/// Width at which golden-section search stops.
const C3_TOLERANCE: f64 = 1e-9;

struct LinearSolve {
    a: f64,
    b: f64,
    c: f64,
    rss: f64,
    xtx: [[f64; 3]; 3],
}

/// Solves the inner linear problem at a fixed c3 and reports its residual.
fn solve_at(points: &[FitPoint], c3: f64) -> Option<LinearSolve> {
    let mut xtx = [[0.0f64; 3]; 3];
    let mut xty = [0.0f64; 3];
    for q in points {
        let w = q.k.powf(c3);
        let row = [1.0, w * q.p.ln(), w];
        let y = q.pl.ln();
        for i in 0..3 {
            for j in 0..3 {
                xtx[i][j] += row[i] * row[j];
            }
            xty[i] += row[i] * y;
        }
    }
    let [a, b, c] = solve3(xtx, xty)?;
    let rss = points
        .iter()
        .map(|q| {
            let w = q.k.powf(c3);
            let r = q.pl.ln() - (a + b * w * q.p.ln() + c * w);
            r * r
        })
        .sum();
    Some(LinearSolve { a, b, c, rss, xtx })
}

/// Gaussian elimination with partial pivoting for a 3x3 system.
fn solve3(m: [[f64; 3]; 3], rhs: [f64; 3]) -> Option<[f64; 3]> {
    let mut aug = [[0.0f64; 4]; 3];
    for i in 0..3 {
        aug[i][..3].copy_from_slice(&m[i]);
        aug[i][3] = rhs[i];
    }
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| {
            aug[i][col]
                .abs()
                .partial_cmp(&aug[j][col].abs())
                .expect("finite pivots")
        })?;
        if aug[pivot][col].abs() < 1e-12 * (1.0 + aug[col][col].abs()) {
            return None;
        }
        aug.swap(col, pivot);
        for row in 0..3 {
            if row == col {
                continue;
            }
            let factor = aug[row][col] / aug[col][col];
            for j in col..4 {
                aug[row][j] -= factor * aug[col][j];
            }
        }
    }
    let mut out = [0.0f64; 3];
    for i in 0..3 {
        out[i] = aug[i][3] / aug[i][i];
        if !out[i].is_finite() {
            return None;
        }
    }
    Some(out)
}

/// Inverse of a 3x3 matrix via the adjugate; `None` when near-singular.
fn invert3(m: [[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    if det.abs() < 1e-300 {
        return None;
    }
    let mut inv = [[0.0f64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (r0, r1) = match i {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            let (c0, c1) = match j {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            let minor = m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            // Adjugate transposes the cofactor matrix.
            inv[j][i] = sign * minor / det;
        }
    }
    Some(inv)
}

/// Golden-section minimization of `f` over [lo, hi].
fn golden_min(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let ratio = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - ratio * (hi - lo);
    let mut d = lo + ratio * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while hi - lo > C3_TOLERANCE {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - ratio * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + ratio * (hi - lo);
            fd = f(d);
        }
    }
    0.5 * (lo + hi)
}

/// Fits the scaling law to aggregated observations.
///
/// Needs at least two distinct code sizes (otherwise the size exponent c3
/// cannot be identified) and at least three distinct rates per size.
/// Observations with zero failure probability carry no log-space
/// information and are skipped.
pub fn fit_threshold(points: &[FitPoint]) -> Result<FitResult, FitError> {
    let usable: Vec<FitPoint> = points
        .iter()
        .copied()
        .filter(|q| q.pl > 0.0 && q.p > 0.0 && q.k >= 1.0)
        .collect();
    if usable.len() < 4 {
        return Err(FitError::Degenerate(format!(
            "{} usable observations; the four-parameter law needs at least 4",
            usable.len()
        )));
    }
    let mut ks: Vec<u64> = usable.iter().map(|q| q.k.to_bits()).collect();
    ks.sort_unstable();
    ks.dedup();
    if ks.len() < 2 {
        return Err(FitError::Degenerate(
            "all observations share one code size; the size exponent is unidentifiable".into(),
        ));
    }
    for &k_bits in &ks {
        let mut ps: Vec<u64> = usable
            .iter()
            .filter(|q| q.k.to_bits() == k_bits)
            .map(|q| q.p.to_bits())
            .collect();
        ps.sort_unstable();
        ps.dedup();
        if ps.len() < 3 {
            return Err(FitError::Degenerate(format!(
                "code size k = {} has {} distinct rates; need at least 3",
                f64::from_bits(k_bits),
                ps.len()
            )));
        }
    }

    let rss_of = |c3: f64| solve_at(&usable, c3).map_or(f64::INFINITY, |s| s.rss);
    let (lo, hi) = C3_RANGE;
    let step = (hi - lo) / C3_GRID as f64;
    let best_idx = (0..=C3_GRID)
        .min_by(|&i, &j| {
            let fi = rss_of(lo + i as f64 * step);
            let fj = rss_of(lo + j as f64 * step);
            fi.partial_cmp(&fj).expect("rss comparisons are total")
        })
        .expect("grid is non-empty");
    let bracket_lo = (lo + (best_idx as f64 - 1.0) * step).max(lo);
    let bracket_hi = (lo + (best_idx as f64 + 1.0) * step).min(hi);
    let c3 = golden_min(bracket_lo, bracket_hi, rss_of);

    let solved = solve_at(&usable, c3).ok_or_else(|| {
        FitError::NonConvergence("the design matrix is singular at the best exponent".into())
    })?;
    // c2 must be positive; anything at rounding scale means the failure
    // probability does not actually steepen with p.
    if !(solved.b > 1e-9) {
        return Err(FitError::NonConvergence(format!(
            "rate-slope coefficient c2 = {:.4} is not positive; the data do not \
             steepen with p as the law requires",
            solved.b
        )));
    }
    let points_used = usable.len();
    let dof = points_used.saturating_sub(3);
    let variance = if dof > 0 { solved.rss / dof as f64 } else { 0.0 };
    let linear_covariance = invert3(solved.xtx)
        .map(|inv| {
            let mut cov = inv;
            for row in &mut cov {
                for entry in row {
                    *entry *= variance;
                }
            }
            cov
        })
        .unwrap_or([[f64::INFINITY; 3]; 3]);

    Ok(FitResult {
        c1: solved.a.exp(),
        c2: solved.b,
        c3,
        p_t: (-solved.c / solved.b).exp(),
        rss: solved.rss,
        points: points_used,
        residual_stderr: variance.sqrt(),
        linear_covariance,
    })
}
