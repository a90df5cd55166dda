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

//! Normalized min-sum belief propagation for syndrome decoding.
//!
//! Messages are log-likelihood ratios on the Tanner graph of one check
//! matrix, updated on a parallel (flooding) schedule. Iteration stops when
//! the hard decision's violated-check count reaches zero, stalls for a
//! patience window, or hits the iteration cap; the best hard decision seen
//! (fewest violated checks, earliest) is returned either way.

use crate::decoder::SparseChecks;
use crate::gf2::Gf2Vector;
use serde::{Deserialize, Serialize};

/// Min-sum parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BpConfig {
    /// Scale applied to check-to-variable magnitudes.
    pub normalization: f64,
    /// Magnitude bound on variable-to-check messages.
    pub clamp: f64,
    /// Stop after this many iterations without a new violated-count low.
    pub patience: usize,
    pub max_iters: usize,
}

impl Default for BpConfig {
    fn default() -> BpConfig {
        BpConfig {
            normalization: 0.9,
            clamp: 25.0,
            patience: 5,
            max_iters: 100,
        }
    }
}

/// Best state seen during one BP run.
#[derive(Clone, Debug)]
pub struct BpState {
    /// Per-qubit prior log-likelihood ratios.
    pub priors: Vec<f64>,
    /// Check-to-variable messages behind the returned decision, edge order
    /// matching the check matrix rows.
    pub messages: Vec<f64>,
    /// Per-qubit posterior log-likelihood ratios.
    pub posteriors: Vec<f64>,
    /// Hard-decision error estimate.
    pub error: Gf2Vector,
    /// Checks the estimate leaves unexplained.
    pub violated: usize,
    /// Iteration the returned state was produced in.
    pub iterations: usize,
    /// Whether `violated` reached zero.
    pub converged: bool,
}

/// Runs min-sum on `checks` for the given `syndrome`. `priors` are
/// per-qubit marginal error probabilities, each in (0, 1).
pub fn bp_pass(
    checks: &SparseChecks,
    syndrome: &Gf2Vector,
    priors: &[f64],
    cfg: &BpConfig,
) -> BpState {
    let n = checks.n;
    let m = checks.rows.len();
    assert_eq!(syndrome.len(), m, "syndrome length mismatch");
    assert_eq!(priors.len(), n, "prior length mismatch");
    let lambda: Vec<f64> = priors
        .iter()
        .map(|&p| {
            assert!(p > 0.0 && p < 1.0 && p.is_finite(), "prior {p} out of (0,1)");
            ((1.0 - p) / p).ln()
        })
        .collect();

    // Edge layout: edges grouped per check (matching row order), with a
    // per-variable index for the variable-side update.
    let mut edge_var: Vec<u32> = Vec::new();
    let mut check_start: Vec<usize> = Vec::with_capacity(m + 1);
    let mut var_edges: Vec<Vec<u32>> = vec![Vec::new(); n];
    for row in &checks.rows {
        check_start.push(edge_var.len());
        for &q in row {
            var_edges[q as usize].push(edge_var.len() as u32);
            edge_var.push(q);
        }
    }
    check_start.push(edge_var.len());
    let edges = edge_var.len();

    let clamp = |v: f64| v.clamp(-cfg.clamp, cfg.clamp);
    let mut to_check: Vec<f64> = edge_var
        .iter()
        .map(|&q| clamp(lambda[q as usize]))
        .collect();
    let mut to_var = vec![0.0f64; edges];
    let mut posteriors = lambda.clone();
    let mut hard = Gf2Vector::zeros(n);

    // The prior-only decision (iteration 0) is the all-zero error, which
    // explains exactly the zero syndrome.
    let mut best = BpState {
        priors: lambda.clone(),
        messages: to_var.clone(),
        posteriors: posteriors.clone(),
        error: hard.clone(),
        violated: syndrome.weight(),
        iterations: 0,
        converged: syndrome.is_zero(),
    };
    if best.converged {
        return best;
    }

    let mut stall = 0;
    for iteration in 1..=cfg.max_iters {
        // Check update: normalized min-sum with the syndrome bit folded
        // into the outgoing sign.
        for c in 0..m {
            let span = check_start[c]..check_start[c + 1];
            let mut sign = syndrome.get(c);
            let (mut min1, mut min2, mut argmin) = (f64::INFINITY, f64::INFINITY, span.start);
            for e in span.clone() {
                let v = to_check[e];
                sign ^= v < 0.0;
                let mag = v.abs();
                if mag < min1 {
                    min2 = min1;
                    min1 = mag;
                    argmin = e;
                } else if mag < min2 {
                    min2 = mag;
                }
            }
            for e in span {
                let mag = cfg.normalization * if e == argmin { min2 } else { min1 };
                let flip = sign ^ (to_check[e] < 0.0);
                to_var[e] = if flip { -mag } else { mag };
            }
        }
        // Variable update, posteriors, and the hard decision.
        for q in 0..n {
            let total: f64 = lambda[q] + var_edges[q].iter().map(|&e| to_var[e as usize]).sum::<f64>();
            posteriors[q] = total;
            hard.set(q, total < 0.0);
            for &e in &var_edges[q] {
                to_check[e as usize] = clamp(total - to_var[e as usize]);
            }
        }
        let violated = (0..m)
            .filter(|&c| {
                let parity = checks.rows[c]
                    .iter()
                    .fold(false, |acc, &q| acc ^ hard.get(q as usize));
                parity != syndrome.get(c)
            })
            .count();

        if violated < best.violated {
            best = BpState {
                priors: lambda.clone(),
                messages: to_var.clone(),
                posteriors: posteriors.clone(),
                error: hard.clone(),
                violated,
                iterations: iteration,
                converged: violated == 0,
            };
            stall = 0;
            if violated == 0 {
                break;
            }
        } else {
            stall += 1;
            if stall >= cfg.patience {
                break;
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{syndrome, toric, PauliOperator};

    #[test]
    fn zero_syndrome_stops_immediately_with_zero_correction() {
        let code = toric(3);
        let checks = SparseChecks::x_checks(&code);
        let s = Gf2Vector::zeros(code.num_x_stabs());
        let state = bp_pass(&checks, &s, &vec![1e-3; code.n()], &BpConfig::default());
        assert!(state.converged);
        assert_eq!(state.iterations, 0);
        assert_eq!(state.violated, 0);
        assert!(state.error.is_zero());
    }

    #[test]
    fn every_single_z_error_on_toric_is_recovered_exactly() {
        let code = toric(3);
        let checks = SparseChecks::x_checks(&code);
        let priors = vec![1e-3; code.n()];
        for q in 0..code.n() {
            let e = PauliOperator::single_z(code.n(), q);
            let (sx, _) = syndrome(&code, &e);
            // Independent minimum-weight cross-check: no other single-qubit
            // error explains this syndrome.
            let alternatives = (0..code.n())
                .filter(|&r| {
                    let f = PauliOperator::single_z(code.n(), r);
                    syndrome(&code, &f).0 == sx
                })
                .count();
            assert_eq!(alternatives, 1, "weight-1 solution must be unique");

            let state = bp_pass(&checks, &sx, &priors, &BpConfig::default());
            assert!(state.converged, "qubit {q}");
            assert_eq!(state.violated, 0);
            assert_eq!(state.error, e.z, "qubit {q}");
        }
    }

    #[test]
    fn messages_stay_bounded_under_extreme_priors() {
        let code = toric(3);
        let checks = SparseChecks::x_checks(&code);
        let e = PauliOperator::single_z(code.n(), 4);
        let (sx, _) = syndrome(&code, &e);
        let cfg = BpConfig::default();

        // Small prior: still decodes, with every message finite and within
        // the clamp despite the large likelihood ratios.
        let state = bp_pass(&checks, &sx, &vec![1e-6; code.n()], &cfg);
        assert!(state.messages.iter().all(|v| v.is_finite() && v.abs() <= cfg.clamp));
        assert!(state.posteriors.iter().all(|v| v.is_finite()));
        assert!(state.converged);
        assert_eq!(state.error, e.z);

        // Overwhelming prior: an error is rated less likely than any number
        // of unexplained checks, so the rational decision is to flip
        // nothing — the run must end gracefully with finite numbers.
        let state = bp_pass(&checks, &sx, &vec![1e-30; code.n()], &cfg);
        assert!(state.messages.iter().all(|v| v.is_finite() && v.abs() <= cfg.clamp));
        assert!(state.posteriors.iter().all(|v| v.is_finite()));
        assert!(!state.converged);
        assert!(state.error.is_zero());
        assert_eq!(state.violated, sx.weight());
    }

    #[test]
    fn a_symmetric_weight_two_split_defeats_bp_alone() {
        // Z errors on qubits 0 and 1 of the distance-4 torus form a chain
        // whose complement along the same length-4 cycle has equal weight
        // and the same syndrome. The two explanations are exactly
        // symmetric, min-sum splits its belief between them, and the hard
        // decision never explains both endpoint checks (found by exhaustive
        // search over weight-2 errors; distance 3 admits no such tie).
        let code = toric(4);
        let checks = SparseChecks::x_checks(&code);
        let mut e = PauliOperator::identity(code.n());
        e.z.flip(0);
        e.z.flip(1);
        let (sx, _) = syndrome(&code, &e);
        assert_eq!(sx.weight(), 2);
        let state = bp_pass(&checks, &sx, &vec![1e-3; code.n()], &BpConfig::default());
        assert!(!state.converged);
        assert!(state.violated > 0);
    }

    #[test]
    fn patience_caps_the_work_on_unsatisfiable_syndromes() {
        // A single violated check on the toric code has no explanation
        // (every error flips an even number of checks), so BP can never
        // converge; it must return the best effort quickly.
        let code = toric(3);
        let checks = SparseChecks::x_checks(&code);
        let mut s = Gf2Vector::zeros(code.num_x_stabs());
        s.flip(0);
        let cfg = BpConfig::default();
        let state = bp_pass(&checks, &s, &vec![1e-3; code.n()], &cfg);
        assert!(!state.converged);
        assert!(state.violated >= 1);
        assert!(state.iterations <= cfg.max_iters);
    }
}
