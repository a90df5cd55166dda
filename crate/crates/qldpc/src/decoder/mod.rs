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

//! Belief-propagation + small-set-flip decoding of syndrome histories.
//!
//! A CSS code's X and Z error components are decoded independently: X errors
//! against the Z-check outcomes and Z errors against the X-check outcomes.
//! Per noisy measurement round, one belief-propagation pass estimates the
//! round's new error and the hard decision accumulates into a running
//! correction (outcomes themselves are never modified — corrections are
//! tracked, not applied). After the trailing noise-free round, BP and
//! small-set-flip alternate until the syndrome is fully explained or a cycle
//! cap is hit. A trial succeeds when the net of actual error and accumulated
//! correction acts trivially on the code space.

mod bp;
mod ssf;

pub use bp::{bp_pass, BpConfig, BpState};
pub use ssf::{ssf_pass, SsfState};

use crate::codes::{classify, CssCode, ErrorClass, PauliOperator};
use crate::gf2::Gf2Vector;
use crate::noise::SyndromeRecord;
use serde::{Deserialize, Serialize};

/// Sparse parity checks over `n` qubits: one sorted support row per check.
#[derive(Clone, Debug)]
pub struct SparseChecks {
    /// Number of qubits (columns).
    pub n: usize,
    /// Per-check qubit supports.
    pub rows: Vec<Vec<u32>>,
}

impl SparseChecks {
    /// The X-stabilizer checks of `code` (these detect Z errors).
    pub fn x_checks(code: &CssCode) -> SparseChecks {
        SparseChecks {
            n: code.n(),
            rows: (0..code.num_x_stabs())
                .map(|r| code.x_support(r).to_vec())
                .collect(),
        }
    }

    /// The Z-stabilizer checks of `code` (these detect X errors).
    pub fn z_checks(code: &CssCode) -> SparseChecks {
        SparseChecks {
            n: code.n(),
            rows: (0..code.num_z_stabs())
                .map(|r| code.z_support(r).to_vec())
                .collect(),
        }
    }

    /// Syndrome of an error vector: one parity bit per check.
    pub fn syndrome_of(&self, e: &Gf2Vector) -> Gf2Vector {
        assert_eq!(e.len(), self.n, "error length mismatch");
        let mut s = Gf2Vector::zeros(self.rows.len());
        for (r, row) in self.rows.iter().enumerate() {
            let parity = row.iter().fold(false, |acc, &q| acc ^ e.get(q as usize));
            s.set(r, parity);
        }
        s
    }
}

/// Everything needed to decode one error basis of a CSS code: the checks
/// that see the errors, the same-basis stabilizer generators whose support
/// subsets are the small-set-flip candidates, and precomputed adjacency.
#[derive(Clone, Debug)]
pub struct DecoderSide {
    /// Checks sensitive to this side's errors.
    pub checks: SparseChecks,
    /// Same-basis generator supports (flipping a whole one is a stabilizer).
    pub flip_gens: Vec<Vec<u32>>,
    /// Per qubit, the mask of checks containing it (length = check count).
    pub qubit_checks: Vec<Gf2Vector>,
    /// Per flip generator, the sorted checks adjacent to its support.
    pub gen_checks: Vec<Vec<u32>>,
}

impl DecoderSide {
    fn assemble(checks: SparseChecks, flip_gens: Vec<Vec<u32>>) -> DecoderSide {
        let m = checks.rows.len();
        let mut qubit_checks = vec![Gf2Vector::zeros(m); checks.n];
        for (r, row) in checks.rows.iter().enumerate() {
            for &q in row {
                qubit_checks[q as usize].flip(r);
            }
        }
        let gen_checks = flip_gens
            .iter()
            .map(|support| {
                let mut adj: Vec<u32> = support
                    .iter()
                    .flat_map(|&q| qubit_checks[q as usize].iter_ones().map(|c| c as u32))
                    .collect();
                adj.sort_unstable();
                adj.dedup();
                adj
            })
            .collect();
        DecoderSide {
            checks,
            flip_gens,
            qubit_checks,
            gen_checks,
        }
    }

    /// Decoder for the X-error component (Z checks see it; X generators
    /// supply the candidate flips).
    pub fn for_x_errors(code: &CssCode) -> DecoderSide {
        let flip_gens = (0..code.num_x_stabs())
            .map(|r| code.x_support(r).to_vec())
            .collect();
        DecoderSide::assemble(SparseChecks::z_checks(code), flip_gens)
    }

    /// Decoder for the Z-error component (X checks see it; Z generators
    /// supply the candidate flips).
    pub fn for_z_errors(code: &CssCode) -> DecoderSide {
        let flip_gens = (0..code.num_z_stabs())
            .map(|r| code.z_support(r).to_vec())
            .collect();
        DecoderSide::assemble(SparseChecks::x_checks(code), flip_gens)
    }
}

/// What each noisy round's BP pass consumes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoundInput {
    /// XOR of consecutive rounds' outcomes: each pass sees (an estimate of)
    /// the syndrome of that round's new error, and a measurement flip
    /// perturbs exactly two consecutive inputs.
    Differences,
    /// Raw outcomes XORed with the syndrome of the corrections accumulated
    /// so far: each pass sees the full residual relative to its tracking.
    Raw,
}

/// Knobs for history decoding. All fields are serialized into result-file
/// headers so runs are reproducible from their outputs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecoderConfig {
    pub bp: BpConfig,
    pub round_input: RoundInput,
    /// Maximum BP+SSF cycles after the final round before giving up.
    pub alternation_cap: usize,
    /// The per-qubit prior is 1 - (1-p)^prior_depth: the chance any of that
    /// many operations touching a qubit faulted. Use the measurement
    /// circuit's depth via [`DecoderConfig::for_circuit`].
    pub prior_depth: usize,
}

impl Default for DecoderConfig {
    fn default() -> DecoderConfig {
        DecoderConfig {
            bp: BpConfig::default(),
            round_input: RoundInput::Differences,
            alternation_cap: 50,
            prior_depth: 1,
        }
    }
}

impl DecoderConfig {
    /// Defaults with the prior depth taken from the circuit producing the
    /// outcomes.
    pub fn for_circuit(circuit: &crate::circuits::Circuit) -> DecoderConfig {
        DecoderConfig {
            prior_depth: circuit.depth(),
            ..DecoderConfig::default()
        }
    }

    /// Per-qubit marginal error probability fed to BP, clamped inside (0, 1)
    /// so log-likelihood ratios stay finite.
    pub fn prior(&self, p: f64) -> f64 {
        (1.0 - (1.0 - p).powi(self.prior_depth as i32)).clamp(1e-12, 0.49)
    }
}

/// How the net of noise and correction acts on the encoded state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    /// Net operator is the identity or another stabilizer.
    Success,
    /// Net operator acts non-trivially on the code space.
    LogicalFailure,
    /// The decoder gave up before explaining the final syndrome.
    NoConvergence,
}

/// Result of decoding one trial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeOutcome {
    /// Accumulated correction (X and Z components).
    pub correction: PauliOperator,
    /// Whether both sides fully explained the final-round syndrome.
    pub converged: bool,
    pub classification: Classification,
}

/// Runs the BP+SSF alternation on a single syndrome until it is explained,
/// nothing changes, or the cycle cap is hit. Returns the correction and
/// whether the syndrome was fully explained.
pub fn decode_syndrome(
    side: &DecoderSide,
    syndrome: &Gf2Vector,
    priors: &[f64],
    cfg: &DecoderConfig,
) -> (Gf2Vector, bool) {
    let mut correction = Gf2Vector::zeros(side.checks.n);
    let mut u = syndrome.clone();
    let mut converged = u.is_zero();
    for _ in 0..cfg.alternation_cap {
        if converged {
            break;
        }
        let bp = bp_pass(&side.checks, &u, priors, &cfg.bp);
        for q in bp.error.iter_ones() {
            correction.flip(q);
            u.xor_assign(&side.qubit_checks[q]);
        }
        if u.is_zero() {
            converged = true;
            break;
        }
        let ssf = ssf_pass(side, &u);
        for q in ssf.flips.iter_ones() {
            correction.flip(q);
        }
        u = ssf.residual_syndrome;
        converged = ssf.converged;
        if !converged && bp.error.is_zero() && ssf.flips.is_zero() {
            // Fixed point: both passes are deterministic, so further cycles
            // would repeat verbatim.
            break;
        }
    }
    (correction, converged)
}

/// Decodes one side's outcome history: a BP pass per noisy round with the
/// hard decision accumulated, then the BP+SSF alternation against the final
/// noise-free round.
fn decode_side(
    side: &DecoderSide,
    rounds: &[Gf2Vector],
    final_round: &Gf2Vector,
    priors: &[f64],
    cfg: &DecoderConfig,
) -> (Gf2Vector, bool) {
    let m = side.checks.rows.len();
    let mut correction = Gf2Vector::zeros(side.checks.n);
    let mut prev = Gf2Vector::zeros(m);
    for outcomes in rounds {
        let mut u = outcomes.clone();
        match cfg.round_input {
            RoundInput::Differences => u.xor_assign(&prev),
            RoundInput::Raw => u.xor_assign(&side.checks.syndrome_of(&correction)),
        }
        let bp = bp_pass(&side.checks, &u, priors, &cfg.bp);
        correction.xor_assign(&bp.error);
        prev = outcomes.clone();
    }
    let mut u = final_round.clone();
    u.xor_assign(&side.checks.syndrome_of(&correction));
    let (tail, converged) = decode_syndrome(side, &u, priors, cfg);
    correction.xor_assign(&tail);
    (correction, converged)
}

/// Decodes a full measurement record at physical fault rate `p` and
/// classifies the trial.
///
/// Convergence requires both the X- and Z-side corrections to exactly
/// reproduce the final noise-free round; otherwise the outcome is
/// [`Classification::NoConvergence`]. A converged trial succeeds when the
/// actual residual error and the correction differ by a stabilizer.
pub fn decode_history(
    code: &CssCode,
    record: &SyndromeRecord,
    p: f64,
    cfg: &DecoderConfig,
) -> DecodeOutcome {
    let prior = cfg.prior(p);
    let priors = vec![prior; code.n()];
    let x_side = DecoderSide::for_x_errors(code);
    let z_side = DecoderSide::for_z_errors(code);
    let (cx, x_ok) = decode_side(&x_side, &record.z_rounds, &record.z_final, &priors, cfg);
    let (cz, z_ok) = decode_side(&z_side, &record.x_rounds, &record.x_final, &priors, cfg);
    let correction = PauliOperator { x: cx, z: cz };
    if !(x_ok && z_ok) {
        return DecodeOutcome {
            correction,
            converged: false,
            classification: Classification::NoConvergence,
        };
    }
    assert_eq!(
        x_side.checks.syndrome_of(&correction.x),
        record.z_final,
        "converged X-side correction must reproduce the final round"
    );
    assert_eq!(
        z_side.checks.syndrome_of(&correction.z),
        record.x_final,
        "converged Z-side correction must reproduce the final round"
    );
    let mut net = record.residual().clone();
    net.xor_assign(&correction);
    let classification = match classify(code, &net) {
        ErrorClass::Stabilizer => Classification::Success,
        ErrorClass::Logical => Classification::LogicalFailure,
        ErrorClass::Detectable => {
            unreachable!("zero-syndrome net operator cannot be detectable")
        }
    };
    DecodeOutcome {
        correction,
        converged: true,
        classification,
    }
}
