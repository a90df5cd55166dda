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

//! Small-set-flip decoding.
//!
//! Candidate flips are the nonempty subsets of single stabilizer-generator
//! supports of the error's own basis (flipping a full generator is a
//! stabilizer, so useful corrections live inside them). The flip maximizing
//! syndrome-weight decrease per flipped qubit is applied while any flip
//! strictly decreases the syndrome weight; convergence means the residual
//! syndrome is empty.

use crate::decoder::DecoderSide;
use crate::gf2::Gf2Vector;

/// Result of one SSF run.
#[derive(Clone, Debug)]
pub struct SsfState {
    /// Accumulated flips.
    pub flips: Gf2Vector,
    /// Syndrome left after the flips.
    pub residual_syndrome: Gf2Vector,
    /// Whether the residual syndrome is zero.
    pub converged: bool,
    /// Number of flips applied.
    pub steps: usize,
}

struct Candidate {
    delta: u64,
    size: u64,
    qubits: Vec<u32>,
    generator: usize,
}

impl Candidate {
    /// True when `self` scores ahead of `other`: larger decrease per
    /// flipped qubit, ties to the smaller flip, then the lexicographically
    /// smaller qubit set, then the lower generator index.
    fn beats(&self, other: &Candidate) -> bool {
        let (a, b) = (self.delta * other.size, other.delta * self.size);
        (a, other.size, &other.qubits, other.generator)
            > (b, self.size, &self.qubits, self.generator)
    }
}

/// Runs small-set-flip on one side until no candidate strictly decreases
/// the syndrome weight.
pub fn ssf_pass(side: &DecoderSide, syndrome: &Gf2Vector) -> SsfState {
    let mut u = syndrome.clone();
    let mut flips = Gf2Vector::zeros(side.checks.n);
    let mut steps = 0;
    loop {
        let base = u.weight();
        if base == 0 {
            break;
        }
        let mut best: Option<Candidate> = None;
        for (gi, support) in side.flip_gens.iter().enumerate() {
            // A flip inside this generator can only clear checks adjacent
            // to its support.
            if !side.gen_checks[gi].iter().any(|&c| u.get(c as usize)) {
                continue;
            }
            let w = support.len();
            assert!(w < 24, "generator weight too large for subset search");
            // Gray-code walk over subsets: one column XOR per subset.
            let mut acc = u.clone();
            let mut mask = 0u32;
            for i in 1u32..(1 << w) {
                let gray = i ^ (i >> 1);
                let toggled = (gray ^ mask).trailing_zeros() as usize;
                mask = gray;
                acc.xor_assign(&side.qubit_checks[support[toggled] as usize]);
                let weight = acc.weight();
                if weight >= base {
                    continue;
                }
                let candidate = Candidate {
                    delta: (base - weight) as u64,
                    size: u64::from(mask.count_ones()),
                    qubits: (0..w)
                        .filter(|&b| mask >> b & 1 == 1)
                        .map(|b| support[b])
                        .collect(),
                    generator: gi,
                };
                if best.as_ref().map_or(true, |b| candidate.beats(b)) {
                    best = Some(candidate);
                }
            }
        }
        let Some(chosen) = best else { break };
        for &q in &chosen.qubits {
            flips.flip(q as usize);
            u.xor_assign(&side.qubit_checks[q as usize]);
        }
        assert!(
            u.weight() < base,
            "flip must strictly decrease the syndrome weight"
        );
        steps += 1;
    }
    SsfState {
        converged: u.is_zero(),
        flips,
        residual_syndrome: u,
        steps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{classify, syndrome, toric, CssCode, ErrorClass, PauliOperator};
    use crate::decoder::DecoderSide;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_syndrome_needs_no_flips() {
        let code = toric(3);
        let side = DecoderSide::for_x_errors(&code);
        let state = ssf_pass(&side, &Gf2Vector::zeros(code.num_z_stabs()));
        assert!(state.converged);
        assert!(state.flips.is_zero());
        assert_eq!(state.steps, 0);
    }

    #[test]
    fn single_qubit_errors_converge_to_an_equivalent_correction() {
        let code = toric(3);
        let side = DecoderSide::for_x_errors(&code);
        for q in 0..code.n() {
            let e = PauliOperator::single_x(code.n(), q);
            let (_, sz) = syndrome(&code, &e);
            let state = ssf_pass(&side, &sz);
            assert!(state.converged, "qubit {q}");
            let mut net = e.clone();
            net.x.xor_assign(&state.flips);
            let net = PauliOperator {
                x: net.x,
                z: Gf2Vector::zeros(code.n()),
            };
            assert!(
                net.is_identity() || classify(&code, &net) == ErrorClass::Stabilizer,
                "qubit {q}: correction must match up to a stabilizer"
            );
        }
    }

    /// Z-checks shared by a pair of qubits.
    fn shared_checks(code: &CssCode, a: usize, b: usize) -> Vec<u32> {
        code.z_checks_of(a)
            .iter()
            .filter(|c| code.z_checks_of(b).contains(c))
            .copied()
            .collect()
    }

    #[test]
    fn a_chain_pair_inside_one_generator_is_cleared_by_the_exact_flip() {
        // Two errors sharing exactly one check, both inside one X
        // generator's support: every single flip trades a violated check
        // for a clean one, but the exact pair is a candidate with ratio 1
        // and clears the syndrome.
        let code = toric(4);
        let support = code.x_support(0);
        let (a, b) = (support[0] as usize, support[2] as usize);
        assert_eq!(shared_checks(&code, a, b).len(), 1, "fixture precondition");
        let e = PauliOperator {
            x: Gf2Vector::from_indices(code.n(), [a, b]),
            z: Gf2Vector::zeros(code.n()),
        };
        let (_, sz) = syndrome(&code, &e);
        assert_eq!(sz.weight(), 2);
        let side = DecoderSide::for_x_errors(&code);
        let state = ssf_pass(&side, &sz);
        assert!(state.converged);
    }

    #[test]
    fn a_chain_pair_spanning_no_generator_is_a_stopping_failure() {
        // Qubits 0 and 5 on the distance-5 torus share one check, so their
        // syndrome is the two outer checks of a length-2 chain — too far
        // apart for any single generator's neighborhood to cover both.
        // Every candidate flip clears at most one of them while lighting at
        // least one new check, so no flip strictly decreases the syndrome
        // weight and SSF stops immediately with the syndrome intact.
        let code = toric(5);
        let (a, b) = (0, 5);
        assert_eq!(shared_checks(&code, a, b).len(), 1, "fixture precondition");
        let e = PauliOperator {
            x: Gf2Vector::from_indices(code.n(), [a, b]),
            z: Gf2Vector::zeros(code.n()),
        };
        let (_, sz) = syndrome(&code, &e);
        assert_eq!(sz.weight(), 2);
        let side = DecoderSide::for_x_errors(&code);
        let state = ssf_pass(&side, &sz);
        assert!(!state.converged);
        assert_eq!(state.steps, 0);
        assert!(state.flips.is_zero());
        assert_eq!(state.residual_syndrome, sz);
    }

    #[test]
    fn random_errors_keep_the_monotonicity_assertion_quiet() {
        // ssf_pass asserts strict syndrome-weight decrease internally on
        // every applied flip; drive it across random errors on both sides.
        let code = toric(4);
        let x_side = DecoderSide::for_x_errors(&code);
        let z_side = DecoderSide::for_z_errors(&code);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..300 {
            let mut e = PauliOperator::identity(code.n());
            for q in 0..code.n() {
                if rng.gen_bool(0.06) {
                    e.x.flip(q);
                }
                if rng.gen_bool(0.06) {
                    e.z.flip(q);
                }
            }
            let (sx, sz) = syndrome(&code, &e);
            let a = ssf_pass(&x_side, &sz);
            let b = ssf_pass(&z_side, &sx);
            // Converged or not, the reported residual matches the flips.
            let mut check = sz.clone();
            for q in a.flips.iter_ones() {
                check.xor_assign(&x_side.qubit_checks[q]);
            }
            assert_eq!(check, a.residual_syndrome);
            let mut check = sx.clone();
            for q in b.flips.iter_ones() {
                check.xor_assign(&z_side.qubit_checks[q]);
            }
            assert_eq!(check, b.residual_syndrome);
        }
    }
}
