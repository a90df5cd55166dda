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

//! Circuit-level stochastic Pauli noise and Pauli-frame simulation.
//!
//! Every elementary operation — identity gates included — is faulty with
//! probability `p`. A faulty one-qubit operation is followed by a uniform
//! nontrivial Pauli; a faulty CNOT by one of the 15 nontrivial two-qubit
//! Paulis, uniformly; a faulty measurement reports a flipped outcome.
//! Phases are never tracked: a Pauli frame over the full qubit roster is
//! enough to reproduce CSS syndrome statistics exactly.
//!
//! [`simulate`] runs `rounds` noisy executions of a syndrome-extraction
//! circuit with the frame persisting on the data qubits between rounds
//! (ancillas are freshly prepared by the circuit itself), then appends one
//! noiseless round whose outcomes equal the syndrome of the residual error.

use crate::circuits::{Circuit, Op, QubitKind, Roster};
use crate::codes::{syndrome, CssCode, PauliOperator};
use crate::gf2::Gf2Vector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Per-operation fault probability.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub p: f64,
}

impl NoiseModel {
    /// Panics unless `0 <= p <= 1`.
    pub fn new(p: f64) -> NoiseModel {
        assert!((0.0..=1.0).contains(&p), "fault probability {p} out of range");
        NoiseModel { p }
    }
}

/// Pauli frame over the full roster: bit `q` of `x`/`z` records an X/Z on
/// qubit `q`, commuted forward to the current point of the circuit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliFrame {
    pub x: Gf2Vector,
    pub z: Gf2Vector,
}

impl PauliFrame {
    pub fn new(total: usize) -> PauliFrame {
        PauliFrame {
            x: Gf2Vector::zeros(total),
            z: Gf2Vector::zeros(total),
        }
    }

    /// Pushes the frame through one ideal operation. For a measurement,
    /// returns whether the outcome is flipped relative to the noiseless
    /// value; a preparation discards any prior frame on its qubit.
    pub fn apply(&mut self, op: &Op) -> Option<bool> {
        match *op {
            Op::PreparePlus { qubit } | Op::PrepareZero { qubit } => {
                self.x.set(qubit as usize, false);
                self.z.set(qubit as usize, false);
                None
            }
            Op::Cnot { control, target } => {
                // X components copy control -> target, Z components
                // target -> control; supports elsewhere are untouched.
                if self.x.get(control as usize) {
                    self.x.flip(target as usize);
                }
                if self.z.get(target as usize) {
                    self.z.flip(control as usize);
                }
                None
            }
            Op::MeasureX { qubit } => Some(self.z.get(qubit as usize)),
            Op::MeasureZ { qubit } => Some(self.x.get(qubit as usize)),
            Op::Idle { .. } => None,
        }
    }

    /// XORs a Pauli into the frame.
    pub fn flip(&mut self, qubit: u32, x: bool, z: bool) {
        if x {
            self.x.flip(qubit as usize);
        }
        if z {
            self.z.flip(qubit as usize);
        }
    }

    /// The frame restricted to the first `n` (data) qubits.
    pub fn data_residual(&self, n: usize) -> PauliOperator {
        let mut e = PauliOperator::identity(n);
        for q in 0..n {
            e.x.set(q, self.x.get(q));
            e.z.set(q, self.z.get(q));
        }
        e
    }
}

/// A Pauli on one qubit, as an (X, Z) pair of flips.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PauliFault {
    pub qubit: u32,
    pub x: bool,
    pub z: bool,
}

/// What a faulty operation does, sampled by [`sample_fault`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaultEvent {
    /// Pauli after the ideal operation; two entries for a CNOT, where at
    /// least one is nontrivial.
    Pauli(PauliFault, Option<PauliFault>),
    /// The measurement reports the wrong outcome; the frame is untouched.
    OutcomeFlip,
}

fn pauli_bits(index: u8) -> (bool, bool) {
    // 0 = I, 1 = X, 2 = Z, 3 = Y.
    (index & 1 == 1, index >= 2)
}

/// With probability `p`, samples the fault following `op`: a uniform
/// nontrivial Pauli on the support of a unitary, idle, or preparation, or
/// an outcome flip for a measurement.
pub fn sample_fault(op: &Op, p: f64, rng: &mut impl Rng) -> Option<FaultEvent> {
    if !rng.gen_bool(p) {
        return None;
    }
    Some(match *op {
        Op::MeasureX { .. } | Op::MeasureZ { .. } => FaultEvent::OutcomeFlip,
        Op::Cnot { control, target } => {
            // 4*a + b over Pauli indices (a, b) != (0, 0), uniform.
            let r = rng.gen_range(1u8..16);
            let (cx, cz) = pauli_bits(r >> 2);
            let (tx, tz) = pauli_bits(r & 3);
            FaultEvent::Pauli(
                PauliFault {
                    qubit: control,
                    x: cx,
                    z: cz,
                },
                Some(PauliFault {
                    qubit: target,
                    x: tx,
                    z: tz,
                }),
            )
        }
        Op::PreparePlus { qubit }
        | Op::PrepareZero { qubit }
        | Op::Idle { qubit } => {
            let (x, z) = pauli_bits(rng.gen_range(1u8..4));
            FaultEvent::Pauli(PauliFault { qubit, x, z }, None)
        }
    })
}

/// Measurement history of one simulated trial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyndromeRecord {
    /// Number of noisy rounds.
    pub rounds: usize,
    /// Per noisy round, one outcome bit per X ancilla.
    pub x_rounds: Vec<Gf2Vector>,
    /// Per noisy round, one outcome bit per Z ancilla.
    pub z_rounds: Vec<Gf2Vector>,
    /// Outcomes of the trailing noiseless round.
    pub x_final: Gf2Vector,
    /// Outcomes of the trailing noiseless round.
    pub z_final: Gf2Vector,
    residual: PauliOperator,
}

impl SyndromeRecord {
    /// The accumulated data error actually present at the end of the trial.
    ///
    /// This is ground truth for scoring a decoder; decoding itself must use
    /// only the outcome histories.
    pub fn residual(&self) -> &PauliOperator {
        &self.residual
    }

    /// Builds a record directly from outcome vectors, for decoder tests that
    /// need histories no sampled noise process produces deterministically.
    /// `residual` must be consistent with the final round by construction.
    #[cfg(test)]
    pub(crate) fn synthetic(
        x_rounds: Vec<Gf2Vector>,
        z_rounds: Vec<Gf2Vector>,
        x_final: Gf2Vector,
        z_final: Gf2Vector,
        residual: PauliOperator,
    ) -> SyndromeRecord {
        assert_eq!(x_rounds.len(), z_rounds.len(), "round count mismatch");
        SyndromeRecord {
            rounds: x_rounds.len(),
            x_rounds,
            z_rounds,
            x_final,
            z_final,
            residual,
        }
    }
}

/// One noisy (or noiseless, when `noise` is `None`) execution of the
/// circuit. Outcomes are indexed by ancilla, faults sampled in step order.
fn run_round(
    circuit: &Circuit,
    frame: &mut PauliFrame,
    mut noise: Option<(f64, &mut ChaCha8Rng)>,
) -> (Gf2Vector, Gf2Vector) {
    let roster = &circuit.roster;
    let mut x_out = Gf2Vector::zeros(roster.x_ancillas as usize);
    let mut z_out = Gf2Vector::zeros(roster.z_ancillas as usize);
    for step in &circuit.steps {
        for op in step {
            let flip = frame.apply(op);
            let fault = match noise {
                Some((p, ref mut rng)) => sample_fault(op, p, rng),
                None => None,
            };
            let flip = match fault {
                Some(FaultEvent::Pauli(a, b)) => {
                    frame.flip(a.qubit, a.x, a.z);
                    if let Some(b) = b {
                        frame.flip(b.qubit, b.x, b.z);
                    }
                    flip
                }
                Some(FaultEvent::OutcomeFlip) => flip.map(|f| !f),
                None => flip,
            };
            if let Some(flip) = flip {
                match roster.kind_of(op.support().0) {
                    QubitKind::XAncilla(i) => x_out.set(i as usize, flip),
                    QubitKind::ZAncilla(i) => z_out.set(i as usize, flip),
                    QubitKind::Data(_) => unreachable!("validated circuits measure ancillas"),
                }
            }
        }
    }
    (x_out, z_out)
}

fn check_roster(roster: &Roster, code: &CssCode) {
    assert_eq!(roster.data as usize, code.n(), "circuit built for another code");
    assert!(
        (roster.x_ancillas == 0 || roster.x_ancillas as usize == code.num_x_stabs())
            && (roster.z_ancillas == 0 || roster.z_ancillas as usize == code.num_z_stabs()),
        "ancilla counts do not match the stabilizer counts"
    );
}

/// Simulates `rounds` noisy syndrome-extraction rounds starting from the
/// data error `initial`, then one noiseless round. The RNG is the stream
/// `trial` of a generator seeded with `master_seed`, so trials of one
/// experiment are reproducible independently and in any order.
pub fn simulate_from(
    circuit: &Circuit,
    code: &CssCode,
    noise: &NoiseModel,
    rounds: usize,
    initial: &PauliOperator,
    master_seed: u64,
    trial: u64,
) -> SyndromeRecord {
    check_roster(&circuit.roster, code);
    assert_eq!(initial.n(), code.n(), "initial error length mismatch");
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);

    let mut frame = PauliFrame::new(circuit.roster.total());
    for q in 0..code.n() {
        frame.x.set(q, initial.x.get(q));
        frame.z.set(q, initial.z.get(q));
    }

    let mut x_rounds = Vec::with_capacity(rounds);
    let mut z_rounds = Vec::with_capacity(rounds);
    for _ in 0..rounds {
        let (x, z) = run_round(circuit, &mut frame, Some((noise.p, &mut rng)));
        x_rounds.push(x);
        z_rounds.push(z);
    }
    let (x_final, z_final) = run_round(circuit, &mut frame, None);
    let residual = frame.data_residual(code.n());

    // A noiseless round reads the syndrome of the residual error exactly.
    let (sx, sz) = syndrome(code, &residual);
    if circuit.roster.x_ancillas > 0 {
        assert_eq!(x_final, sx, "noiseless round out of sync with the frame");
    }
    if circuit.roster.z_ancillas > 0 {
        assert_eq!(z_final, sz, "noiseless round out of sync with the frame");
    }

    SyndromeRecord {
        rounds,
        x_rounds,
        z_rounds,
        x_final,
        z_final,
        residual,
    }
}

/// [`simulate_from`] with no pre-existing data error.
pub fn simulate(
    circuit: &Circuit,
    code: &CssCode,
    noise: &NoiseModel,
    rounds: usize,
    master_seed: u64,
    trial: u64,
) -> SyndromeRecord {
    simulate_from(
        circuit,
        code,
        noise,
        rounds,
        &PauliOperator::identity(code.n()),
        master_seed,
        trial,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{coloration_circuit, Basis};
    use crate::codes::toric;
    use crate::gf2::Gf2Matrix;

    #[test]
    fn zero_probability_never_faults() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let op = Op::Idle { qubit: 0 };
        for _ in 0..10_000 {
            assert_eq!(sample_fault(&op, 0.0, &mut rng), None);
        }
    }

    #[test]
    fn certain_single_qubit_faults_are_uniform_over_xyz() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let op = Op::PrepareZero { qubit: 5 };
        let mut counts = [0u32; 4];
        let samples = 100_000;
        for _ in 0..samples {
            match sample_fault(&op, 1.0, &mut rng) {
                Some(FaultEvent::Pauli(f, None)) => {
                    assert_eq!(f.qubit, 5);
                    counts[f.x as usize + 2 * (f.z as usize)] += 1;
                }
                other => panic!("unexpected fault {other:?}"),
            }
        }
        assert_eq!(counts[0], 0, "identity must never be sampled");
        for &c in &counts[1..] {
            let freq = c as f64 / samples as f64;
            assert!((freq - 1.0 / 3.0).abs() < 0.02, "frequency {freq}");
        }
    }

    #[test]
    fn certain_cnot_faults_pass_a_chi_squared_uniformity_test() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let op = Op::Cnot {
            control: 1,
            target: 2,
        };
        let mut counts = [0u64; 16];
        let samples = 100_000u64;
        for _ in 0..samples {
            match sample_fault(&op, 1.0, &mut rng) {
                Some(FaultEvent::Pauli(a, Some(b))) => {
                    assert_eq!((a.qubit, b.qubit), (1, 2));
                    let ai = a.x as usize + 2 * (a.z as usize);
                    let bi = b.x as usize + 2 * (b.z as usize);
                    counts[4 * ai + bi] += 1;
                }
                other => panic!("unexpected fault {other:?}"),
            }
        }
        assert_eq!(counts[0], 0, "identity x identity must never be sampled");
        // Chi-squared against uniform over the 15 cells; the 0.001 critical
        // value for 14 degrees of freedom is 36.12.
        let expected = samples as f64 / 15.0;
        let stat: f64 = counts[1..]
            .iter()
            .map(|&o| (o as f64 - expected).powi(2) / expected)
            .sum();
        assert!(stat < 36.12, "chi-squared statistic {stat}");
    }

    #[test]
    fn empirical_fault_rate_matches_p() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let op = Op::Idle { qubit: 0 };
        let p = 0.01;
        let samples = 1_000_000u64;
        let faults = (0..samples)
            .filter(|_| sample_fault(&op, p, &mut rng).is_some())
            .count() as f64;
        let rate = faults / samples as f64;
        let three_sigma = 3.0 * (p * (1.0 - p) / samples as f64).sqrt();
        assert!((rate - p).abs() < three_sigma, "rate {rate}");
    }

    #[test]
    fn frame_follows_the_textbook_cnot_rules() {
        let cnot = Op::Cnot {
            control: 0,
            target: 1,
        };
        // X on the control copies to the target.
        let mut f = PauliFrame::new(2);
        f.flip(0, true, false);
        f.apply(&cnot);
        assert!(f.x.get(0) && f.x.get(1) && f.z.is_zero());
        // Z on the control is unchanged.
        let mut f = PauliFrame::new(2);
        f.flip(0, false, true);
        f.apply(&cnot);
        assert!(f.z.get(0) && !f.z.get(1) && f.x.is_zero());
        // Y on the control becomes Y x X (phases untracked).
        let mut f = PauliFrame::new(2);
        f.flip(0, true, true);
        f.apply(&cnot);
        assert!(f.x.get(0) && f.z.get(0) && f.x.get(1) && !f.z.get(1));
        // Z on the target copies to the control.
        let mut f = PauliFrame::new(2);
        f.flip(1, false, true);
        f.apply(&cnot);
        assert!(f.z.get(0) && f.z.get(1) && f.x.is_zero());
    }

    #[test]
    fn frame_agrees_with_dense_symplectic_simulation() {
        // The incremental frame update must match applying each CNOT's full
        // 2n x 2n symplectic matrix to the (x|z) vector.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10_000 {
            let n = rng.gen_range(2usize..=20);
            let gates: Vec<(u32, u32)> = (0..rng.gen_range(1usize..=30))
                .map(|_| {
                    let c = rng.gen_range(0..n as u32);
                    let mut t = rng.gen_range(0..n as u32 - 1);
                    if t >= c {
                        t += 1;
                    }
                    (c, t)
                })
                .collect();

            let mut frame = PauliFrame::new(n);
            let mut dense = Gf2Vector::zeros(2 * n);
            for q in 0..n {
                let (x, z) = (rng.gen::<bool>(), rng.gen::<bool>());
                frame.flip(q as u32, x, z);
                dense.set(q, x);
                dense.set(n + q, z);
            }

            for &(c, t) in &gates {
                frame.apply(&Op::Cnot { control: c, target: t });
                let mut m = Gf2Matrix::identity(2 * n);
                m.set(t as usize, c as usize, true);
                m.set(n + c as usize, n + t as usize, true);
                dense = m.mul_vector(&dense);
            }
            for q in 0..n {
                assert_eq!(frame.x.get(q), dense.get(q));
                assert_eq!(frame.z.get(q), dense.get(n + q));
            }
        }
    }

    #[test]
    fn noiseless_simulation_reads_all_zero() {
        let code = toric(3);
        let c = coloration_circuit(&code, Basis::Both);
        let record = simulate(&c, &code, &NoiseModel::new(0.0), 4, 11, 0);
        assert!(record.x_rounds.iter().all(Gf2Vector::is_zero));
        assert!(record.z_rounds.iter().all(Gf2Vector::is_zero));
        assert!(record.x_final.is_zero() && record.z_final.is_zero());
        assert!(record.residual().is_identity());
    }

    #[test]
    fn injected_data_error_reports_its_syndrome_every_round() {
        let code = toric(3);
        let c = coloration_circuit(&code, Basis::Both);
        let e = PauliOperator::single_x(code.n(), 7);
        let (sx, sz) = syndrome(&code, &e);
        assert!(sx.is_zero() && !sz.is_zero());
        let record = simulate_from(&c, &code, &NoiseModel::new(0.0), 3, &e, 11, 0);
        for r in 0..3 {
            assert!(record.x_rounds[r].is_zero());
            assert_eq!(record.z_rounds[r], sz, "round {r}");
        }
        assert_eq!(record.z_final, sz);
        assert_eq!(record.residual(), &e);
    }

    #[test]
    fn fixed_seed_reproduces_the_record_exactly() {
        let code = toric(3);
        let c = coloration_circuit(&code, Basis::Both);
        let nm = NoiseModel::new(0.05);
        let a = simulate(&c, &code, &nm, 5, 42, 3);
        let b = simulate(&c, &code, &nm, 5, 42, 3);
        assert_eq!(a, b);
        let other_trial = simulate(&c, &code, &nm, 5, 42, 4);
        assert_ne!(a, other_trial);
    }

    #[test]
    fn final_round_remains_consistent_under_heavy_noise() {
        // simulate() itself asserts that the noiseless round equals the
        // syndrome of the residual; drive it at several noise strengths.
        let code = toric(2);
        let c = coloration_circuit(&code, Basis::Both);
        for (i, p) in [0.01, 0.2, 1.0].into_iter().enumerate() {
            for trial in 0..20 {
                let record = simulate(&c, &code, &NoiseModel::new(p), 3, i as u64, trial);
                let (sx, sz) = syndrome(&code, record.residual());
                assert_eq!(record.x_final, sx);
                assert_eq!(record.z_final, sz);
            }
        }
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn noise_model_rejects_bad_probability() {
        NoiseModel::new(1.5);
    }
}
