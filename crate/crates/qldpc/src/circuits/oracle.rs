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

//! Checks that a circuit actually measures the stabilizers of a code.
//!
//! Everything here is Clifford: Pauli operators are pushed through the
//! circuit as an X/Z frame over the roster, and measurement outcomes flip
//! when the frame anticommutes with the measured observable. Three families
//! of checks together pin down the circuit:
//!
//! 1. every stabilizer generator, fed in as a data error, is invisible —
//!    all outcomes zero, residual inside the stabilizer group;
//! 2. post-preparation ancilla faults behave correctly — a fault that fixes
//!    the fresh ancilla state (X on a |+⟩ ancilla, Z on a |0⟩ ancilla) must
//!    leave every outcome zero, while the anticommuting fault must flip that
//!    ancilla's own outcome and nothing else;
//! 3. random data errors reproduce their syndrome exactly and pass through
//!    unchanged.
//!
//! Check 2 is the one that is sensitive to CNOT order: syndrome
//! accumulation (checks 1 and 3) is a XOR of contributions and cannot see a
//! reordering, but a fault spreading from an ancilla is picked up by another
//! generator once per shared qubit whose CNOT pair runs in the wrong order,
//! so an odd number of inverted pairs leaves a visible flip.

use crate::circuits::{Circuit, CircuitError, QubitKind};
use crate::codes::{classify, syndrome, CssCode, ErrorClass, PauliOperator};
use crate::gf2::Gf2Vector;
use crate::layout::StabKind;
use crate::noise::PauliFrame;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Why a circuit failed verification. Indices refer to the stabilizer row
/// or roster qubit that exposed the mismatch.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum VerificationFailure {
    #[error("circuit is structurally invalid: {0}")]
    Invalid(#[from] CircuitError),
    #[error("circuit roster does not match the code dimensions")]
    RosterMismatch,
    #[error("{kind:?} generator {index} flipped a measurement outcome")]
    GeneratorVisible { kind: StabKind, index: usize },
    #[error("{kind:?} generator {index} was altered by the circuit")]
    GeneratorResidual { kind: StabKind, index: usize },
    #[error("post-preparation fault on ancilla {qubit} that fixes its state flipped an outcome")]
    StabilizingFaultVisible { qubit: u32 },
    #[error("post-preparation fault on ancilla {qubit} left a residual outside the stabilizer group")]
    StabilizingFaultResidual { qubit: u32 },
    #[error("post-preparation fault on ancilla {qubit} flipping its outcome did not flip exactly that outcome")]
    AntiFaultOutcome { qubit: u32 },
    #[error("post-preparation fault on ancilla {qubit} flipping its outcome leaked onto the data")]
    AntiFaultResidual { qubit: u32 },
    #[error("random error trial {trial}: measured syndrome disagrees with the input error")]
    SyndromeMismatch { trial: usize },
    #[error("random error trial {trial}: the circuit altered the data error")]
    ResidualChanged { trial: usize },
}

/// A single Pauli fault inserted after timestep `after_step` completes.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Injection {
    pub after_step: usize,
    pub qubit: u32,
    pub x: bool,
    pub z: bool,
}

/// Outcomes and the frame left on the data after one pass of the circuit.
pub(crate) struct RunResult {
    /// One bit per X ancilla, in stabilizer order.
    pub x_outcomes: Gf2Vector,
    /// One bit per Z ancilla, in stabilizer order.
    pub z_outcomes: Gf2Vector,
    /// Frame restricted to the data qubits.
    pub residual: PauliOperator,
}

/// Propagates `input` (a Pauli on the data qubits) plus the listed faults
/// through the circuit, with no other noise.
pub(crate) fn run_with_injections(
    circuit: &Circuit,
    input: &PauliOperator,
    injections: &[Injection],
) -> RunResult {
    let roster = &circuit.roster;
    let mut frame = PauliFrame::new(roster.total());
    for q in 0..input.n().min(roster.data as usize) {
        frame.x.set(q, input.x.get(q));
        frame.z.set(q, input.z.get(q));
    }
    let mut x_outcomes = Gf2Vector::zeros(roster.x_ancillas as usize);
    let mut z_outcomes = Gf2Vector::zeros(roster.z_ancillas as usize);
    for (s, step) in circuit.steps.iter().enumerate() {
        for op in step {
            if let Some(flip) = frame.apply(op) {
                match roster.kind_of(op.support().0) {
                    QubitKind::XAncilla(i) => x_outcomes.set(i as usize, flip),
                    QubitKind::ZAncilla(i) => z_outcomes.set(i as usize, flip),
                    QubitKind::Data(_) => unreachable!("validated circuits measure ancillas"),
                }
            }
        }
        for inj in injections.iter().filter(|inj| inj.after_step == s) {
            frame.flip(inj.qubit, inj.x, inj.z);
        }
    }
    RunResult {
        x_outcomes,
        z_outcomes,
        residual: frame.data_residual(roster.data as usize),
    }
}

/// Timestep in which each roster qubit is prepared, if any.
fn preparation_steps(circuit: &Circuit) -> Vec<Option<usize>> {
    let mut steps = vec![None; circuit.roster.total()];
    for (s, step) in circuit.steps.iter().enumerate() {
        for op in step {
            if op.is_preparation() {
                steps[op.support().0 as usize] = Some(s);
            }
        }
    }
    steps
}

/// Verifies that `circuit` measures the stabilizers of `code`: generators
/// are invisible, post-preparation ancilla faults land exactly where they
/// must, and `trials` random data errors reproduce their syndromes while
/// passing through untouched.
pub fn verify_measures_stabilizers(
    circuit: &Circuit,
    code: &CssCode,
    trials: usize,
    seed: u64,
) -> Result<(), VerificationFailure> {
    circuit.validate()?;
    let roster = &circuit.roster;
    let n = code.n();
    let measures_x = roster.x_ancillas > 0;
    let measures_z = roster.z_ancillas > 0;
    if roster.data as usize != n
        || (measures_x && roster.x_ancillas as usize != code.num_x_stabs())
        || (measures_z && roster.z_ancillas as usize != code.num_z_stabs())
        || (!measures_x && !measures_z)
    {
        return Err(VerificationFailure::RosterMismatch);
    }

    // Stabilizer generators pass through invisibly.
    let generators = (0..code.num_x_stabs())
        .map(|i| {
            (StabKind::X, i, PauliOperator {
                x: code.hx().row_vector(i),
                z: Gf2Vector::zeros(n),
            })
        })
        .chain((0..code.num_z_stabs()).map(|i| {
            (StabKind::Z, i, PauliOperator {
                x: Gf2Vector::zeros(n),
                z: code.hz().row_vector(i),
            })
        }));
    for (kind, index, g) in generators {
        let run = run_with_injections(circuit, &g, &[]);
        if !run.x_outcomes.is_zero() || !run.z_outcomes.is_zero() {
            return Err(VerificationFailure::GeneratorVisible { kind, index });
        }
        if classify(code, &run.residual) != ErrorClass::Stabilizer {
            return Err(VerificationFailure::GeneratorResidual { kind, index });
        }
    }

    // Post-preparation ancilla faults. The fault that fixes the fresh
    // ancilla state must stay invisible (its spread is a stabilizer); the
    // anticommuting fault must flip exactly the ancilla's own outcome.
    let prep_step = preparation_steps(circuit);
    let identity = PauliOperator::identity(n);
    let ancillas = (0..roster.x_ancillas)
        .map(|i| (roster.x_ancilla(i), QubitKind::XAncilla(i)))
        .chain((0..roster.z_ancillas).map(|i| (roster.z_ancilla(i), QubitKind::ZAncilla(i))));
    for (qubit, kind) in ancillas {
        let after_step =
            prep_step[qubit as usize].expect("validated circuits prepare every ancilla");
        // X fixes |+⟩ and Z fixes |0⟩.
        let fixes_state = matches!(kind, QubitKind::XAncilla(_));
        let stabilizing = Injection {
            after_step,
            qubit,
            x: fixes_state,
            z: !fixes_state,
        };
        let run = run_with_injections(circuit, &identity, &[stabilizing]);
        if !run.x_outcomes.is_zero() || !run.z_outcomes.is_zero() {
            return Err(VerificationFailure::StabilizingFaultVisible { qubit });
        }
        if classify(code, &run.residual) != ErrorClass::Stabilizer {
            return Err(VerificationFailure::StabilizingFaultResidual { qubit });
        }

        let anti = Injection {
            after_step,
            qubit,
            x: !fixes_state,
            z: fixes_state,
        };
        let run = run_with_injections(circuit, &identity, &[anti]);
        let own_flipped = match kind {
            QubitKind::XAncilla(i) => {
                run.x_outcomes.weight() == 1
                    && run.x_outcomes.get(i as usize)
                    && run.z_outcomes.is_zero()
            }
            QubitKind::ZAncilla(i) => {
                run.z_outcomes.weight() == 1
                    && run.z_outcomes.get(i as usize)
                    && run.x_outcomes.is_zero()
            }
            QubitKind::Data(_) => unreachable!(),
        };
        if !own_flipped {
            return Err(VerificationFailure::AntiFaultOutcome { qubit });
        }
        if !run.residual.is_identity() {
            return Err(VerificationFailure::AntiFaultResidual { qubit });
        }
    }

    // Random data errors reproduce their syndrome and are left untouched.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..trials {
        let mut e = PauliOperator::identity(n);
        for q in 0..n {
            e.x.set(q, rng.gen());
            e.z.set(q, rng.gen());
        }
        let run = run_with_injections(circuit, &e, &[]);
        let (sx, sz) = syndrome(code, &e);
        if (measures_x && run.x_outcomes != sx) || (measures_z && run.z_outcomes != sz) {
            return Err(VerificationFailure::SyndromeMismatch { trial });
        }
        if run.residual != e {
            return Err(VerificationFailure::ResidualChanged { trial });
        }
    }
    Ok(())
}
