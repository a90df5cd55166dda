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

//! Syndrome-extraction circuits for CSS codes.
//!
//! A circuit is a sequence of timesteps, each a list of one- and two-qubit
//! operations with disjoint supports; qubits not acted on in a step carry an
//! explicit idle, so every step partitions the full qubit roster and noise
//! models can attach faults to identity gates.
//!
//! Two schedulers are provided:
//!
//! * [`coloration_circuit`] colors the X and Z Tanner incidences separately
//!   and runs one matching per step, overlapping the Z preparations and the
//!   X measurements with CNOT steps. Its depth is deg(T_X) + deg(T_Z) + 2
//!   when both bases are measured.
//! * [`cardinal_circuit`] follows a compass-direction labeling of the Tanner
//!   edges of a product code: all CNOTs of one direction run as a block of
//!   matchings before the next direction starts, which is what lets each
//!   CNOT layer stay planar in a layered hardware layout. Its depth is the
//!   sum of the four directional subgraph degrees plus 2.

pub mod coloring;
pub(crate) mod oracle;

pub use coloring::{bipartite_edge_coloring, EdgeColoring};
pub use oracle::{verify_measures_stabilizers, VerificationFailure};

use crate::codes::CssCode;
use crate::graph::Graph;
use crate::layout::{DirectedTanner, Direction, StabKind};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors from circuit construction and validation.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum CircuitError {
    #[error("graph contains an odd cycle, so it has no bipartition")]
    NotBipartite,
    #[error("timestep {step} acts on qubit {qubit} more than once")]
    OverlappingOps { step: usize, qubit: u32 },
    #[error("timestep {step} leaves qubit {qubit} without an operation")]
    MissingIdle { step: usize, qubit: u32 },
    #[error("timestep {step} references qubit {qubit} outside the roster")]
    QubitOutOfRange { step: usize, qubit: u32 },
    #[error("data qubit {qubit} admits only CNOT and idle operations")]
    DataOpKind { qubit: u32 },
    #[error("ancilla {qubit} must be prepared once and measured once, in its stabilizer basis")]
    AncillaLifecycle { qubit: u32 },
    #[error("ancilla {qubit} has a CNOT outside its preparation/measurement window")]
    AncillaOrder { qubit: u32 },
}

/// One elementary operation. Qubit indices refer to the circuit's [`Roster`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "OpRecord", into = "OpRecord")]
pub enum Op {
    /// Reset to the +1 eigenstate of X.
    PreparePlus { qubit: u32 },
    /// Reset to the +1 eigenstate of Z.
    PrepareZero { qubit: u32 },
    Cnot { control: u32, target: u32 },
    MeasureX { qubit: u32 },
    MeasureZ { qubit: u32 },
    /// Explicit identity; the unit noise attaches to.
    Idle { qubit: u32 },
}

impl Op {
    /// The qubits the operation acts on.
    pub fn support(&self) -> (u32, Option<u32>) {
        match *self {
            Op::PreparePlus { qubit }
            | Op::PrepareZero { qubit }
            | Op::MeasureX { qubit }
            | Op::MeasureZ { qubit }
            | Op::Idle { qubit } => (qubit, None),
            Op::Cnot { control, target } => (control, Some(target)),
        }
    }

    pub fn is_preparation(&self) -> bool {
        matches!(self, Op::PreparePlus { .. } | Op::PrepareZero { .. })
    }

    pub fn is_measurement(&self) -> bool {
        matches!(self, Op::MeasureX { .. } | Op::MeasureZ { .. })
    }
}

/// Serialized form of an operation: a name plus its qubit list.
#[derive(Serialize, Deserialize)]
struct OpRecord {
    op: String,
    qubits: Vec<u32>,
}

impl From<Op> for OpRecord {
    fn from(op: Op) -> OpRecord {
        let (name, qubits) = match op {
            Op::PreparePlus { qubit } => ("prepare_plus", vec![qubit]),
            Op::PrepareZero { qubit } => ("prepare_zero", vec![qubit]),
            Op::Cnot { control, target } => ("cnot", vec![control, target]),
            Op::MeasureX { qubit } => ("measure_x", vec![qubit]),
            Op::MeasureZ { qubit } => ("measure_z", vec![qubit]),
            Op::Idle { qubit } => ("idle", vec![qubit]),
        };
        OpRecord {
            op: name.to_owned(),
            qubits,
        }
    }
}

impl TryFrom<OpRecord> for Op {
    type Error = String;

    fn try_from(record: OpRecord) -> Result<Op, String> {
        let one = |q: &[u32]| -> Result<u32, String> {
            match q {
                [qubit] => Ok(*qubit),
                _ => Err(format!("'{}' takes exactly one qubit", record.op)),
            }
        };
        match record.op.as_str() {
            "prepare_plus" => Ok(Op::PreparePlus {
                qubit: one(&record.qubits)?,
            }),
            "prepare_zero" => Ok(Op::PrepareZero {
                qubit: one(&record.qubits)?,
            }),
            "measure_x" => Ok(Op::MeasureX {
                qubit: one(&record.qubits)?,
            }),
            "measure_z" => Ok(Op::MeasureZ {
                qubit: one(&record.qubits)?,
            }),
            "idle" => Ok(Op::Idle {
                qubit: one(&record.qubits)?,
            }),
            "cnot" => match record.qubits.as_slice() {
                [control, target] => Ok(Op::Cnot {
                    control: *control,
                    target: *target,
                }),
                _ => Err("'cnot' takes exactly two qubits".to_owned()),
            },
            other => Err(format!("unknown operation '{other}'")),
        }
    }
}

/// Qubit numbering: data qubits first, then one ancilla per X stabilizer,
/// then one per Z stabilizer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Roster {
    pub data: u32,
    pub x_ancillas: u32,
    pub z_ancillas: u32,
}

/// Role of a roster index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QubitKind {
    Data(u32),
    XAncilla(u32),
    ZAncilla(u32),
}

impl Roster {
    /// Roster measuring every stabilizer of `code` with its own ancilla.
    pub fn for_code(code: &CssCode) -> Roster {
        Roster {
            data: code.n() as u32,
            x_ancillas: code.num_x_stabs() as u32,
            z_ancillas: code.num_z_stabs() as u32,
        }
    }

    pub fn total(&self) -> usize {
        (self.data + self.x_ancillas + self.z_ancillas) as usize
    }

    /// Roster index of the ancilla for X stabilizer `i`.
    pub fn x_ancilla(&self, i: u32) -> u32 {
        debug_assert!(i < self.x_ancillas);
        self.data + i
    }

    /// Roster index of the ancilla for Z stabilizer `i`.
    pub fn z_ancilla(&self, i: u32) -> u32 {
        debug_assert!(i < self.z_ancillas);
        self.data + self.x_ancillas + i
    }

    pub fn kind_of(&self, q: u32) -> QubitKind {
        if q < self.data {
            QubitKind::Data(q)
        } else if q < self.data + self.x_ancillas {
            QubitKind::XAncilla(q - self.data)
        } else {
            QubitKind::ZAncilla(q - self.data - self.x_ancillas)
        }
    }
}

/// Which stabilizer bases a circuit extracts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    X,
    Z,
    Both,
}

/// A syndrome-extraction circuit: a qubit roster and a list of timesteps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    pub roster: Roster,
    pub steps: Vec<Vec<Op>>,
}

impl Circuit {
    /// Number of timesteps.
    pub fn depth(&self) -> usize {
        self.steps.len()
    }

    pub fn cnot_count(&self) -> usize {
        self.steps
            .iter()
            .flatten()
            .filter(|op| matches!(op, Op::Cnot { .. }))
            .count()
    }

    /// Checks the structural invariants:
    ///
    /// * every step acts on each roster qubit exactly once (idles included),
    /// * data qubits see only CNOTs and idles,
    /// * each ancilla is prepared exactly once in its stabilizer basis and
    ///   measured exactly once in the same basis, with every CNOT touching
    ///   it strictly between the two.
    pub fn validate(&self) -> Result<(), CircuitError> {
        let total = self.roster.total();
        let mut covered = vec![usize::MAX; total];
        // Per-qubit step of prepare/measure, and the CNOT step range.
        let mut prep = vec![None; total];
        let mut meas = vec![None; total];
        let mut cnot_range: Vec<Option<(usize, usize)>> = vec![None; total];

        for (s, step) in self.steps.iter().enumerate() {
            for op in step {
                let (a, b) = op.support();
                for q in std::iter::once(a).chain(b) {
                    if q as usize >= total {
                        return Err(CircuitError::QubitOutOfRange { step: s, qubit: q });
                    }
                    if covered[q as usize] == s {
                        return Err(CircuitError::OverlappingOps { step: s, qubit: q });
                    }
                    covered[q as usize] = s;
                    if let Op::Cnot { .. } = op {
                        let r = cnot_range[q as usize].get_or_insert((s, s));
                        r.1 = s;
                    }
                }
                let q = a as usize;
                match (op, self.roster.kind_of(a)) {
                    (Op::Idle { .. } | Op::Cnot { .. }, _) => {}
                    (_, QubitKind::Data(_)) => {
                        return Err(CircuitError::DataOpKind { qubit: a });
                    }
                    (Op::PreparePlus { .. }, QubitKind::XAncilla(_))
                    | (Op::PrepareZero { .. }, QubitKind::ZAncilla(_)) => {
                        if prep[q].replace(s).is_some() {
                            return Err(CircuitError::AncillaLifecycle { qubit: a });
                        }
                    }
                    (Op::MeasureX { .. }, QubitKind::XAncilla(_))
                    | (Op::MeasureZ { .. }, QubitKind::ZAncilla(_)) => {
                        if meas[q].replace(s).is_some() {
                            return Err(CircuitError::AncillaLifecycle { qubit: a });
                        }
                    }
                    // Wrong basis for this ancilla.
                    _ => return Err(CircuitError::AncillaLifecycle { qubit: a }),
                }
            }
            if let Some(q) = (0..total).find(|&q| covered[q] != s) {
                return Err(CircuitError::MissingIdle {
                    step: s,
                    qubit: q as u32,
                });
            }
        }

        for q in self.roster.data as usize..total {
            let (p, m) = match (prep[q], meas[q]) {
                (Some(p), Some(m)) if p < m => (p, m),
                _ => return Err(CircuitError::AncillaLifecycle { qubit: q as u32 }),
            };
            if let Some((first, last)) = cnot_range[q] {
                if first <= p || last >= m {
                    return Err(CircuitError::AncillaOrder { qubit: q as u32 });
                }
            }
        }
        Ok(())
    }
}

/// Appends explicit idles so each step partitions the roster.
fn with_idles(roster: &Roster, mut steps: Vec<Vec<Op>>) -> Vec<Vec<Op>> {
    let total = roster.total();
    let mut covered = vec![usize::MAX; total];
    for (s, step) in steps.iter_mut().enumerate() {
        for op in step.iter() {
            let (a, b) = op.support();
            for q in std::iter::once(a).chain(b) {
                covered[q as usize] = s;
            }
        }
        for q in 0..total {
            if covered[q] != s {
                step.push(Op::Idle { qubit: q as u32 });
            }
        }
    }
    steps
}

/// Colors the incidences of one stabilizer basis and buckets the CNOTs into
/// one slot per color. `make_op` orients each CNOT from (stabilizer index,
/// data qubit).
fn color_slots(
    pairs: &[(u32, u32)],
    stabs: usize,
    n_qubits: usize,
    mut make_op: impl FnMut(u32, u32) -> Op,
) -> Vec<Vec<Op>> {
    let mut g = Graph::new(stabs + n_qubits);
    for &(s, q) in pairs {
        g.add_edge(s, stabs as u32 + q);
    }
    debug_assert_eq!(g.edge_count(), pairs.len(), "repeated Tanner incidence");
    let coloring =
        bipartite_edge_coloring(&g).expect("stabilizer-qubit incidence graphs are bipartite");
    let mut slots = vec![Vec::new(); coloring.color_count];
    for (e, &(s, q)) in pairs.iter().enumerate() {
        slots[coloring.colors[e] as usize].push(make_op(s, q));
    }
    slots
}

fn x_cnot(roster: &Roster, stab: u32, qubit: u32) -> Op {
    Op::Cnot {
        control: roster.x_ancilla(stab),
        target: qubit,
    }
}

fn z_cnot(roster: &Roster, stab: u32, qubit: u32) -> Op {
    Op::Cnot {
        control: qubit,
        target: roster.z_ancilla(stab),
    }
}

fn x_pairs(code: &CssCode) -> Vec<(u32, u32)> {
    (0..code.num_x_stabs())
        .flat_map(|i| code.x_support(i).iter().map(move |&q| (i as u32, q)))
        .collect()
}

fn z_pairs(code: &CssCode) -> Vec<(u32, u32)> {
    (0..code.num_z_stabs())
        .flat_map(|i| code.z_support(i).iter().map(move |&q| (i as u32, q)))
        .collect()
}

/// Builds the edge-coloration schedule for `code`.
///
/// Measuring one basis takes deg(T) + 2 steps for a Tanner graph of degree
/// deg(T): one preparation step, one matching per color, one measurement
/// step. Measuring both bases overlaps the Z preparations with the last X
/// CNOT step and the X measurements with the first Z CNOT step, for
/// deg(T_X) + deg(T_Z) + 2 total.
pub fn coloration_circuit(code: &CssCode, basis: Basis) -> Circuit {
    let roster = Roster {
        data: code.n() as u32,
        x_ancillas: match basis {
            Basis::Z => 0,
            _ => code.num_x_stabs() as u32,
        },
        z_ancillas: match basis {
            Basis::X => 0,
            _ => code.num_z_stabs() as u32,
        },
    };
    let prep_x: Vec<Op> = (0..roster.x_ancillas)
        .map(|i| Op::PreparePlus {
            qubit: roster.x_ancilla(i),
        })
        .collect();
    let meas_x: Vec<Op> = (0..roster.x_ancillas)
        .map(|i| Op::MeasureX {
            qubit: roster.x_ancilla(i),
        })
        .collect();
    let prep_z: Vec<Op> = (0..roster.z_ancillas)
        .map(|i| Op::PrepareZero {
            qubit: roster.z_ancilla(i),
        })
        .collect();
    let meas_z: Vec<Op> = (0..roster.z_ancillas)
        .map(|i| Op::MeasureZ {
            qubit: roster.z_ancilla(i),
        })
        .collect();

    let x_slots = if roster.x_ancillas > 0 {
        color_slots(&x_pairs(code), code.num_x_stabs(), code.n(), |s, q| {
            x_cnot(&roster, s, q)
        })
    } else {
        Vec::new()
    };
    let z_slots = if roster.z_ancillas > 0 {
        color_slots(&z_pairs(code), code.num_z_stabs(), code.n(), |s, q| {
            z_cnot(&roster, s, q)
        })
    } else {
        Vec::new()
    };

    let mut steps: Vec<Vec<Op>> = Vec::new();
    if x_slots.is_empty() || z_slots.is_empty() {
        // Single-basis schedule (or one basis is trivial): prepare
        // everything, run the one block of matchings, measure everything.
        let mut first = prep_x;
        first.extend(prep_z);
        steps.push(first);
        steps.extend(x_slots);
        steps.extend(z_slots);
        let mut last = meas_x;
        last.extend(meas_z);
        steps.push(last);
    } else {
        let dx = x_slots.len();
        steps.push(prep_x);
        steps.extend(x_slots);
        steps[dx].extend(prep_z);
        let mut z_slots = z_slots.into_iter();
        let mut overlap = z_slots.next().expect("nonempty Z block");
        overlap.extend(meas_x);
        steps.push(overlap);
        steps.extend(z_slots);
        steps.push(meas_z);
    }

    let circuit = Circuit {
        roster,
        steps: with_idles(&roster, steps),
    };
    debug_assert_eq!(circuit.validate(), Ok(()));
    circuit
}

/// Builds the compass-direction schedule for a product code whose Tanner
/// edges have been assigned directions.
///
/// After one preparation step, the CNOTs run direction by direction in the
/// fixed order E, N, S, W; within a direction the edges are colored and run
/// one matching per step, colors ascending. A final step measures every
/// ancilla. The depth is the sum of the four directional degrees plus 2,
/// and every CNOT step touches edges of a single direction, which is what a
/// layered planar layout needs.
pub fn cardinal_circuit(code: &CssCode, dt: &DirectedTanner) -> Circuit {
    assert_eq!(dt.n_qubits(), code.n(), "direction labels for another code");
    assert_eq!(dt.x_stabs(), code.num_x_stabs());
    assert_eq!(dt.z_stabs(), code.num_z_stabs());
    let roster = Roster::for_code(code);
    let stabs = dt.x_stabs() + dt.z_stabs();

    let mut first: Vec<Op> = (0..roster.x_ancillas)
        .map(|i| Op::PreparePlus {
            qubit: roster.x_ancilla(i),
        })
        .collect();
    first.extend((0..roster.z_ancillas).map(|i| Op::PrepareZero {
        qubit: roster.z_ancilla(i),
    }));
    let mut last: Vec<Op> = (0..roster.x_ancillas)
        .map(|i| Op::MeasureX {
            qubit: roster.x_ancilla(i),
        })
        .collect();
    last.extend((0..roster.z_ancillas).map(|i| Op::MeasureZ {
        qubit: roster.z_ancilla(i),
    }));

    let mut steps = vec![first];
    for d in Direction::ALL {
        // One coloring graph per direction; X and Z stabilizers can share a
        // data qubit within a direction, so they share the palette.
        let edges: Vec<_> = dt.edges().iter().filter(|e| e.direction == d).collect();
        let pairs: Vec<(u32, u32)> = edges
            .iter()
            .map(|e| match e.kind {
                StabKind::X => (e.stab, e.qubit),
                StabKind::Z => (dt.x_stabs() as u32 + e.stab, e.qubit),
            })
            .collect();
        let slots = color_slots(&pairs, stabs, code.n(), |s, q| {
            if (s as usize) < dt.x_stabs() {
                x_cnot(&roster, s, q)
            } else {
                z_cnot(&roster, s - dt.x_stabs() as u32, q)
            }
        });
        debug_assert_eq!(slots.len(), dt.direction_degree(d));
        steps.extend(slots);
    }
    steps.push(last);

    let circuit = Circuit {
        roster,
        steps: with_idles(&roster, steps),
    };
    debug_assert_eq!(circuit.depth(), dt.direction_degree_sum() + 2);
    debug_assert_eq!(circuit.validate(), Ok(()));
    circuit
}

/// The qubit-connectivity graph a circuit requires: one vertex per roster
/// qubit, one edge per distinct CNOT pair.
pub fn connectivity_graph(circuit: &Circuit) -> Graph {
    let mut g = Graph::new(circuit.roster.total());
    for op in circuit.steps.iter().flatten() {
        if let Op::Cnot { control, target } = op {
            g.add_edge(*control, *target);
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{hgp, random_biregular, toric, BipartiteGraph};
    use crate::layout::{
        assign_directions, cycle_walk_ordering, find_balanced_ordering, SearchConfig,
        VertexOrdering,
    };
    use proptest::prelude::*;

    /// 2-qubit product of two single-edge repetition graphs: one X and one
    /// Z stabilizer, both of weight 2.
    fn toy_code() -> CssCode {
        let g = BipartiteGraph::single_edge();
        hgp(&g, &g)
    }

    fn toy_directed() -> DirectedTanner {
        let code = toy_code();
        let ord = VertexOrdering::consecutive(2);
        assign_directions(&code, &ord, &ord).unwrap()
    }

    fn sample_hgp(seed_girth: (u64, usize), s: usize) -> CssCode {
        let (seed, girth) = seed_girth;
        let g = random_biregular(s, 3, 4, girth, seed, 4000).unwrap();
        hgp(&g, &g)
    }

    #[test]
    fn coloration_single_basis_depth_is_degree_plus_two() {
        let code = toric(3);
        // Toric X stabilizers have weight 4 and qubits touch at most two X
        // stabilizers each... the X Tanner degree is 4.
        let cx = coloration_circuit(&code, Basis::X);
        assert_eq!(cx.depth(), 4 + 2);
        assert_eq!(cx.validate(), Ok(()));
        assert_eq!(cx.roster.z_ancillas, 0);
        assert_eq!(cx.cnot_count(), 4 * code.num_x_stabs());

        let cz = coloration_circuit(&code, Basis::Z);
        assert_eq!(cz.depth(), 4 + 2);
        assert_eq!(cz.roster.x_ancillas, 0);
    }

    #[test]
    fn coloration_both_bases_overlap_saves_two_steps() {
        let code = toric(3);
        let c = coloration_circuit(&code, Basis::Both);
        assert_eq!(c.depth(), 4 + 4 + 2);
        assert_eq!(c.validate(), Ok(()));
        // Overlap really happened: step 4 holds CNOTs and Z preparations,
        // step 5 holds CNOTs and X measurements.
        assert!(c.steps[4].iter().any(|o| o.is_preparation()));
        assert!(c.steps[4].iter().any(|o| matches!(o, Op::Cnot { .. })));
        assert!(c.steps[5].iter().any(|o| o.is_measurement()));
        assert!(c.steps[5].iter().any(|o| matches!(o, Op::Cnot { .. })));
    }

    #[test]
    fn coloration_toy_code_both_bases_depth_six() {
        let c = coloration_circuit(&toy_code(), Basis::Both);
        assert_eq!(c.depth(), 2 + 2 + 2);
        assert_eq!(c.validate(), Ok(()));
    }

    #[test]
    fn coloration_first_step_prepares_last_step_measures() {
        let code = sample_hgp((11, 4), 2);
        let c = coloration_circuit(&code, Basis::Both);
        assert_eq!(c.validate(), Ok(()));
        assert!(c.steps[0]
            .iter()
            .all(|o| o.is_preparation() || matches!(o, Op::Idle { .. })));
        assert!(c.steps[c.depth() - 1]
            .iter()
            .all(|o| o.is_measurement() || matches!(o, Op::Idle { .. })));
    }

    #[test]
    fn cnot_orientation_follows_the_stabilizer_basis() {
        let code = toric(2);
        let c = coloration_circuit(&code, Basis::Both);
        for op in c.steps.iter().flatten() {
            if let Op::Cnot { control, target } = op {
                match c.roster.kind_of(*control) {
                    QubitKind::XAncilla(_) => {
                        assert!(matches!(c.roster.kind_of(*target), QubitKind::Data(_)));
                    }
                    QubitKind::Data(_) => {
                        assert!(matches!(c.roster.kind_of(*target), QubitKind::ZAncilla(_)));
                    }
                    QubitKind::ZAncilla(_) => panic!("Z ancilla used as control"),
                }
            }
        }
    }

    #[test]
    fn cardinal_toric_depth_six() {
        let d = 3;
        let code = toric(d);
        let ord = cycle_walk_ordering(d);
        let dt = assign_directions(&code, &ord, &ord).unwrap();
        let c = cardinal_circuit(&code, &dt);
        assert_eq!(c.depth(), dt.direction_degree_sum() + 2);
        assert_eq!(c.depth(), 6);
        assert_eq!(c.validate(), Ok(()));
        assert_eq!(c.cnot_count(), 4 * (code.num_x_stabs() + code.num_z_stabs()));
    }

    #[test]
    fn cardinal_toy_code_depth_six() {
        let code = toy_code();
        let c = cardinal_circuit(&code, &toy_directed());
        // One CNOT per direction: depth 1 + 4 + 1.
        assert_eq!(c.depth(), 6);
        assert_eq!(c.validate(), Ok(()));
    }

    #[test]
    fn cardinal_steps_stay_within_one_direction() {
        let d = 4;
        let code = toric(d);
        let ord = cycle_walk_ordering(d);
        let dt = assign_directions(&code, &ord, &ord).unwrap();
        let c = cardinal_circuit(&code, &dt);

        // Map each CNOT pair to its Tanner-edge direction and check no step
        // mixes two directions.
        let mut dir_of = std::collections::HashMap::new();
        for e in dt.edges() {
            let anc = match e.kind {
                StabKind::X => c.roster.x_ancilla(e.stab),
                StabKind::Z => c.roster.z_ancilla(e.stab),
            };
            dir_of.insert((anc, e.qubit), e.direction);
        }
        let mut step_dirs: Vec<std::collections::HashSet<Direction>> = Vec::new();
        for step in &c.steps {
            let dirs: std::collections::HashSet<Direction> = step
                .iter()
                .filter_map(|op| match op {
                    Op::Cnot { control, target } => {
                        let key = match c.roster.kind_of(*control) {
                            QubitKind::XAncilla(_) => (*control, *target),
                            _ => (*target, *control),
                        };
                        Some(dir_of[&key])
                    }
                    _ => None,
                })
                .collect();
            assert!(dirs.len() <= 1, "a step mixes directions");
            step_dirs.push(dirs);
        }
        // Directions appear as contiguous blocks in the E, N, S, W order.
        let sequence: Vec<Direction> = step_dirs.iter().filter_map(|d| d.iter().next().copied()).collect();
        let mut blocks = sequence.clone();
        blocks.dedup();
        let expected: Vec<Direction> = Direction::ALL
            .into_iter()
            .filter(|&d| dt.direction_degree(d) > 0)
            .collect();
        assert_eq!(blocks, expected);
    }

    #[test]
    fn cardinal_depth_on_the_balanced_product_fixture() {
        // (3,4)-biregular seed with both orderings landing every direction
        // degree at 2: depth 2+2+2+2 plus preparation and measurement.
        let g = random_biregular(3, 3, 4, 6, 0, 4000).unwrap();
        let cfg = SearchConfig {
            swaps: 20_000,
            restarts: 2,
            ..SearchConfig::default()
        };
        let ord = find_balanced_ordering(&g, 132, &cfg).ordering;
        let code = hgp(&g, &g);
        let dt = assign_directions(&code, &ord, &ord).unwrap();
        assert_eq!(dt.direction_degree_sum(), 8);
        let c = cardinal_circuit(&code, &dt);
        assert_eq!(c.depth(), 10);
        assert_eq!(c.validate(), Ok(()));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        /// Cardinal depth never exceeds twice the Tanner degree plus two.
        #[test]
        fn cardinal_depth_within_twice_tanner_degree(seed in 0u64..500) {
            let g = random_biregular(2, 3, 4, 4, seed, 4000).unwrap();
            let code = hgp(&g, &g);
            let ord = VertexOrdering::consecutive(14);
            let dt = assign_directions(&code, &ord, &ord).unwrap();
            let c = cardinal_circuit(&code, &dt);
            prop_assert_eq!(c.depth(), dt.direction_degree_sum() + 2);
            prop_assert!(c.depth() <= 2 * dt.degree() + 2);
        }
    }

    #[test]
    fn connectivity_of_toric_syndrome_circuit_is_four_regular() {
        let code = toric(3);
        let c = coloration_circuit(&code, Basis::Both);
        let g = connectivity_graph(&c);
        // Every toric data qubit touches 2 X and 2 Z stabilizers; every
        // ancilla touches 4 data qubits.
        assert!((0..g.n() as u32).all(|v| g.degree(v) == 4));
        assert_eq!(g.edge_count(), 4 * 2 * code.num_x_stabs());
    }

    #[test]
    fn connectivity_degree_bound_for_biregular_products() {
        let code = sample_hgp((11, 4), 2);
        let c = coloration_circuit(&code, Basis::Both);
        let g = connectivity_graph(&c);
        // Data qubits touch at most 3+3 or 4+4 stabilizers; ancilla degree
        // is the stabilizer weight, at most 7.
        assert_eq!(g.max_degree(), 8);
    }

    #[test]
    fn connectivity_of_cnot_free_circuit_is_edgeless() {
        let roster = Roster {
            data: 2,
            x_ancillas: 0,
            z_ancillas: 0,
        };
        let c = Circuit {
            roster,
            steps: vec![vec![Op::Idle { qubit: 0 }, Op::Idle { qubit: 1 }]],
        };
        assert_eq!(connectivity_graph(&c).edge_count(), 0);
    }

    #[test]
    fn validation_rejects_overlapping_supports() {
        let roster = Roster {
            data: 2,
            x_ancillas: 1,
            z_ancillas: 0,
        };
        let c = Circuit {
            roster,
            steps: vec![vec![
                Op::Cnot {
                    control: 2,
                    target: 0,
                },
                Op::Cnot {
                    control: 2,
                    target: 1,
                },
                Op::Idle { qubit: 1 },
            ]],
        };
        assert_eq!(
            c.validate(),
            Err(CircuitError::OverlappingOps { step: 0, qubit: 2 })
        );
    }

    #[test]
    fn validation_rejects_missing_idles() {
        let roster = Roster {
            data: 2,
            x_ancillas: 0,
            z_ancillas: 0,
        };
        let c = Circuit {
            roster,
            steps: vec![vec![Op::Idle { qubit: 0 }]],
        };
        assert_eq!(
            c.validate(),
            Err(CircuitError::MissingIdle { step: 0, qubit: 1 })
        );
    }

    #[test]
    fn validation_rejects_cnot_before_preparation() {
        let roster = Roster {
            data: 1,
            x_ancillas: 1,
            z_ancillas: 0,
        };
        let c = Circuit {
            roster,
            steps: vec![
                vec![
                    Op::Cnot {
                        control: 1,
                        target: 0,
                    },
                ],
                vec![Op::PreparePlus { qubit: 1 }, Op::Idle { qubit: 0 }],
                vec![Op::MeasureX { qubit: 1 }, Op::Idle { qubit: 0 }],
            ],
        };
        assert_eq!(c.validate(), Err(CircuitError::AncillaOrder { qubit: 1 }));
    }

    #[test]
    fn validation_rejects_wrong_basis_ancilla_use() {
        let roster = Roster {
            data: 0,
            x_ancillas: 1,
            z_ancillas: 0,
        };
        let c = Circuit {
            roster,
            steps: vec![vec![Op::PrepareZero { qubit: 0 }], vec![Op::MeasureX { qubit: 0 }]],
        };
        assert_eq!(
            c.validate(),
            Err(CircuitError::AncillaLifecycle { qubit: 0 })
        );
    }

    #[test]
    fn validation_rejects_measurement_on_data() {
        let roster = Roster {
            data: 1,
            x_ancillas: 0,
            z_ancillas: 0,
        };
        let c = Circuit {
            roster,
            steps: vec![vec![Op::MeasureZ { qubit: 0 }]],
        };
        assert_eq!(c.validate(), Err(CircuitError::DataOpKind { qubit: 0 }));
    }

    #[test]
    fn circuits_round_trip_through_json() {
        let code = toric(2);
        let c = coloration_circuit(&code, Basis::Both);
        let text = serde_json::to_string(&c).unwrap();
        // Operations serialize as name + qubit list records.
        assert!(text.contains("\"op\":\"cnot\""));
        assert!(text.contains("\"qubits\":["));
        let back: Circuit = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn unknown_operation_names_fail_to_parse() {
        let err = serde_json::from_str::<Op>("{\"op\":\"hadamard\",\"qubits\":[0]}");
        assert!(err.is_err());
        let err = serde_json::from_str::<Op>("{\"op\":\"cnot\",\"qubits\":[0]}");
        assert!(err.is_err());
    }
}
