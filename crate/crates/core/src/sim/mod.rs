//! Circuit simulators.
//!
//! Three engines share one driver: a boolean simulator for classical
//! circuits, a stabilizer-tableau simulator for Clifford circuits and a
//! dense state-vector simulator for everything else. The driver expands
//! subroutine calls, keeps classical wires itself, evaluates classical
//! controls and measures any quantum outputs at the end of the run.
//!
//! Basis-state convention: when a register of wires is read as an integer
//! or a state vector index, the first wire is the most significant bit.

mod classical;
mod matrix;
mod rng;
mod stabilizer;
mod vector;

use std::collections::HashMap;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::builder::ShapedCircuit;
use crate::ir::walk::{Visitor, WalkError, Walker};
use crate::ir::{Circuit, Control, Endpoint, Gate, GateKind, GateRef, NotInvertible, ValidityError, WireId, WireKind};
use crate::shapes::{ShapeMismatch, Tree};

use classical::ClassicalEngine;
use stabilizer::StabilizerEngine;
use vector::VectorEngine;

pub use matrix::Matrix;
pub use rng::Rng;
pub use vector::{gate_matrix, StateVector};

/// Default qubit limit of the state-vector simulator.
pub const VECTOR_LIMIT: usize = 20;
/// Qubit limit of [`circuit_unitary`].
pub const UNITARY_LIMIT: usize = 10;
/// Largest probability mass a `QTerm` may discard.
pub const TERM_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Simulator {
    Classical,
    Stabilizer,
    Vector,
}

impl std::str::FromStr for Simulator {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "classical" => Ok(Simulator::Classical),
            "stabilizer" => Ok(Simulator::Stabilizer),
            "vector" => Ok(Simulator::Vector),
            _ => Err(format!("unknown simulator {s:?}")),
        }
    }
}

/// Where a simulation failed: a gate, or the circuit's inputs or outputs
/// when `None`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Location(pub Option<GateRef>);

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Some(g) => g.fmt(f),
            None => f.write_str("circuit boundary"),
        }
    }
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("{0}: gate is not classical")]
    NotClassical(Location),
    #[error("{0}: gate is not a Clifford gate")]
    NotClifford(Location),
    #[error("{0}: termination assertion failed")]
    AssertionFailed(Location),
    #[error("{0}: measurement in a measurement-free simulation")]
    UnexpectedMeasurement(Location),
    #[error("{at}: more than {limit} simultaneous qubits")]
    TooManyQubits { at: Location, limit: usize },
    #[error("expected {expected} input value(s), got {got}")]
    InputArity { expected: usize, got: usize },
    #[error(transparent)]
    Shape(#[from] ShapeMismatch),
    #[error("invalid circuit: {0}")]
    Invalid(#[from] ValidityError),
    #[error("{0}: {1}")]
    NotInvertible(Location, NotInvertible),
    #[error("{0}")]
    Unsupported(String),
}

impl SimError {
    pub fn is_assertion(&self) -> bool {
        matches!(self, SimError::AssertionFailed(_))
    }
}

/// Engine-level failure, located by the driver.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Fault {
    NotClassical,
    NotClifford,
    Assertion,
    Measurement,
    TooManyQubits(usize),
}

impl Fault {
    fn at(self, loc: Option<GateRef>) -> SimError {
        let loc = Location(loc);
        match self {
            Fault::NotClassical => SimError::NotClassical(loc),
            Fault::NotClifford => SimError::NotClifford(loc),
            Fault::Assertion => SimError::AssertionFailed(loc),
            Fault::Measurement => SimError::UnexpectedMeasurement(loc),
            Fault::TooManyQubits(limit) => SimError::TooManyQubits { at: loc, limit },
        }
    }
}

/// The quantum half of a simulator. Classical wires never reach it.
pub(crate) trait Engine {
    fn init(&mut self, wire: WireId, value: bool) -> Result<(), Fault>;
    fn term(&mut self, wire: WireId, value: bool) -> Result<(), Fault>;
    /// A named gate or rotation on `target`; all `controls` are quantum.
    fn unitary(&mut self, gate: &Gate, target: WireId, controls: &[Control]) -> Result<(), Fault>;
    /// Measures and removes the wire. Draws exactly one number from `rng`.
    fn measure(&mut self, wire: WireId, rng: &mut Rng) -> Result<bool, Fault>;
}

struct Driver<'a, E> {
    engine: &'a mut E,
    bits: HashMap<WireId, bool>,
    rng: &'a mut Rng,
    allow_measure: bool,
    quantum: Vec<Control>,
}

impl<E: Engine> Visitor for Driver<'_, E> {
    type Error = Fault;

    fn visit(&mut self, g: Gate) -> Result<(), Fault> {
        let w = g.operands.first().copied();
        match &g.kind {
            GateKind::Comment { .. } => Ok(()),
            GateKind::QInit(b) => self.engine.init(w.expect("operand"), *b),
            GateKind::QTerm(b) => self.engine.term(w.expect("operand"), *b),
            GateKind::CInit(b) => {
                self.bits.insert(w.expect("operand"), *b);
                Ok(())
            }
            GateKind::CDiscard => {
                self.bits.remove(&w.expect("operand"));
                Ok(())
            }
            GateKind::Measure => {
                if !self.allow_measure {
                    return Err(Fault::Measurement);
                }
                let b = self.engine.measure(w.expect("operand"), self.rng)?;
                self.bits.insert(w.expect("operand"), b);
                Ok(())
            }
            GateKind::Named(_) | GateKind::RGate(_) => {
                if !self.classical_controls_hold(&g) {
                    return Ok(());
                }
                self.quantum.clear();
                self.quantum.extend(g.controls.iter().filter(|c| !self.bits.contains_key(&c.wire)));
                let quantum = std::mem::take(&mut self.quantum);
                let r = self.engine.unitary(&g, w.expect("operand"), &quantum);
                self.quantum = quantum;
                r
            }
            GateKind::SubCall { .. } => unreachable!("calls are expanded by the walker"),
        }
    }
}

impl<E> Driver<'_, E> {
    fn classical_controls_hold(&self, g: &Gate) -> bool {
        g.controls
            .iter()
            .all(|c| self.bits.get(&c.wire).is_none_or(|v| *v == c.positive))
    }
}

fn walk_error(e: WalkError<Fault>) -> SimError {
    match e {
        WalkError::Visit(at, f) => f.at(Some(at)),
        WalkError::NotInvertible(at, n) => SimError::NotInvertible(Location(Some(at)), n),
    }
}

/// Final state of a run: the circuit outputs (global wire ids) and the
/// values of all live classical wires.
struct RunEnd {
    outputs: Vec<Endpoint>,
    bits: HashMap<WireId, bool>,
}

fn execute<E: Engine>(
    c: &Circuit,
    inputs: Option<&[bool]>,
    engine: &mut E,
    rng: &mut Rng,
    allow_measure: bool,
) -> Result<RunEnd, SimError> {
    c.validate()?;
    let mut bits = HashMap::new();
    if let Some(values) = inputs {
        if values.len() != c.inputs().len() {
            return Err(SimError::InputArity { expected: c.inputs().len(), got: values.len() });
        }
        for (e, b) in c.inputs().iter().zip(values) {
            match e.kind {
                WireKind::Quantum => engine.init(e.wire, *b).map_err(|f| f.at(None))?,
                WireKind::Classical => {
                    bits.insert(e.wire, *b);
                }
            }
        }
    }
    let mut driver = Driver { engine, bits, rng, allow_measure, quantum: Vec::new() };
    let outputs = Walker::new(c).run(&mut driver).map_err(walk_error)?;
    Ok(RunEnd { outputs, bits: driver.bits })
}

/// Runs to the end and reads every output, measuring quantum ones in order.
fn run_measured<E: Engine>(c: &Circuit, inputs: &[bool], engine: &mut E, rng: &mut Rng) -> Result<Vec<bool>, SimError> {
    let end = execute(c, Some(inputs), engine, rng, true)?;
    end.outputs
        .iter()
        .map(|e| match e.kind {
            WireKind::Classical => Ok(end.bits[&e.wire]),
            WireKind::Quantum => engine.measure(e.wire, rng).map_err(|f| f.at(None)),
        })
        .collect()
}

/// Boolean simulation. Every wire must hold a definite value whenever it
/// is terminated, measured or output. X gates always qualify; other gates
/// may appear only in short-lived gadgets (such as the H/T Toffoli
/// network) whose net effect on those wires is classical.
pub fn sim_classical(c: &Circuit, inputs: &[bool]) -> Result<Vec<bool>, SimError> {
    let mut engine = ClassicalEngine::default();
    run_measured(c, inputs, &mut engine, &mut Rng::new(0))
}

/// Stabilizer simulation of a Clifford circuit.
pub fn sim_stabilizer(c: &Circuit, inputs: &[bool], rng: &mut Rng) -> Result<Vec<bool>, SimError> {
    let mut engine = StabilizerEngine::default();
    run_measured(c, inputs, &mut engine, rng)
}

/// State-vector simulation of any circuit on at most [`VECTOR_LIMIT`]
/// simultaneous qubits.
pub fn sim_vector(c: &Circuit, inputs: &[bool], rng: &mut Rng) -> Result<Vec<bool>, SimError> {
    let mut engine = VectorEngine::new(VECTOR_LIMIT);
    run_measured(c, inputs, &mut engine, rng)
}

pub fn simulate(sim: Simulator, c: &Circuit, inputs: &[bool], rng: &mut Rng) -> Result<Vec<bool>, SimError> {
    match sim {
        Simulator::Classical => sim_classical(c, inputs),
        Simulator::Stabilizer => sim_stabilizer(c, inputs, rng),
        Simulator::Vector => sim_vector(c, inputs, rng),
    }
}

/// Simulates a shaped circuit on boolean data of its input shape and
/// returns boolean data of its output shape. Garbage outputs are measured
/// and dropped.
pub fn simulate_shaped(
    sim: Simulator,
    sc: &ShapedCircuit,
    inputs: &Tree<bool>,
    rng: &mut Rng,
) -> Result<Tree<bool>, SimError> {
    if !sc.input.same_shape(inputs) {
        return Err(ShapeMismatch::between(&sc.input, inputs).into());
    }
    let flat: Vec<bool> = inputs.leaves().into_iter().copied().collect();
    let out = simulate(sim, &sc.circuit, &flat, rng)?;
    Ok(sc.output.fill(&mut out.into_iter()).expect("output count"))
}

/// The state of a measurement-free circuit with all-quantum outputs, run
/// on a basis state.
pub fn sim_vector_state(c: &Circuit, inputs: &[bool]) -> Result<StateVector, SimError> {
    let mut engine = VectorEngine::new(VECTOR_LIMIT);
    let end = execute(c, Some(inputs), &mut engine, &mut Rng::new(0), false)?;
    quantum_state(&engine, &end.outputs)
}

fn quantum_state(engine: &VectorEngine, outputs: &[Endpoint]) -> Result<StateVector, SimError> {
    if outputs.iter().any(|e| e.kind == WireKind::Classical) {
        return Err(SimError::Unsupported("circuit has classical outputs; no pure output state".into()));
    }
    let wires: Vec<WireId> = outputs.iter().map(|e| e.wire).collect();
    Ok(engine.state_over(&wires))
}

/// Result of running a circuit on a prepared state.
#[derive(Clone, Debug)]
pub struct Evolved {
    /// State of the quantum outputs, in output order.
    pub state: StateVector,
    /// Values of the classical outputs, in output order.
    pub bits: Vec<bool>,
}

/// Runs `c` on an arbitrary input state over its (all quantum) inputs, in
/// input order. Measurements collapse and are sampled from `rng`; classical
/// outputs are returned as bits alongside the remaining quantum state.
pub fn evolve(c: &Circuit, input: &StateVector, rng: &mut Rng) -> Result<Evolved, SimError> {
    if c.inputs().iter().any(|e| e.kind == WireKind::Classical) {
        return Err(SimError::Unsupported("evolve needs an all-quantum input".into()));
    }
    if input.num_qubits() != c.inputs().len() {
        return Err(SimError::InputArity { expected: c.inputs().len(), got: input.num_qubits() });
    }
    let wires: Vec<WireId> = c.inputs().iter().map(|e| e.wire).collect();
    let mut engine = VectorEngine::with_state(VECTOR_LIMIT, &wires, input.amplitudes())
        .map_err(|f| f.at(None))?;
    let end = execute(c, None, &mut engine, rng, true)?;
    let quantum: Vec<WireId> = end.outputs.iter().filter(|e| e.kind == WireKind::Quantum).map(|e| e.wire).collect();
    let bits = end
        .outputs
        .iter()
        .filter(|e| e.kind == WireKind::Classical)
        .map(|e| end.bits[&e.wire])
        .collect();
    Ok(Evolved { state: engine.state_over(&quantum), bits })
}

/// The `2^m × 2^n` matrix of a measurement-free circuit with `n` quantum
/// inputs and `m` quantum outputs: column `j` is the output state for basis
/// input `j`. Circuits that initialise and assert-terminate ancillas are
/// fine as long as every assertion holds.
pub fn circuit_unitary(c: &Circuit) -> Result<Matrix, SimError> {
    let n = c.inputs().len();
    let m = c.outputs().len();
    if n > UNITARY_LIMIT || m > UNITARY_LIMIT {
        return Err(SimError::TooManyQubits { at: Location(None), limit: UNITARY_LIMIT });
    }
    if c.inputs().iter().chain(c.outputs()).any(|e| e.kind == WireKind::Classical) {
        return Err(SimError::Unsupported("circuit_unitary needs all-quantum inputs and outputs".into()));
    }
    let mut u = Matrix::zeros(1 << m, 1 << n);
    for j in 0..(1usize << n) {
        let bits = index_bits(j, n);
        let state = sim_vector_state(c, &bits)?;
        for (i, a) in state.amplitudes().iter().enumerate() {
            u[(i, j)] = *a;
        }
    }
    Ok(u)
}

/// The `n` bits of `value`, most significant first.
pub fn index_bits(value: usize, n: usize) -> Vec<bool> {
    (0..n).map(|k| (value >> (n - 1 - k)) & 1 == 1).collect()
}

/// Reads bits (most significant first) as an integer.
pub fn bits_index(bits: &[bool]) -> usize {
    bits.iter().fold(0, |acc, b| (acc << 1) | usize::from(*b))
}

pub(crate) fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::{extract, Circ, Qubit, QUBIT};
    use crate::ir::NamedGate;

    fn bell() -> Circuit {
        extract(&(), |c, ()| {
            let a = c.qinit(false)?;
            let b = c.qinit(false)?;
            let a = c.hadamard(a)?;
            c.controlled_not(b, a)?;
            Ok((a, b))
        })
        .unwrap()
        .circuit
    }

    #[test]
    fn negative_control_fires_on_zero() {
        let sc = extract(&(QUBIT, QUBIT), |c, (a, b)| {
            c.gate(NamedGate::X, b, &[a.neg()])?;
            Ok((a, b))
        })
        .unwrap();
        assert_eq!(sim_classical(&sc.circuit, &[false, false]).unwrap(), vec![false, true]);
        assert_eq!(sim_classical(&sc.circuit, &[true, false]).unwrap(), vec![true, false]);
    }

    #[test]
    fn hadamard_is_not_classical() {
        let sc = extract(&QUBIT, |c, q| c.hadamard(q)).unwrap();
        let e = sim_classical(&sc.circuit, &[false]).unwrap_err();
        assert!(matches!(e, SimError::NotClassical(Location(None))));
        let sc = extract(&QUBIT, |c, q| {
            let q = c.hadamard(q)?;
            c.qterm(q, false)?;
            Ok(())
        })
        .unwrap();
        let e = sim_classical(&sc.circuit, &[false]).unwrap_err();
        assert!(matches!(e, SimError::NotClassical(Location(Some(GateRef { index: 1, .. })))));
    }

    #[test]
    fn t_is_not_clifford() {
        let sc = extract(&QUBIT, |c, q| c.gate_t(q)).unwrap();
        let e = sim_stabilizer(&sc.circuit, &[false], &mut Rng::new(1)).unwrap_err();
        assert!(matches!(e, SimError::NotClifford(_)));
    }

    #[test]
    fn bell_outcomes_agree() {
        let c = bell();
        let mut rng = Rng::new(3);
        let mut zeros = 0;
        for _ in 0..1000 {
            let out = sim_stabilizer(&c, &[], &mut rng).unwrap();
            assert_eq!(out[0], out[1]);
            zeros += usize::from(!out[0]);
        }
        assert!((450..=550).contains(&zeros), "{zeros}");
    }

    #[test]
    fn engines_share_random_stream() {
        let c = bell();
        for seed in 0..20 {
            let s = sim_stabilizer(&c, &[], &mut Rng::new(seed)).unwrap();
            let v = sim_vector(&c, &[], &mut Rng::new(seed)).unwrap();
            assert_eq!(s, v);
        }
    }

    #[test]
    fn double_hadamard_measures_zero() {
        let sc = extract(&(), |c, ()| {
            let q = c.qinit(false)?;
            let q = c.hadamard(q)?;
            let q = c.hadamard(q)?;
            c.measure(q)
        })
        .unwrap();
        for seed in 0..50 {
            assert_eq!(sim_stabilizer(&sc.circuit, &[], &mut Rng::new(seed)).unwrap(), vec![false]);
        }
    }

    #[test]
    fn classical_control_gates_quantum_op() {
        let sc = extract(&(QUBIT, crate::builder::BIT), |c, (q, b)| {
            c.gate(NamedGate::X, q, &[b.ctrl()])?;
            Ok((q, b))
        })
        .unwrap();
        for sim in [Simulator::Classical, Simulator::Stabilizer, Simulator::Vector] {
            let mut rng = Rng::new(0);
            assert_eq!(simulate(sim, &sc.circuit, &[false, true], &mut rng).unwrap(), vec![true, true]);
            assert_eq!(simulate(sim, &sc.circuit, &[false, false], &mut rng).unwrap(), vec![false, false]);
        }
    }

    #[test]
    fn bad_assertion_fails_everywhere() {
        let sc = extract(&QUBIT, |c, q| c.qterm(q, false)).unwrap();
        for sim in [Simulator::Classical, Simulator::Stabilizer, Simulator::Vector] {
            let e = simulate(sim, &sc.circuit, &[true], &mut Rng::new(0)).unwrap_err();
            assert!(e.is_assertion(), "{sim:?}");
        }
        let plus = extract(&QUBIT, |c, q| {
            let q = c.hadamard(q)?;
            c.qterm(q, false)
        })
        .unwrap();
        assert!(sim_stabilizer(&plus.circuit, &[false], &mut Rng::new(0)).unwrap_err().is_assertion());
        assert!(sim_vector(&plus.circuit, &[false], &mut Rng::new(0)).unwrap_err().is_assertion());
    }

    #[test]
    fn calls_are_expanded() {
        let sc = extract(&QUBIT, |c: &mut Circ, q: Qubit| {
            c.boxed_repeated("flip", 3, q, |c, q| c.qnot(q))
        })
        .unwrap();
        assert_eq!(sim_classical(&sc.circuit, &[false]).unwrap(), vec![true]);
        let rev = sc.circuit.reversed().unwrap();
        assert_eq!(sim_classical(&rev, &[true]).unwrap(), vec![false]);
    }

    #[test]
    fn unitary_of_cnot() {
        let sc = extract(&(QUBIT, QUBIT), |c, (a, b)| {
            let (b, a) = c.controlled_not(b, a)?;
            Ok((a, b))
        })
        .unwrap();
        let u = circuit_unitary(&sc.circuit).unwrap();
        let want = Matrix::from_fn(4, 4, |r, col| {
            let t = match col {
                2 => 3,
                3 => 2,
                x => x,
            };
            c64(if r == t { 1.0 } else { 0.0 }, 0.0)
        });
        assert!(u.max_diff(&want) < 1e-12);
    }

    #[test]
    fn too_many_qubits() {
        let sc = extract(&(), |c, ()| {
            let qs = (0..21).map(|_| c.qinit(false)).collect::<Result<Vec<_>, _>>()?;
            Ok(qs)
        })
        .unwrap();
        let e = sim_vector(&sc.circuit, &[], &mut Rng::new(0)).unwrap_err();
        assert!(matches!(e, SimError::TooManyQubits { limit: 20, .. }));
    }
}
