//! Circuit intermediate representation.
//!
//! A [`Circuit`] is a main [`Body`] plus a flat namespace of named subroutine
//! bodies. Bodies are ordered gate lists over typed wires; wires come into
//! scope as inputs, through `QInit`/`CInit`, or as fresh outputs of a
//! subroutine call, and leave scope through `QTerm`/`CDiscard` (or by being
//! consumed by a call). Wire identifiers are never reused within a body.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

mod text;
pub(crate) mod walk;

pub use text::{parse, serialize, ParseError};
pub use walk::GateRef;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WireId(pub u64);

impl fmt::Display for WireId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum WireKind {
    Quantum,
    Classical,
}

impl fmt::Display for WireKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WireKind::Quantum => f.write_str("Qbit"),
            WireKind::Classical => f.write_str("Cbit"),
        }
    }
}

/// A wire together with its kind, as it appears in input and output lists.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Endpoint {
    pub wire: WireId,
    pub kind: WireKind,
}

impl Endpoint {
    pub fn new(wire: WireId, kind: WireKind) -> Self {
        Endpoint { wire, kind }
    }

    pub fn quantum(wire: u64) -> Self {
        Endpoint::new(WireId(wire), WireKind::Quantum)
    }

    pub fn classical(wire: u64) -> Self {
        Endpoint::new(WireId(wire), WireKind::Classical)
    }
}

/// A control on a gate. A positive control fires on 1 / |1⟩, a negative one
/// on 0 / |0⟩.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Control {
    pub wire: WireId,
    pub positive: bool,
}

impl Control {
    pub fn pos(wire: WireId) -> Self {
        Control { wire, positive: true }
    }

    pub fn neg(wire: WireId) -> Self {
        Control { wire, positive: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum NamedGate {
    H,
    X,
    Y,
    Z,
    S,
    T,
}

impl NamedGate {
    pub const ALL: [NamedGate; 6] = [
        NamedGate::H,
        NamedGate::X,
        NamedGate::Y,
        NamedGate::Z,
        NamedGate::S,
        NamedGate::T,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NamedGate::H => "H",
            NamedGate::X => "X",
            NamedGate::Y => "Y",
            NamedGate::Z => "Z",
            NamedGate::S => "S",
            NamedGate::T => "T",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        NamedGate::ALL.into_iter().find(|g| g.name() == name)
    }

    /// H, X, Y and Z are their own inverses; S and T are not.
    pub fn is_self_inverse(self) -> bool {
        !matches!(self, NamedGate::S | NamedGate::T)
    }
}

impl fmt::Display for NamedGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    QInit(bool),
    /// Assertive termination: the wire is asserted to hold the given value.
    QTerm(bool),
    CInit(bool),
    CDiscard,
    Named(NamedGate),
    /// `RGate(m)` is `diag(1, exp(2πi / 2^m))`.
    RGate(u32),
    Measure,
    Comment {
        text: String,
        labels: Vec<(WireId, String)>,
    },
    SubCall {
        name: String,
        inputs: Vec<WireId>,
        outputs: Vec<WireId>,
        repetitions: u64,
    },
}

impl GateKind {
    pub fn mnemonic(&self) -> &'static str {
        match self {
            GateKind::QInit(_) => "QInit",
            GateKind::QTerm(_) => "QTerm",
            GateKind::CInit(_) => "CInit",
            GateKind::CDiscard => "CDiscard",
            GateKind::Named(_) => "QGate",
            GateKind::RGate(_) => "QRot",
            GateKind::Measure => "QMeas",
            GateKind::Comment { .. } => "Comment",
            GateKind::SubCall { .. } => "Call",
        }
    }

    fn is_unitary(&self) -> bool {
        matches!(self, GateKind::Named(_) | GateKind::RGate(_))
    }
}

/// One instruction of a circuit body.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub operands: Vec<WireId>,
    pub controls: Vec<Control>,
    pub inverted: bool,
}

impl Gate {
    fn single(kind: GateKind, wire: WireId) -> Self {
        Gate { kind, operands: vec![wire], controls: Vec::new(), inverted: false }
    }

    pub fn qinit(wire: WireId, value: bool) -> Self {
        Gate::single(GateKind::QInit(value), wire)
    }

    pub fn qterm(wire: WireId, assertion: bool) -> Self {
        Gate::single(GateKind::QTerm(assertion), wire)
    }

    pub fn cinit(wire: WireId, value: bool) -> Self {
        Gate::single(GateKind::CInit(value), wire)
    }

    pub fn cdiscard(wire: WireId) -> Self {
        Gate::single(GateKind::CDiscard, wire)
    }

    pub fn named(gate: NamedGate, wire: WireId) -> Self {
        Gate::single(GateKind::Named(gate), wire)
    }

    pub fn rgate(m: u32, wire: WireId) -> Self {
        Gate::single(GateKind::RGate(m), wire)
    }

    pub fn measure(wire: WireId) -> Self {
        Gate::single(GateKind::Measure, wire)
    }

    pub fn comment(text: impl Into<String>, labels: Vec<(WireId, String)>) -> Self {
        Gate {
            kind: GateKind::Comment { text: text.into(), labels },
            operands: Vec::new(),
            controls: Vec::new(),
            inverted: false,
        }
    }

    pub fn call(
        name: impl Into<String>,
        inputs: Vec<WireId>,
        outputs: Vec<WireId>,
        repetitions: u64,
    ) -> Self {
        Gate {
            kind: GateKind::SubCall { name: name.into(), inputs, outputs, repetitions },
            operands: Vec::new(),
            controls: Vec::new(),
            inverted: false,
        }
    }

    pub fn with_controls(mut self, controls: impl IntoIterator<Item = Control>) -> Self {
        self.controls.extend(controls);
        self
    }

    pub fn with_inverse(mut self, inverted: bool) -> Self {
        self.inverted = inverted;
        self
    }

    /// The single operand of a one-operand gate.
    pub fn target(&self) -> Option<WireId> {
        match self.operands.as_slice() {
            [w] => Some(*w),
            _ => None,
        }
    }

    pub fn is_comment(&self) -> bool {
        matches!(self.kind, GateKind::Comment { .. })
    }

    /// Every wire the gate reads or writes, controls included. Comment labels
    /// are not counted.
    pub fn wires(&self) -> Vec<WireId> {
        let mut out: Vec<WireId> = self.operands.clone();
        if let GateKind::SubCall { inputs, outputs, .. } = &self.kind {
            out.extend(inputs);
            out.extend(outputs.iter().filter(|w| !inputs.contains(w)));
        }
        out.extend(self.controls.iter().map(|c| c.wire));
        out
    }

    /// The gate that undoes this one.
    ///
    /// `QInit(b)` and `QTerm(b)` swap, S/T/RGate toggle the inverse flag,
    /// self-inverse gates and comments are returned unchanged, and a call
    /// becomes a call of the reversed subroutine with its wire lists swapped.
    pub fn inverse(&self) -> Result<Gate, NotInvertible> {
        let mut g = self.clone();
        match &self.kind {
            GateKind::QInit(b) => g.kind = GateKind::QTerm(*b),
            GateKind::QTerm(b) => g.kind = GateKind::QInit(*b),
            GateKind::Named(n) if n.is_self_inverse() => {}
            GateKind::Named(_) | GateKind::RGate(_) => g.inverted = !self.inverted,
            GateKind::Comment { .. } => {}
            GateKind::SubCall { name, inputs, outputs, repetitions } => {
                g.kind = GateKind::SubCall {
                    name: name.clone(),
                    inputs: outputs.clone(),
                    outputs: inputs.clone(),
                    repetitions: *repetitions,
                };
                g.inverted = !self.inverted;
            }
            GateKind::CInit(_) | GateKind::CDiscard | GateKind::Measure => {
                return Err(NotInvertible(self.kind.mnemonic()))
            }
        }
        Ok(g)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
#[error("gate {0} is not invertible")]
pub struct NotInvertible(pub &'static str);

/// An ordered gate list between typed input and output wires.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Body {
    pub inputs: Vec<Endpoint>,
    pub gates: Vec<Gate>,
    pub outputs: Vec<Endpoint>,
}

impl Body {
    pub fn new(inputs: Vec<Endpoint>, gates: Vec<Gate>, outputs: Vec<Endpoint>) -> Self {
        Body { inputs, gates, outputs }
    }

    pub fn input_kinds(&self) -> Vec<WireKind> {
        self.inputs.iter().map(|e| e.kind).collect()
    }

    pub fn output_kinds(&self) -> Vec<WireKind> {
        self.outputs.iter().map(|e| e.kind).collect()
    }

    /// Gate-reversed, gate-inverted body with inputs and outputs swapped.
    pub fn reversed(&self) -> Result<Body, NotInvertible> {
        let gates = self
            .gates
            .iter()
            .rev()
            .map(Gate::inverse)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Body { inputs: self.outputs.clone(), gates, outputs: self.inputs.clone() })
    }

    /// Largest wire id mentioned anywhere in the body.
    pub fn max_wire(&self) -> Option<WireId> {
        let io = self.inputs.iter().chain(&self.outputs).map(|e| e.wire);
        let gates = self.gates.iter().flat_map(|g| {
            let mut ws = g.wires();
            if let GateKind::Comment { labels, .. } = &g.kind {
                ws.extend(labels.iter().map(|(w, _)| *w));
            }
            ws
        });
        io.chain(gates).max()
    }
}

/// A main body plus the subroutines it (transitively) calls.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    pub main: Body,
    pub subroutines: BTreeMap<String, Body>,
}

impl Circuit {
    pub fn new(main: Body) -> Self {
        Circuit { main, subroutines: BTreeMap::new() }
    }

    pub fn inputs(&self) -> &[Endpoint] {
        &self.main.inputs
    }

    pub fn outputs(&self) -> &[Endpoint] {
        &self.main.outputs
    }

    pub fn gates(&self) -> &[Gate] {
        &self.main.gates
    }

    /// Reverses the main body. Subroutines are shared: calls in the reversed
    /// body refer to them with the inverse flag toggled.
    pub fn reversed(&self) -> Result<Circuit, NotInvertible> {
        Ok(Circuit { main: self.main.reversed()?, subroutines: self.subroutines.clone() })
    }

    pub fn validate(&self) -> Result<(), ValidityError> {
        for (name, body) in &self.subroutines {
            validate_body(body, &self.subroutines)
                .map_err(|e| e.in_subroutine(name))?;
        }
        check_acyclic(&self.subroutines)?;
        validate_body(&self.main, &self.subroutines)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ValidityErrorKind {
    #[error("wire {0} is not live")]
    DeadWire(WireId),
    #[error("wire {0} appears twice or is reused")]
    DuplicateWire(WireId),
    #[error("wire {wire} has the wrong kind (expected {expected})")]
    KindMismatch { wire: WireId, expected: WireKind },
    #[error("classical operation controlled by quantum wire {0}")]
    QuantumControlOnClassicalOp(WireId),
    #[error("unknown subroutine {0:?}")]
    UnknownSubroutine(String),
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("subroutine {0:?} calls itself")]
    SubroutineCycle(String),
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("outputs do not match the live wires")]
    OutputMismatch,
}

/// The first violated rule, with the offending gate (if any).
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct ValidityError {
    pub subroutine: Option<String>,
    pub gate: Option<usize>,
    pub kind: ValidityErrorKind,
}

impl ValidityError {
    fn at(gate: usize, kind: ValidityErrorKind) -> Self {
        ValidityError { subroutine: None, gate: Some(gate), kind }
    }

    fn in_subroutine(mut self, name: &str) -> Self {
        self.subroutine.get_or_insert_with(|| name.to_string());
        self
    }
}

impl fmt::Display for ValidityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(g) = self.gate {
            write!(f, "gate {g}")?;
        } else {
            f.write_str("circuit")?;
        }
        if let Some(s) = &self.subroutine {
            write!(f, " of subroutine {s:?}")?;
        }
        write!(f, ": {}", self.kind)
    }
}

/// Liveness bookkeeping shared by the validator and the builder.
#[derive(Debug, Default)]
pub(crate) struct WireTracker {
    live: HashMap<WireId, WireKind>,
    // None when freshness is guaranteed by the caller (the builder allocates
    // monotonically and never needs to remember dead wires).
    seen: Option<HashSet<WireId>>,
}

impl WireTracker {
    pub(crate) fn checking_reuse() -> Self {
        WireTracker { live: HashMap::new(), seen: Some(HashSet::new()) }
    }

    pub(crate) fn trusting() -> Self {
        WireTracker::default()
    }

    pub(crate) fn kind_of(&self, wire: WireId) -> Option<WireKind> {
        self.live.get(&wire).copied()
    }

    pub(crate) fn live_count(&self) -> usize {
        self.live.len()
    }

    pub(crate) fn live(&self) -> impl Iterator<Item = (WireId, WireKind)> + '_ {
        self.live.iter().map(|(w, k)| (*w, *k))
    }

    pub(crate) fn bring(&mut self, e: Endpoint) -> Result<(), ValidityErrorKind> {
        let reused = self.live.contains_key(&e.wire)
            || self.seen.as_ref().is_some_and(|s| s.contains(&e.wire));
        if reused {
            return Err(ValidityErrorKind::DuplicateWire(e.wire));
        }
        if let Some(s) = &mut self.seen {
            s.insert(e.wire);
        }
        self.live.insert(e.wire, e.kind);
        Ok(())
    }

    fn expect(&self, wire: WireId, kind: WireKind) -> Result<(), ValidityErrorKind> {
        match self.live.get(&wire) {
            None => Err(ValidityErrorKind::DeadWire(wire)),
            Some(k) if *k != kind => Err(ValidityErrorKind::KindMismatch { wire, expected: kind }),
            Some(_) => Ok(()),
        }
    }

    /// Checks `gate` against the current live set and applies its effect.
    pub(crate) fn apply(
        &mut self,
        gate: &Gate,
        subroutines: &BTreeMap<String, Body>,
    ) -> Result<(), ValidityErrorKind> {
        use ValidityErrorKind as E;

        // No wire may appear twice among operands, call inputs and controls.
        let mut used: Vec<WireId> = gate.operands.clone();
        if let GateKind::SubCall { inputs, .. } = &gate.kind {
            used.extend(inputs);
        }
        used.extend(gate.controls.iter().map(|c| c.wire));
        let mut distinct = HashSet::with_capacity(used.len());
        for w in &used {
            if !distinct.insert(*w) {
                return Err(E::DuplicateWire(*w));
            }
        }

        let want_operands = match gate.kind {
            GateKind::Comment { .. } | GateKind::SubCall { .. } => 0,
            _ => 1,
        };
        if gate.operands.len() != want_operands {
            return Err(E::ArityMismatch(format!(
                "{} takes {want_operands} operand(s), got {}",
                gate.kind.mnemonic(),
                gate.operands.len()
            )));
        }

        for c in &gate.controls {
            if !self.live.contains_key(&c.wire) {
                return Err(E::DeadWire(c.wire));
            }
        }
        if matches!(gate.kind, GateKind::CInit(_) | GateKind::CDiscard) {
            if let Some(c) = gate.controls.iter().find(|c| self.live[&c.wire] == WireKind::Quantum) {
                return Err(E::QuantumControlOnClassicalOp(c.wire));
            }
        }
        if !gate.controls.is_empty() && !gate.kind.is_unitary() {
            return Err(E::InvalidGate(format!("{} cannot be controlled", gate.kind.mnemonic())));
        }
        if gate.inverted && !matches!(gate.kind, GateKind::Named(_) | GateKind::RGate(_) | GateKind::SubCall { .. }) {
            return Err(E::InvalidGate(format!("{} has no inverse form", gate.kind.mnemonic())));
        }

        match &gate.kind {
            GateKind::QInit(_) => self.bring(Endpoint::new(gate.operands[0], WireKind::Quantum))?,
            GateKind::CInit(_) => self.bring(Endpoint::new(gate.operands[0], WireKind::Classical))?,
            GateKind::QTerm(_) => {
                self.expect(gate.operands[0], WireKind::Quantum)?;
                self.live.remove(&gate.operands[0]);
            }
            GateKind::CDiscard => {
                self.expect(gate.operands[0], WireKind::Classical)?;
                self.live.remove(&gate.operands[0]);
            }
            GateKind::Named(_) => self.expect(gate.operands[0], WireKind::Quantum)?,
            GateKind::RGate(m) => {
                if *m == 0 {
                    return Err(E::InvalidGate("rotation order must be at least 1".into()));
                }
                self.expect(gate.operands[0], WireKind::Quantum)?;
            }
            GateKind::Measure => {
                self.expect(gate.operands[0], WireKind::Quantum)?;
                self.live.insert(gate.operands[0], WireKind::Classical);
            }
            GateKind::Comment { labels, .. } => {
                for (w, _) in labels {
                    if !self.live.contains_key(w) {
                        return Err(E::DeadWire(*w));
                    }
                }
            }
            GateKind::SubCall { name, inputs, outputs, repetitions } => {
                let body = subroutines
                    .get(name)
                    .ok_or_else(|| E::UnknownSubroutine(name.clone()))?;
                let (ins, outs) = if gate.inverted {
                    (body.output_kinds(), body.input_kinds())
                } else {
                    (body.input_kinds(), body.output_kinds())
                };
                if *repetitions == 0 {
                    return Err(E::InvalidGate("repetition count must be positive".into()));
                }
                if inputs.len() != ins.len() || outputs.len() != outs.len() {
                    return Err(E::ArityMismatch(format!(
                        "{name:?} expects {} -> {} wires, call has {} -> {}",
                        ins.len(),
                        outs.len(),
                        inputs.len(),
                        outputs.len()
                    )));
                }
                if *repetitions > 1 && ins != outs {
                    return Err(E::ArityMismatch(format!(
                        "repeated call of {name:?} needs matching input and output types"
                    )));
                }
                for (w, k) in inputs.iter().zip(&ins) {
                    self.expect(*w, *k)?;
                }
                for w in inputs {
                    self.live.remove(w);
                }
                let mut fresh = HashSet::with_capacity(outputs.len());
                for (w, k) in outputs.iter().zip(&outs) {
                    if !fresh.insert(*w) {
                        return Err(E::DuplicateWire(*w));
                    }
                    if inputs.contains(w) {
                        self.live.insert(*w, *k);
                    } else {
                        self.bring(Endpoint::new(*w, *k))?;
                    }
                }
            }
        }
        Ok(())
    }

    /// Checks that `outputs` is exactly the live set.
    pub(crate) fn finish(&self, outputs: &[Endpoint]) -> Result<(), ValidityErrorKind> {
        if outputs.len() != self.live.len() {
            return Err(ValidityErrorKind::OutputMismatch);
        }
        let mut distinct = HashSet::with_capacity(outputs.len());
        for e in outputs {
            if self.live.get(&e.wire) != Some(&e.kind) || !distinct.insert(e.wire) {
                return Err(ValidityErrorKind::OutputMismatch);
            }
        }
        Ok(())
    }
}

fn validate_body(body: &Body, subroutines: &BTreeMap<String, Body>) -> Result<(), ValidityError> {
    let mut tracker = WireTracker::checking_reuse();
    for e in &body.inputs {
        tracker.bring(*e).map_err(|kind| ValidityError { subroutine: None, gate: None, kind })?;
    }
    for (i, g) in body.gates.iter().enumerate() {
        tracker.apply(g, subroutines).map_err(|k| ValidityError::at(i, k))?;
    }
    tracker
        .finish(&body.outputs)
        .map_err(|kind| ValidityError { subroutine: None, gate: None, kind })
}

fn callees(body: &Body) -> impl Iterator<Item = &str> {
    body.gates.iter().filter_map(|g| match &g.kind {
        GateKind::SubCall { name, .. } => Some(name.as_str()),
        _ => None,
    })
}

fn check_acyclic(subroutines: &BTreeMap<String, Body>) -> Result<(), ValidityError> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Active,
        Done,
    }
    fn visit<'a>(
        name: &'a str,
        subs: &'a BTreeMap<String, Body>,
        marks: &mut HashMap<&'a str, Mark>,
    ) -> Result<(), ValidityError> {
        match marks.get(name) {
            Some(Mark::Done) => return Ok(()),
            Some(Mark::Active) => {
                return Err(ValidityError {
                    subroutine: Some(name.to_string()),
                    gate: None,
                    kind: ValidityErrorKind::SubroutineCycle(name.to_string()),
                })
            }
            None => {}
        }
        marks.insert(name, Mark::Active);
        if let Some(body) = subs.get(name) {
            for callee in callees(body) {
                visit(callee, subs, marks)?;
            }
        }
        marks.insert(name, Mark::Done);
        Ok(())
    }
    let mut marks = HashMap::new();
    for name in subroutines.keys() {
        visit(name, subroutines, &mut marks)?;
    }
    Ok(())
}
