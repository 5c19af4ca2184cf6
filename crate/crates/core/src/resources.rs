//! Gate, width and ancilla counts.
//!
//! [`count`] works hierarchically: each subroutine is counted once and a
//! call contributes its callee's counts times the repetition count, so a
//! circuit is counted in time proportional to the text of its distinct
//! bodies rather than to its flattened size.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigUint;
use thiserror::Error;

use crate::builder::{GateSink, SinkError};
use crate::ir::walk::{GateRef, Visitor, WalkError, Walker};
use crate::ir::{Body, Circuit, Endpoint, Gate, GateKind, NamedGate, NotInvertible, ValidityError};

/// The bucket a gate is counted in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GateClass {
    QInit,
    QTerm,
    CInit,
    CDiscard,
    Measure,
    /// `inverted` is always false for self-inverse gates.
    Named { gate: NamedGate, inverted: bool, controls: usize },
    Rotation { m: u32, inverted: bool, controls: usize },
}

impl GateClass {
    /// `None` for comments and calls.
    pub fn of(g: &Gate) -> Option<GateClass> {
        let controls = g.controls.len();
        Some(match &g.kind {
            GateKind::QInit(_) => GateClass::QInit,
            GateKind::QTerm(_) => GateClass::QTerm,
            GateKind::CInit(_) => GateClass::CInit,
            GateKind::CDiscard => GateClass::CDiscard,
            GateKind::Measure => GateClass::Measure,
            GateKind::Named(n) => GateClass::Named {
                gate: *n,
                inverted: g.inverted && !n.is_self_inverse(),
                controls,
            },
            GateKind::RGate(m) => GateClass::Rotation { m: *m, inverted: g.inverted, controls },
            GateKind::Comment { .. } | GateKind::SubCall { .. } => return None,
        })
    }

    /// The class of this gate's inverse, as seen when the enclosing body is
    /// run backwards.
    fn inverse(self) -> GateClass {
        match self {
            GateClass::QInit => GateClass::QTerm,
            GateClass::QTerm => GateClass::QInit,
            GateClass::Named { gate, inverted, controls } => GateClass::Named {
                gate,
                inverted: !inverted && !gate.is_self_inverse(),
                controls,
            },
            GateClass::Rotation { m, inverted, controls } => GateClass::Rotation { m, inverted: !inverted, controls },
            other => other,
        }
    }
}

impl fmt::Display for GateClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (controls, inverted) = match *self {
            GateClass::QInit => return f.write_str("QInit"),
            GateClass::QTerm => return f.write_str("QTerm"),
            GateClass::CInit => return f.write_str("CInit"),
            GateClass::CDiscard => return f.write_str("CDiscard"),
            GateClass::Measure => return f.write_str("Measure"),
            GateClass::Named { gate, inverted, controls } => {
                f.write_str(gate.name())?;
                (controls, inverted)
            }
            GateClass::Rotation { m, inverted, controls } => {
                write!(f, "R({m})")?;
                (controls, inverted)
            }
        };
        if inverted {
            f.write_str("*")?;
        }
        match controls {
            0 => Ok(()),
            1 => f.write_str(", 1 control"),
            n => write!(f, ", {n} controls"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ResourceReport {
    pub gates: BTreeMap<GateClass, BigUint>,
    /// Most wires live at once, inputs included.
    pub max_width: usize,
}

impl ResourceReport {
    pub fn total(&self) -> BigUint {
        self.gates.values().sum()
    }

    pub fn get(&self, class: GateClass) -> BigUint {
        self.gates.get(&class).cloned().unwrap_or_default()
    }

    /// Number of qubits initialized inside the circuit.
    pub fn ancillas(&self) -> BigUint {
        self.get(GateClass::QInit)
    }

    pub fn measurements(&self) -> BigUint {
        self.get(GateClass::Measure)
    }

    fn inverse(&self) -> ResourceReport {
        let mut gates = BTreeMap::new();
        for (c, n) in &self.gates {
            *gates.entry(c.inverse()).or_default() += n;
        }
        ResourceReport { gates, max_width: self.max_width }
    }
}

impl fmt::Display for ResourceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<(String, String)> = self.gates.iter().map(|(c, n)| (c.to_string(), n.to_string())).collect();
        let left = rows.iter().map(|r| r.0.len()).max().unwrap_or(0).max("total".len());
        let right = rows.iter().map(|r| r.1.len()).max().unwrap_or(0).max(self.total().to_string().len());
        for (c, n) in &rows {
            writeln!(f, "{c:<left$}  {n:>right$}")?;
        }
        writeln!(f, "{:<left$}  {:>right$}", "total", self.total().to_string())?;
        writeln!(f, "max width: {}", self.max_width)?;
        writeln!(f, "ancillas: {}", self.ancillas())?;
        write!(f, "measurements: {}", self.measurements())
    }
}

/// Running counts over one body.
#[derive(Debug)]
struct Tally {
    gates: BTreeMap<GateClass, BigUint>,
    live: usize,
    peak: usize,
}

impl Tally {
    fn new(inputs: usize) -> Self {
        Tally { gates: BTreeMap::new(), live: inputs, peak: inputs }
    }

    fn add(&mut self, g: &Gate, callee: impl FnOnce(&str) -> Option<ResourceReport>) {
        let one = |t: &mut Tally, c: GateClass| {
            *t.gates.entry(c).or_default() += 1u32;
        };
        match &g.kind {
            GateKind::Comment { .. } => {}
            GateKind::SubCall { name, inputs, outputs, repetitions } => {
                let Some(r) = callee(name) else { return };
                let r = if g.inverted { r.inverse() } else { r };
                let reps = BigUint::from(*repetitions);
                if *repetitions > 0 {
                    for (c, n) in r.gates {
                        *self.gates.entry(c).or_default() += n * &reps;
                    }
                    let base = self.live - inputs.len();
                    self.peak = self.peak.max(base + r.max_width);
                }
                self.live = self.live - inputs.len() + outputs.len();
            }
            kind => {
                one(self, GateClass::of(g).expect("counted gate"));
                match kind {
                    GateKind::QInit(_) | GateKind::CInit(_) => {
                        self.live += 1;
                        self.peak = self.peak.max(self.live);
                    }
                    GateKind::QTerm(_) | GateKind::CDiscard => self.live -= 1,
                    _ => {}
                }
            }
        }
    }

    fn finish(self) -> ResourceReport {
        ResourceReport { gates: self.gates, max_width: self.peak }
    }
}

fn count_body(body: &Body, reports: &HashMap<String, ResourceReport>) -> ResourceReport {
    let mut t = Tally::new(body.inputs.len());
    for g in &body.gates {
        t.add(g, |name| reports.get(name).cloned());
    }
    t.finish()
}

/// Counts a circuit hierarchically. The circuit should be valid; calls to
/// unknown subroutines count as nothing.
pub fn count(c: &Circuit) -> ResourceReport {
    let mut reports: HashMap<String, ResourceReport> = HashMap::new();
    let mut pending: Vec<&String> = c.subroutines.keys().collect();
    // Dependencies first; a cycle (invalid anyway) is counted as far as it goes.
    while !pending.is_empty() {
        let before = pending.len();
        pending.retain(|name| {
            let body = &c.subroutines[*name];
            let ready = body.gates.iter().all(|g| match &g.kind {
                GateKind::SubCall { name: callee, .. } => {
                    reports.contains_key(callee) || !c.subroutines.contains_key(callee)
                }
                _ => true,
            });
            if ready {
                let r = count_body(body, &reports);
                reports.insert((*name).clone(), r);
            }
            !ready
        });
        if pending.len() == before {
            break;
        }
    }
    count_body(&c.main, &reports)
}

/// A [`GateSink`] that counts a circuit as it is generated, holding no gates.
#[derive(Debug, Default)]
pub struct Counter {
    reports: HashMap<String, ResourceReport>,
    tally: Option<Tally>,
    seen: u64,
}

impl Counter {
    pub fn new() -> Self {
        Counter::default()
    }

    /// Gates received directly (calls count as one).
    pub fn gates_seen(&self) -> u64 {
        self.seen
    }

    pub fn report(&self) -> ResourceReport {
        match &self.tally {
            Some(t) => ResourceReport { gates: t.gates.clone(), max_width: t.peak },
            None => ResourceReport::default(),
        }
    }
}

impl GateSink for Counter {
    fn inputs(&mut self, inputs: &[Endpoint]) -> Result<(), SinkError> {
        self.tally = Some(Tally::new(inputs.len()));
        Ok(())
    }

    fn subroutine(&mut self, name: &str, body: &Body) -> Result<(), SinkError> {
        let r = count_body(body, &self.reports);
        self.reports.insert(name.to_string(), r);
        Ok(())
    }

    fn gate(&mut self, gate: Gate) -> Result<(), SinkError> {
        self.seen += 1;
        let reports = &self.reports;
        self.tally.get_or_insert_with(|| Tally::new(0)).add(&gate, |name| reports.get(name).cloned());
        Ok(())
    }
}

/// Default limit on the number of gates [`flatten`] will produce.
pub const DEFAULT_FLATTEN_BOUND: u64 = 10_000_000;

#[derive(Debug, Error)]
pub enum FlattenError {
    #[error("flattened circuit would exceed {bound} gates")]
    SizeBound { bound: u64 },
    #[error("invalid circuit: {0}")]
    Invalid(#[from] ValidityError),
    #[error("{at}: {source}")]
    NotInvertible { at: GateRef, source: NotInvertible },
}

struct Gather {
    gates: Vec<Gate>,
    bound: u64,
}

impl Visitor for Gather {
    type Error = FlattenError;

    fn visit(&mut self, gate: Gate) -> Result<(), FlattenError> {
        if self.gates.len() as u64 >= self.bound {
            return Err(FlattenError::SizeBound { bound: self.bound });
        }
        self.gates.push(gate);
        Ok(())
    }
}

/// Inlines calls up to `depth` levels deep (`None` for all of them), with
/// the default size bound.
pub fn flatten(c: &Circuit, depth: Option<usize>) -> Result<Circuit, FlattenError> {
    flatten_with_bound(c, depth, DEFAULT_FLATTEN_BOUND)
}

/// Inlines calls up to `depth` levels deep. Main-body wires keep their
/// ids; inlined wires get fresh ones. Subroutines still called afterwards
/// are kept.
pub fn flatten_with_bound(c: &Circuit, depth: Option<usize>, bound: u64) -> Result<Circuit, FlattenError> {
    c.validate()?;
    if depth.is_none() && count(c).total() > BigUint::from(bound) {
        return Err(FlattenError::SizeBound { bound });
    }
    let mut gather = Gather { gates: Vec::new(), bound };
    let outputs = Walker::new(c).with_depth_limit(depth).run(&mut gather).map_err(|e| match e {
        WalkError::Visit(_, e) => e,
        WalkError::NotInvertible(at, source) => FlattenError::NotInvertible { at, source },
    })?;
    let main = Body::new(c.main.inputs.clone(), gather.gates, outputs);

    let mut keep = BTreeSet::new();
    let mut stack: Vec<&Body> = vec![&main];
    while let Some(b) = stack.pop() {
        for g in &b.gates {
            if let GateKind::SubCall { name, .. } = &g.kind {
                if keep.insert(name.clone()) {
                    stack.push(&c.subroutines[name]);
                }
            }
        }
    }
    let subroutines = keep.into_iter().map(|n| {
        let b = c.subroutines[&n].clone();
        (n, b)
    });
    Ok(Circuit { main, subroutines: subroutines.collect() })
}
