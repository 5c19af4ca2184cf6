//! Gate-by-gate circuit rewriting.
//!
//! A [`Transformer`] replaces each gate by a sequence of gates, possibly
//! over fresh ancilla wires. [`transform`] applies one to a whole circuit
//! (each subroutine body once, calls left in place); [`TransformSink`]
//! applies one to a circuit while it is being generated.

mod decompose;

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::builder::{GateSink, SinkError};
use crate::ir::walk::Renamer;
use crate::ir::{Body, Circuit, Endpoint, Gate, GateKind, GateRef, ValidityError, WireId, WireKind};

pub use decompose::{decompose, decompose_binary, decompose_toffoli, Decompose, GateSet};

#[derive(Debug, Error)]
pub enum TransformError {
    #[error("no rule for gate {0}")]
    UnsupportedGate(String),
    #[error("invalid circuit: {0}")]
    Invalid(#[from] ValidityError),
    #[error("gate sink failed: {0}")]
    Sink(SinkError),
}

/// A per-gate rewrite rule.
pub trait Transformer {
    /// Emits the replacement for `gate`, whose wires are already in the
    /// output numbering.
    fn rewrite(&mut self, gate: Gate, out: &mut Emitter<'_>) -> Result<(), TransformError>;
}

/// Where a rule writes its gates.
pub struct Emitter<'a> {
    next: &'a mut u64,
    kinds: &'a HashMap<WireId, WireKind>,
    sink: &'a mut dyn GateSink,
    emitted: usize,
}

impl Emitter<'_> {
    /// A wire id unused anywhere else in the output body.
    pub fn fresh(&mut self) -> WireId {
        let w = WireId(*self.next);
        *self.next += 1;
        w
    }

    pub fn emit(&mut self, gate: Gate) -> Result<(), TransformError> {
        self.emitted += 1;
        self.sink.gate(gate).map_err(TransformError::Sink)
    }

    /// Kind of a wire that was live before the gate being rewritten.
    pub fn kind(&self, w: WireId) -> Option<WireKind> {
        self.kinds.get(&w).copied()
    }

    pub fn is_classical(&self, w: WireId) -> bool {
        self.kind(w) == Some(WireKind::Classical)
    }
}

/// Leaves every gate as it is.
#[derive(Clone, Copy, Debug, Default)]
pub struct Identity;

impl Transformer for Identity {
    fn rewrite(&mut self, gate: Gate, out: &mut Emitter<'_>) -> Result<(), TransformError> {
        out.emit(gate)
    }
}

/// Drops comments.
#[derive(Clone, Copy, Debug, Default)]
pub struct StripComments;

impl Transformer for StripComments {
    fn rewrite(&mut self, gate: Gate, out: &mut Emitter<'_>) -> Result<(), TransformError> {
        if gate.is_comment() {
            Ok(())
        } else {
            out.emit(gate)
        }
    }
}

type Signatures = HashMap<String, (Vec<WireKind>, Vec<WireKind>)>;

fn signature(body: &Body) -> (Vec<WireKind>, Vec<WireKind>) {
    (body.input_kinds(), body.output_kinds())
}

/// Applies `gate`'s effect on wire kinds.
fn track(kinds: &mut HashMap<WireId, WireKind>, gate: &Gate, sigs: &Signatures) {
    let op = gate.operands.first().copied();
    match &gate.kind {
        GateKind::QInit(_) => {
            kinds.insert(op.expect("operand"), WireKind::Quantum);
        }
        GateKind::CInit(_) | GateKind::Measure => {
            kinds.insert(op.expect("operand"), WireKind::Classical);
        }
        GateKind::QTerm(_) | GateKind::CDiscard => {
            kinds.remove(&op.expect("operand"));
        }
        GateKind::SubCall { name, inputs, outputs, .. } => {
            for w in inputs {
                kinds.remove(w);
            }
            if let Some((ins, outs)) = sigs.get(name) {
                let out_kinds = if gate.inverted { ins } else { outs };
                for (w, k) in outputs.iter().zip(out_kinds) {
                    kinds.insert(*w, *k);
                }
            }
        }
        _ => {}
    }
}

struct Collect(Vec<Gate>);

impl GateSink for Collect {
    fn gate(&mut self, gate: Gate) -> Result<(), SinkError> {
        self.0.push(gate);
        Ok(())
    }
}

fn transform_body(t: &mut dyn Transformer, body: &Body, sigs: &Signatures) -> Result<Body, TransformError> {
    let mut next = body.max_wire().map_or(0, |w| w.0 + 1);
    let mut kinds: HashMap<WireId, WireKind> = body.inputs.iter().map(|e| (e.wire, e.kind)).collect();
    let mut out = Collect(Vec::with_capacity(body.gates.len()));
    for g in &body.gates {
        let mut em = Emitter { next: &mut next, kinds: &kinds, sink: &mut out, emitted: 0 };
        t.rewrite(g.clone(), &mut em)?;
        track(&mut kinds, g, sigs);
    }
    Ok(Body::new(body.inputs.clone(), out.0, body.outputs.clone()))
}

/// Rewrites every gate of the main body and of each subroutine (once).
/// Wire ids of the input circuit are kept; ancillas get ids above them.
pub fn transform(t: &mut dyn Transformer, c: &Circuit) -> Result<Circuit, TransformError> {
    c.validate()?;
    let sigs: Signatures = c.subroutines.iter().map(|(n, b)| (n.clone(), signature(b))).collect();
    let mut subroutines = BTreeMap::new();
    for (name, body) in &c.subroutines {
        subroutines.insert(name.clone(), transform_body(t, body, &sigs)?);
    }
    let main = transform_body(t, &c.main, &sigs)?;
    let out = Circuit { main, subroutines };
    out.validate()?;
    Ok(out)
}

/// A [`GateSink`] that rewrites gates on their way to `down`.
///
/// Wires are renumbered densely in order of appearance, so the sink keeps
/// only a map over the currently live wires. Subroutine bodies arrive
/// whole and are transformed whole.
pub struct TransformSink<'a> {
    t: &'a mut dyn Transformer,
    down: &'a mut dyn GateSink,
    renamer: Renamer,
    next: u64,
    kinds: HashMap<WireId, WireKind>,
    sigs: Signatures,
    largest_expansion: usize,
}

impl<'a> TransformSink<'a> {
    pub fn new(t: &'a mut dyn Transformer, down: &'a mut dyn GateSink) -> Self {
        TransformSink {
            t,
            down,
            renamer: Renamer::new(),
            next: 0,
            kinds: HashMap::new(),
            sigs: HashMap::new(),
            largest_expansion: 0,
        }
    }

    /// Most gates produced for a single input gate so far.
    pub fn largest_expansion(&self) -> usize {
        self.largest_expansion
    }

    fn fresh(&mut self) -> WireId {
        let w = WireId(self.next);
        self.next += 1;
        w
    }

    fn rename(&self, es: &[Endpoint]) -> Vec<Endpoint> {
        es.iter().map(|e| Endpoint::new(self.renamer.get(e.wire), e.kind)).collect()
    }
}

impl GateSink for TransformSink<'_> {
    fn inputs(&mut self, inputs: &[Endpoint]) -> Result<(), SinkError> {
        for e in inputs {
            let w = self.fresh();
            self.renamer.bind(e.wire, w);
            self.kinds.insert(w, e.kind);
        }
        let renamed = self.rename(inputs);
        self.down.inputs(&renamed)
    }

    fn subroutine(&mut self, name: &str, body: &Body) -> Result<(), SinkError> {
        self.sigs.insert(name.to_string(), signature(body));
        let body = transform_body(self.t, body, &self.sigs)?;
        self.down.subroutine(name, &body)
    }

    fn gate(&mut self, gate: Gate) -> Result<(), SinkError> {
        let mut next = self.next;
        let g = self.renamer.translate(&gate, Some(&mut || {
            let w = WireId(next);
            next += 1;
            w
        }));
        self.next = next;
        let mut em = Emitter { next: &mut self.next, kinds: &self.kinds, sink: self.down, emitted: 0 };
        self.t.rewrite(g.clone(), &mut em)?;
        self.largest_expansion = self.largest_expansion.max(em.emitted);
        track(&mut self.kinds, &g, &self.sigs);
        Ok(())
    }

    fn outputs(&mut self, outputs: &[Endpoint]) -> Result<(), SinkError> {
        let renamed = self.rename(outputs);
        self.down.outputs(&renamed)
    }
}

/// Gates of `c` (main body and subroutines) touching more than `bound`
/// quantum wires. Classical controls are not counted.
pub fn arity_violations(c: &Circuit, bound: usize) -> Vec<GateRef> {
    let sigs: Signatures = c.subroutines.iter().map(|(n, b)| (n.clone(), signature(b))).collect();
    let mut bad = Vec::new();
    let bodies = std::iter::once((None, &c.main)).chain(c.subroutines.iter().map(|(n, b)| (Some(n.clone()), b)));
    for (name, body) in bodies {
        let mut kinds: HashMap<WireId, WireKind> = body.inputs.iter().map(|e| (e.wire, e.kind)).collect();
        for (index, g) in body.gates.iter().enumerate() {
            if matches!(g.kind, GateKind::Named(_) | GateKind::RGate(_)) {
                let quantum = g.operands.len()
                    + g.controls.iter().filter(|c| kinds.get(&c.wire) != Some(&WireKind::Classical)).count();
                if quantum > bound {
                    bad.push(GateRef { subroutine: name.clone(), index });
                }
            }
            track(&mut kinds, g, &sigs);
        }
    }
    bad
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::{extract, extract_to, CollectSink, QUBIT};

    fn sample() -> Circuit {
        extract(&(QUBIT, QUBIT), |c, (a, b)| {
            c.comment("start")?;
            let a = c.hadamard(a)?;
            let (b, a) = c.controlled_not(b, a)?;
            let b = c.boxed("t", b, |c, q| c.gate_t(q))?;
            Ok((a, b))
        })
        .unwrap()
        .circuit
    }

    #[test]
    fn identity_is_gate_identical() {
        let c = sample();
        assert_eq!(transform(&mut Identity, &c).unwrap(), c);
    }

    #[test]
    fn strip_comments_removes_only_comments() {
        let c = sample();
        let out = transform(&mut StripComments, &c).unwrap();
        assert_eq!(out.gates().len(), c.gates().len() - 1);
        assert!(out.gates().iter().all(|g| !g.is_comment()));
    }

    struct Counting(usize);

    impl Transformer for Counting {
        fn rewrite(&mut self, gate: Gate, out: &mut Emitter<'_>) -> Result<(), TransformError> {
            self.0 += 1;
            out.emit(gate)
        }
    }

    #[test]
    fn counting_visits_each_gate_once() {
        let c = sample();
        let mut t = Counting(0);
        transform(&mut t, &c).unwrap();
        let n: usize = c.gates().len() + c.subroutines.values().map(|b| b.gates.len()).sum::<usize>();
        assert_eq!(t.0, n);
    }

    #[test]
    fn streaming_matches_batch_up_to_numbering() {
        let f = |c: &mut crate::builder::Circ, (a, b): (crate::Qubit, crate::Qubit)| {
            let x = c.qinit(false)?;
            c.gate(crate::NamedGate::X, x, &[a.ctrl(), b.ctrl()])?;
            c.qterm(x, false)?;
            Ok((a, b))
        };
        let batch = extract(&(QUBIT, QUBIT), f).unwrap().circuit;
        let batch = transform(&mut Decompose::new(GateSet::Binary), &batch).unwrap();
        let mut sink = CollectSink::default();
        let mut rule = Decompose::new(GateSet::Binary);
        let mut ts = TransformSink::new(&mut rule, &mut sink);
        extract_to(&(QUBIT, QUBIT), &mut ts, f).unwrap();
        assert_eq!(ts.largest_expansion(), 15);
        assert_eq!(sink.gates.len(), batch.gates().len());
        assert_eq!(sink.gates, batch.main.gates);
    }
}
