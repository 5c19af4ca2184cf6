//! Circuit construction.
//!
//! A circuit is built by running an ordinary Rust function against a
//! [`Circ`] context. Every gate operation checks its handles, appends one
//! gate and passes it on to a [`GateSink`], so a circuit can be collected in
//! memory ([`extract`]) or streamed to a consumer as it is generated
//! ([`extract_to`]).

use std::collections::{BTreeMap, HashSet};
use std::error::Error as StdError;
use std::sync::mpsc::SyncSender;

use thiserror::Error;

use crate::ir::walk::Renamer;
use crate::ir::{
    Body, Circuit, Control, Endpoint, Gate, GateKind, NamedGate, NotInvertible, ValidityError,
    ValidityErrorKind, WireId, WireKind, WireTracker,
};
use crate::shapes::{label_names, QData, ShapeMismatch, Tree};

pub type SinkError = Box<dyn StdError + Send + Sync>;

/// Receives a circuit as it is generated.
///
/// Subroutine definitions always arrive before the first call to them.
pub trait GateSink {
    fn inputs(&mut self, inputs: &[Endpoint]) -> Result<(), SinkError> {
        let _ = inputs;
        Ok(())
    }

    fn subroutine(&mut self, name: &str, body: &Body) -> Result<(), SinkError> {
        let _ = (name, body);
        Ok(())
    }

    fn gate(&mut self, gate: Gate) -> Result<(), SinkError>;

    fn outputs(&mut self, outputs: &[Endpoint]) -> Result<(), SinkError> {
        let _ = outputs;
        Ok(())
    }
}

/// Keeps everything it is sent.
#[derive(Clone, Debug, Default)]
pub struct CollectSink {
    pub inputs: Vec<Endpoint>,
    pub subroutines: Vec<(String, Body)>,
    pub gates: Vec<Gate>,
    pub outputs: Vec<Endpoint>,
}

impl GateSink for CollectSink {
    fn inputs(&mut self, inputs: &[Endpoint]) -> Result<(), SinkError> {
        self.inputs = inputs.to_vec();
        Ok(())
    }

    fn subroutine(&mut self, name: &str, body: &Body) -> Result<(), SinkError> {
        self.subroutines.push((name.to_string(), body.clone()));
        Ok(())
    }

    fn gate(&mut self, gate: Gate) -> Result<(), SinkError> {
        self.gates.push(gate);
        Ok(())
    }

    fn outputs(&mut self, outputs: &[Endpoint]) -> Result<(), SinkError> {
        self.outputs = outputs.to_vec();
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SinkEvent {
    Inputs(Vec<Endpoint>),
    Subroutine(String, Body),
    Gate(Gate),
    Outputs(Vec<Endpoint>),
}

/// Forwards events over a bounded channel, so a consumer thread sees gates
/// in emission order while the producer blocks when it runs too far ahead.
#[derive(Debug)]
pub struct ChannelSink {
    tx: SyncSender<SinkEvent>,
}

impl ChannelSink {
    pub fn new(tx: SyncSender<SinkEvent>) -> Self {
        ChannelSink { tx }
    }

    fn send(&mut self, e: SinkEvent) -> Result<(), SinkError> {
        self.tx.send(e).map_err(|_| "gate receiver hung up".into())
    }
}

impl GateSink for ChannelSink {
    fn inputs(&mut self, inputs: &[Endpoint]) -> Result<(), SinkError> {
        self.send(SinkEvent::Inputs(inputs.to_vec()))
    }

    fn subroutine(&mut self, name: &str, body: &Body) -> Result<(), SinkError> {
        self.send(SinkEvent::Subroutine(name.to_string(), body.clone()))
    }

    fn gate(&mut self, gate: Gate) -> Result<(), SinkError> {
        self.send(SinkEvent::Gate(gate))
    }

    fn outputs(&mut self, outputs: &[Endpoint]) -> Result<(), SinkError> {
        self.send(SinkEvent::Outputs(outputs.to_vec()))
    }
}

/// Handle to a live quantum wire.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Qubit(WireId);

/// Handle to a live classical wire.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bit(WireId);

/// Shape template for one qubit, e.g. `extract(&(QUBIT, QUBIT), f)`.
pub const QUBIT: Qubit = Qubit(WireId(u64::MAX));
/// Shape template for one bit.
pub const BIT: Bit = Bit(WireId(u64::MAX));

impl Qubit {
    pub fn from_wire(w: WireId) -> Self {
        Qubit(w)
    }

    pub fn wire(self) -> WireId {
        self.0
    }

    /// Control on this qubit being 1.
    pub fn ctrl(self) -> Control {
        Control::pos(self.0)
    }

    /// Control on this qubit being 0.
    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Control {
        Control::neg(self.0)
    }
}

impl Bit {
    pub fn from_wire(w: WireId) -> Self {
        Bit(w)
    }

    pub fn wire(self) -> WireId {
        self.0
    }

    pub fn ctrl(self) -> Control {
        Control::pos(self.0)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Control {
        Control::neg(self.0)
    }
}

impl From<Qubit> for Control {
    fn from(q: Qubit) -> Control {
        q.ctrl()
    }
}

impl From<Bit> for Control {
    fn from(b: Bit) -> Control {
        b.ctrl()
    }
}

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("handle {0} is not live or has the wrong kind")]
    DeadHandle(WireId),
    #[error("wire {0} is used as both target and control")]
    SelfControl(WireId),
    #[error(transparent)]
    Shape(#[from] ShapeMismatch),
    #[error(transparent)]
    NotInvertible(#[from] NotInvertible),
    #[error("function is not endomorphic: {0}")]
    NotEndomorphic(String),
    #[error("subroutine {0:?} is already defined with a different body")]
    NameCollision(String),
    #[error("invalid gate: {0}")]
    Invalid(ValidityErrorKind),
    #[error("extracted circuit is invalid: {0}")]
    InvalidCircuit(#[from] ValidityError),
    #[error("gate sink failed: {0}")]
    Sink(SinkError),
}

impl From<ValidityErrorKind> for BuildError {
    fn from(k: ValidityErrorKind) -> Self {
        match k {
            ValidityErrorKind::DeadWire(w) => BuildError::DeadHandle(w),
            ValidityErrorKind::KindMismatch { wire, .. } => BuildError::DeadHandle(wire),
            k => BuildError::Invalid(k),
        }
    }
}

type Result<T, E = BuildError> = std::result::Result<T, E>;

/// A circuit with the data shapes of its interface.
///
/// `output` describes the value returned by the generating function. Wires
/// that were still live but not returned follow as garbage outputs, so the
/// circuit may have more outputs than `output` has leaves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShapedCircuit {
    pub circuit: Circuit,
    pub input: Tree<WireKind>,
    pub output: Tree<WireKind>,
}

impl ShapedCircuit {
    pub fn garbage(&self) -> usize {
        self.circuit.outputs().len() - self.output.len()
    }

    /// The output shape including garbage wires as a trailing list.
    pub fn full_output(&self) -> Tree<WireKind> {
        if self.garbage() == 0 {
            return self.output.clone();
        }
        let rest = self.circuit.outputs()[self.output.len()..]
            .iter()
            .map(|e| Tree::Leaf(e.kind))
            .collect();
        Tree::Tuple(vec![self.output.clone(), Tree::List(rest)])
    }

    pub fn reversed(&self) -> Result<ShapedCircuit, NotInvertible> {
        Ok(ShapedCircuit {
            circuit: self.circuit.reversed()?,
            input: self.full_output(),
            output: self.input.clone(),
        })
    }
}

/// Summary of a streamed extraction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extracted {
    pub inputs: Vec<Endpoint>,
    pub outputs: Vec<Endpoint>,
    pub input: Tree<WireKind>,
    pub output: Tree<WireKind>,
    pub gates_emitted: u64,
    /// Most gates held at once in `with_computed` replay buffers.
    pub peak_buffered: usize,
}

/// The emission context threaded through circuit-building functions.
pub struct Circ<'s> {
    sink: &'s mut dyn GateSink,
    tracker: WireTracker,
    next: u64,
    namespace: BTreeMap<String, Body>,
    recorders: Vec<Vec<Gate>>,
    buffered: usize,
    peak_buffered: usize,
    emitted: u64,
}

/// Runs `f` on fresh wires shaped like `template` and collects the circuit.
pub fn extract<A, O, F>(template: &A, f: F) -> Result<ShapedCircuit>
where
    A: QData,
    O: QData,
    F: FnOnce(&mut Circ, A) -> Result<O>,
{
    let mut sink = CollectSink::default();
    let mut c = Circ::new(&mut sink);
    let (inputs, out, outputs) = c.run(template, f)?;
    let subroutines = std::mem::take(&mut c.namespace);
    let circuit = Circuit { main: Body::new(inputs, std::mem::take(&mut sink.gates), outputs), subroutines };
    circuit.validate()?;
    Ok(ShapedCircuit { circuit, input: template.kinds(), output: out.kinds() })
}

/// Like [`extract`], but every event goes straight to `sink` and nothing is
/// retained beyond what `with_computed` needs to replay.
pub fn extract_to<A, O, F>(template: &A, sink: &mut dyn GateSink, f: F) -> Result<Extracted>
where
    A: QData,
    O: QData,
    F: FnOnce(&mut Circ, A) -> Result<O>,
{
    let mut c = Circ::new(sink);
    let (inputs, out, outputs) = c.run(template, f)?;
    Ok(Extracted {
        inputs,
        outputs,
        input: template.kinds(),
        output: out.kinds(),
        gates_emitted: c.emitted,
        peak_buffered: c.peak_buffered,
    })
}

impl<'s> Circ<'s> {
    fn new(sink: &'s mut dyn GateSink) -> Self {
        Circ {
            sink,
            tracker: WireTracker::trusting(),
            next: 0,
            namespace: BTreeMap::new(),
            recorders: Vec::new(),
            buffered: 0,
            peak_buffered: 0,
            emitted: 0,
        }
    }

    fn fresh(&mut self) -> WireId {
        let w = WireId(self.next);
        self.next += 1;
        w
    }

    fn run<A: QData, O: QData>(
        &mut self,
        template: &A,
        f: impl FnOnce(&mut Circ, A) -> Result<O>,
    ) -> Result<(Vec<Endpoint>, O, Vec<Endpoint>)> {
        let args = template.relabel(&mut |_| self.fresh());
        let inputs = args.endpoints();
        for e in &inputs {
            self.tracker.bring(*e)?;
        }
        self.sink.inputs(&inputs).map_err(BuildError::Sink)?;
        let out = f(self, args)?;
        let outputs = self.final_outputs(&out)?;
        self.sink.outputs(&outputs).map_err(BuildError::Sink)?;
        Ok((inputs, out, outputs))
    }

    /// The returned wires followed by any other live wires in id order.
    fn final_outputs<O: QData>(&self, out: &O) -> Result<Vec<Endpoint>> {
        let mut outputs = out.endpoints();
        let mut seen = HashSet::with_capacity(outputs.len());
        for e in &outputs {
            if self.tracker.kind_of(e.wire) != Some(e.kind) {
                return Err(BuildError::DeadHandle(e.wire));
            }
            if !seen.insert(e.wire) {
                return Err(BuildError::Invalid(ValidityErrorKind::DuplicateWire(e.wire)));
            }
        }
        let mut garbage: Vec<Endpoint> = self
            .tracker
            .live()
            .filter(|(w, _)| !seen.contains(w))
            .map(|(w, k)| Endpoint::new(w, k))
            .collect();
        garbage.sort_by_key(|e| e.wire);
        outputs.extend(garbage);
        Ok(outputs)
    }

    /// Appends one gate after checking it against the live wires.
    pub fn emit(&mut self, gate: Gate) -> Result<()> {
        self.tracker.apply(&gate, &self.namespace)?;
        if !self.recorders.is_empty() {
            for r in &mut self.recorders {
                r.push(gate.clone());
            }
            self.buffered += self.recorders.len();
            self.peak_buffered = self.peak_buffered.max(self.buffered);
        }
        self.emitted += 1;
        self.sink.gate(gate).map_err(BuildError::Sink)
    }

    /// Number of currently live wires.
    pub fn live_wires(&self) -> usize {
        self.tracker.live_count()
    }

    pub fn gates_emitted(&self) -> u64 {
        self.emitted
    }

    pub fn peak_buffered(&self) -> usize {
        self.peak_buffered
    }

    fn check(&self, e: Endpoint) -> Result<()> {
        if self.tracker.kind_of(e.wire) == Some(e.kind) {
            Ok(())
        } else {
            Err(BuildError::DeadHandle(e.wire))
        }
    }

    pub fn qinit(&mut self, value: bool) -> Result<Qubit> {
        let w = self.fresh();
        self.emit(Gate::qinit(w, value))?;
        Ok(Qubit(w))
    }

    pub fn cinit(&mut self, value: bool) -> Result<Bit> {
        let w = self.fresh();
        self.emit(Gate::cinit(w, value))?;
        Ok(Bit(w))
    }

    /// Terminates a qubit that is asserted to be in the given basis state.
    pub fn qterm(&mut self, q: Qubit, assertion: bool) -> Result<()> {
        self.emit(Gate::qterm(q.0, assertion))
    }

    pub fn cdiscard(&mut self, b: Bit) -> Result<()> {
        self.emit(Gate::cdiscard(b.0))
    }

    pub fn measure(&mut self, q: Qubit) -> Result<Bit> {
        self.emit(Gate::measure(q.0))?;
        Ok(Bit(q.0))
    }

    fn unitary(&mut self, kind: GateKind, inverted: bool, q: Qubit, controls: &[Control]) -> Result<Qubit> {
        self.check(Endpoint::new(q.0, WireKind::Quantum))?;
        if controls.iter().any(|c| c.wire == q.0) {
            return Err(BuildError::SelfControl(q.0));
        }
        self.emit(Gate { kind, operands: vec![q.0], controls: controls.to_vec(), inverted })?;
        Ok(q)
    }

    pub fn gate(&mut self, g: NamedGate, q: Qubit, controls: &[Control]) -> Result<Qubit> {
        self.unitary(GateKind::Named(g), false, q, controls)
    }

    pub fn gate_inv(&mut self, g: NamedGate, q: Qubit, controls: &[Control]) -> Result<Qubit> {
        self.unitary(GateKind::Named(g), !g.is_self_inverse(), q, controls)
    }

    pub fn hadamard(&mut self, q: Qubit) -> Result<Qubit> {
        self.gate(NamedGate::H, q, &[])
    }

    pub fn qnot(&mut self, q: Qubit) -> Result<Qubit> {
        self.gate(NamedGate::X, q, &[])
    }

    pub fn gate_x(&mut self, q: Qubit) -> Result<Qubit> {
        self.gate(NamedGate::X, q, &[])
    }

    pub fn gate_y(&mut self, q: Qubit) -> Result<Qubit> {
        self.gate(NamedGate::Y, q, &[])
    }

    pub fn gate_z(&mut self, q: Qubit) -> Result<Qubit> {
        self.gate(NamedGate::Z, q, &[])
    }

    pub fn gate_s(&mut self, q: Qubit) -> Result<Qubit> {
        self.gate(NamedGate::S, q, &[])
    }

    pub fn gate_t(&mut self, q: Qubit) -> Result<Qubit> {
        self.gate(NamedGate::T, q, &[])
    }

    /// `diag(1, exp(2πi / 2^m))`, optionally controlled.
    pub fn rgate(&mut self, m: u32, q: Qubit, controls: &[Control]) -> Result<Qubit> {
        self.unitary(GateKind::RGate(m), false, q, controls)
    }

    pub fn rgate_inv(&mut self, m: u32, q: Qubit, controls: &[Control]) -> Result<Qubit> {
        self.unitary(GateKind::RGate(m), true, q, controls)
    }

    /// X on `target` controlled by `control`; returns `(target, control)`.
    pub fn controlled_not(&mut self, target: Qubit, control: Qubit) -> Result<(Qubit, Qubit)> {
        self.gate(NamedGate::X, target, &[control.ctrl()])?;
        Ok((target, control))
    }

    pub fn comment(&mut self, text: &str) -> Result<()> {
        self.emit(Gate::comment(text, Vec::new()))
    }

    pub fn comment_with_labels(&mut self, text: &str, labels: Vec<(WireId, String)>) -> Result<()> {
        self.emit(Gate::comment(text, labels))
    }

    /// A comment labelling each wire of `data` with `name`, `name[0]`, ...
    pub fn comment_with_label<A: QData>(&mut self, text: &str, data: &A, name: &str) -> Result<()> {
        self.comment_with_labels(text, label_names(data, name))
    }

    pub fn label<A: QData>(&mut self, data: &A, name: &str) -> Result<()> {
        self.comment_with_label("", data, name)
    }

    /// Runs `compute`, then `body` on its result, then the inverse of
    /// everything `compute` emitted, in reverse order.
    pub fn with_computed<T, R>(
        &mut self,
        compute: impl FnOnce(&mut Circ) -> Result<T>,
        body: impl FnOnce(&mut Circ, T) -> Result<R>,
    ) -> Result<R> {
        self.recorders.push(Vec::new());
        let t = compute(self);
        let recorded = self.recorders.pop().unwrap_or_default();
        // The recorded gates stay buffered (as their inverses) until replayed.
        let held = recorded.len();
        let r = t.and_then(|t| {
            let undo = recorded
                .iter()
                .rev()
                .map(Gate::inverse)
                .collect::<Result<Vec<_>, _>>()?;
            drop(recorded);
            let r = body(self, t)?;
            // Wires the computation terminated come back under new ids.
            let mut renamer = Renamer::identity();
            for g in &undo {
                let g = renamer.translate(g, Some(&mut || self.fresh()));
                self.emit(g)?;
            }
            Ok(r)
        });
        self.buffered -= held;
        r
    }

    /// Generates `f` into a child circuit over fresh wires shaped like
    /// `args`. Returns the body and the child's result value.
    fn generate<A: QData, O: QData>(
        &mut self,
        args: &A,
        f: impl FnOnce(&mut Circ, A) -> Result<O>,
    ) -> Result<(Body, O)> {
        for e in args.endpoints() {
            self.check(e)?;
        }
        let mut sink = CollectSink::default();
        let mut child = Circ::new(&mut sink);
        child.namespace = std::mem::take(&mut self.namespace);
        let result = child.run(args, f);
        self.namespace = std::mem::take(&mut child.namespace);
        self.peak_buffered = self.peak_buffered.max(self.buffered + child.peak_buffered);
        drop(child);
        for (name, body) in &sink.subroutines {
            self.sink.subroutine(name, body).map_err(BuildError::Sink)?;
        }
        let (inputs, out, outputs) = result?;
        Ok((Body::new(inputs, sink.gates, outputs), out))
    }

    fn register(&mut self, name: &str, body: Body) -> Result<()> {
        match self.namespace.get(name) {
            Some(existing) if *existing == body => Ok(()),
            Some(_) => Err(BuildError::NameCollision(name.to_string())),
            None => {
                self.sink.subroutine(name, &body).map_err(BuildError::Sink)?;
                self.namespace.insert(name.to_string(), body);
                Ok(())
            }
        }
    }

    fn call<A: QData, O: QData>(&mut self, name: &str, args: &A, out: O, repetitions: u64) -> Result<O> {
        let inputs: Vec<WireId> = args.endpoints().into_iter().map(|e| e.wire).collect();
        let body = &self.namespace[name];
        let reuse: Vec<Option<usize>> = body
            .outputs
            .iter()
            .map(|o| body.inputs.iter().position(|i| i.wire == o.wire))
            .collect();
        let outputs: Vec<WireId> = reuse
            .into_iter()
            .map(|r| match r {
                Some(j) => inputs[j],
                None => self.fresh(),
            })
            .collect();
        self.emit(Gate::call(name, inputs, outputs.clone(), repetitions))?;
        let mut it = outputs.into_iter();
        Ok(out.relabel(&mut |_| it.next().expect("call output count")))
    }

    /// Emits `f` as a named subroutine and calls it on `args`.
    ///
    /// The body is regenerated on every use and must be identical to the
    /// one already registered under `name`.
    pub fn boxed<A, O, F>(&mut self, name: &str, args: A, f: F) -> Result<O>
    where
        A: QData,
        O: QData,
        F: FnOnce(&mut Circ, A) -> Result<O>,
    {
        let (body, out) = self.generate(&args, f)?;
        self.register(name, body)?;
        self.call(name, &args, out, 1)
    }

    /// A boxed endomorphism applied `n` times through a single call gate.
    pub fn boxed_repeated<A, F>(&mut self, name: &str, n: u64, args: A, f: F) -> Result<A>
    where
        A: QData,
        F: FnOnce(&mut Circ, A) -> Result<A>,
    {
        let (body, out) = self.generate(&args, f)?;
        check_endomorphic(&body, &args, &out)?;
        self.register(name, body)?;
        self.call(name, &args, out, n)
    }

    fn reversed_inline<A: QData>(&mut self, args: A, f: &dyn Fn(&mut Circ, A) -> Result<A>) -> Result<A> {
        let (body, out) = self.generate(&args, |c, a| f(c, a))?;
        check_endomorphic(&body, &args, &out)?;
        let rev = body.reversed()?;
        let mut renamer = Renamer::new();
        for (e, a) in rev.inputs.iter().zip(args.endpoints()) {
            renamer.bind(e.wire, a.wire);
        }
        for g in &rev.gates {
            let g = renamer.translate(g, Some(&mut || self.fresh()));
            self.emit(g)?;
        }
        let mut it = rev.outputs.iter().map(|e| renamer.get(e.wire));
        Ok(args.relabel(&mut |_| it.next().expect("reversed output count")))
    }
}

fn check_endomorphic<A: QData>(body: &Body, args: &A, out: &A) -> Result<()> {
    if out.kinds() != args.kinds() {
        return Err(BuildError::NotEndomorphic(format!(
            "input shape {} but output shape {}",
            args.kinds(),
            out.kinds()
        )));
    }
    if body.outputs.len() != body.inputs.len() {
        return Err(BuildError::NotEndomorphic(format!(
            "{} garbage wire(s) left over",
            body.outputs.len().saturating_sub(body.inputs.len())
        )));
    }
    Ok(())
}

/// The reverse of an endomorphic circuit function, as a circuit function.
pub fn reverse_endo<A, F>(f: F) -> impl Fn(&mut Circ, A) -> Result<A>
where
    A: QData,
    F: Fn(&mut Circ, A) -> Result<A>,
{
    move |c: &mut Circ, args: A| c.reversed_inline(args, &f)
}
