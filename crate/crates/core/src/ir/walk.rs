//! Wire renaming and hierarchical traversal.
//!
//! [`Renamer`] translates a gate stream from one wire numbering into another,
//! allocating fresh ids for wires that come into scope. [`Walker`] runs a
//! circuit with every subroutine call expanded in place (honouring inverse
//! flags and repetition counts) and hands the resulting flat gates, in a
//! single global numbering, to a visitor.

use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use super::{Body, Circuit, Endpoint, Gate, GateKind, NotInvertible, WireId};

/// Location of a gate: its index within the main body or a subroutine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GateRef {
    pub subroutine: Option<String>,
    pub index: usize,
}

impl fmt::Display for GateRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.subroutine {
            Some(s) => write!(f, "gate {} of subroutine {s:?}", self.index),
            None => write!(f, "gate {}", self.index),
        }
    }
}

#[derive(Debug, Default)]
pub(crate) struct Renamer {
    map: HashMap<WireId, WireId>,
    identity: bool,
}

impl Renamer {
    /// Unmapped wires translate to themselves.
    pub(crate) fn identity() -> Self {
        Renamer { map: HashMap::new(), identity: true }
    }

    pub(crate) fn new() -> Self {
        Renamer::default()
    }

    pub(crate) fn bind(&mut self, from: WireId, to: WireId) {
        self.map.insert(from, to);
    }

    pub(crate) fn get(&self, w: WireId) -> WireId {
        match self.map.get(&w) {
            Some(t) => *t,
            None => {
                debug_assert!(self.identity, "unmapped wire {w}");
                w
            }
        }
    }

    pub(crate) fn forget(&mut self, wires: &[WireId]) {
        for w in wires {
            self.map.remove(w);
        }
    }

    /// Translates one gate. Wires born by the gate get an id from `fresh`
    /// (or keep their own id when `fresh` is `None`); wires consumed by the
    /// gate are forgotten.
    pub(crate) fn translate(
        &mut self,
        gate: &Gate,
        mut fresh: Option<&mut dyn FnMut() -> WireId>,
    ) -> Gate {
        let mut born = |r: &mut Renamer, w: WireId| -> WireId {
            let t = match fresh.as_mut() {
                Some(f) => f(),
                None => w,
            };
            if t != w || !r.identity {
                r.map.insert(w, t);
            } else {
                r.map.remove(&w);
            }
            t
        };
        let mut out = gate.clone();
        out.controls.iter_mut().for_each(|c| c.wire = self.get(c.wire));
        match &gate.kind {
            GateKind::QInit(_) | GateKind::CInit(_) => {
                out.operands = gate.operands.iter().map(|w| born(self, *w)).collect();
            }
            GateKind::QTerm(_) | GateKind::CDiscard => {
                out.operands = gate.operands.iter().map(|w| self.get(*w)).collect();
                for w in &gate.operands {
                    self.map.remove(w);
                }
            }
            GateKind::Comment { text, labels } => {
                out.kind = GateKind::Comment {
                    text: text.clone(),
                    labels: labels.iter().map(|(w, l)| (self.get(*w), l.clone())).collect(),
                };
            }
            GateKind::SubCall { name, inputs, outputs, repetitions } => {
                let ins: Vec<WireId> = inputs.iter().map(|w| self.get(*w)).collect();
                for w in inputs {
                    self.map.remove(w);
                }
                let outs = outputs
                    .iter()
                    .map(|o| match inputs.iter().position(|i| i == o) {
                        Some(j) => {
                            if ins[j] != *o || !self.identity {
                                self.map.insert(*o, ins[j]);
                            }
                            ins[j]
                        }
                        None => born(self, *o),
                    })
                    .collect();
                out.kind = GateKind::SubCall {
                    name: name.clone(),
                    inputs: ins,
                    outputs: outs,
                    repetitions: *repetitions,
                };
            }
            _ => {
                out.operands = gate.operands.iter().map(|w| self.get(*w)).collect();
            }
        }
        out
    }
}

pub(crate) trait Visitor {
    type Error;
    /// Receives one flat gate (never a call unless the depth limit keeps it).
    fn visit(&mut self, gate: Gate) -> Result<(), Self::Error>;
}

#[derive(Debug)]
pub(crate) enum WalkError<E> {
    Visit(GateRef, E),
    NotInvertible(GateRef, NotInvertible),
}

enum BodyRef<'c> {
    Borrowed(&'c Body),
    Owned(Rc<Body>),
}

impl std::ops::Deref for BodyRef<'_> {
    type Target = Body;
    fn deref(&self) -> &Body {
        match self {
            BodyRef::Borrowed(b) => b,
            BodyRef::Owned(b) => b,
        }
    }
}

pub(crate) struct Walker<'c> {
    circuit: &'c Circuit,
    reversed: HashMap<String, Rc<Body>>,
    next: u64,
    depth_limit: Option<usize>,
}

impl<'c> Walker<'c> {
    pub(crate) fn new(circuit: &'c Circuit) -> Self {
        let next = circuit.main.max_wire().map_or(0, |w| w.0 + 1);
        Walker { circuit, reversed: HashMap::new(), next, depth_limit: None }
    }

    /// Calls nested deeper than `depth` are passed to the visitor unexpanded.
    pub(crate) fn with_depth_limit(mut self, depth: Option<usize>) -> Self {
        self.depth_limit = depth;
        self
    }

    /// Walks the main body and returns its outputs in the global numbering.
    /// Main-body wires keep their own ids.
    pub(crate) fn run<V: Visitor>(&mut self, v: &mut V) -> Result<Vec<Endpoint>, WalkError<V::Error>> {
        let mut frame = Renamer::identity();
        let main = self.circuit;
        self.body(&main.main, &mut frame, None, 0, v)?;
        Ok(main
            .main
            .outputs
            .iter()
            .map(|e| Endpoint::new(frame.get(e.wire), e.kind))
            .collect())
    }

    fn fresh(&mut self) -> WireId {
        let w = WireId(self.next);
        self.next += 1;
        w
    }

    fn callee(&mut self, name: &str, inverted: bool) -> Result<BodyRef<'c>, NotInvertible> {
        let circuit = self.circuit;
        let body = &circuit.subroutines[name];
        if !inverted {
            return Ok(BodyRef::Borrowed(body));
        }
        if let Some(b) = self.reversed.get(name) {
            return Ok(BodyRef::Owned(b.clone()));
        }
        let rev = Rc::new(body.reversed()?);
        self.reversed.insert(name.to_string(), rev.clone());
        Ok(BodyRef::Owned(rev))
    }

    fn body<V: Visitor>(
        &mut self,
        body: &Body,
        frame: &mut Renamer,
        name: Option<&str>,
        depth: usize,
        v: &mut V,
    ) -> Result<(), WalkError<V::Error>> {
        let main_frame = depth == 0;
        for (index, g) in body.gates.iter().enumerate() {
            let at = || GateRef { subroutine: name.map(str::to_string), index };
            let expand = self.depth_limit.is_none_or(|d| depth < d);
            match &g.kind {
                GateKind::SubCall { name: callee, inputs, outputs, repetitions } if expand => {
                    let sub = self
                        .callee(callee, g.inverted)
                        .map_err(|e| WalkError::NotInvertible(at(), e))?;
                    let mut cur: Vec<WireId> = inputs.iter().map(|w| frame.get(*w)).collect();
                    for _ in 0..*repetitions {
                        let mut inner = Renamer::new();
                        for (e, w) in sub.inputs.iter().zip(&cur) {
                            inner.bind(e.wire, *w);
                        }
                        self.body(&sub, &mut inner, Some(callee), depth + 1, v)?;
                        cur = sub.outputs.iter().map(|e| inner.get(e.wire)).collect();
                    }
                    frame.forget(inputs);
                    for (o, w) in outputs.iter().zip(cur) {
                        frame.bind(*o, w);
                    }
                }
                _ => {
                    let t = if main_frame {
                        frame.translate(g, None)
                    } else {
                        let mut fresh = || self.fresh();
                        frame.translate(g, Some(&mut fresh))
                    };
                    v.visit(t).map_err(|e| WalkError::Visit(at(), e))?;
                }
            }
        }
        Ok(())
    }
}
