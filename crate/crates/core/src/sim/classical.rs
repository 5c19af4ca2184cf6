//! Boolean simulation.
//!
//! The state is a short list of basis states with amplitudes. A circuit
//! built from X gates keeps exactly one term, and the engine then is just
//! a map from wires to booleans. Other gates are applied term by term, so
//! a gadget such as the H/T/CNOT Toffoli network may branch and recombine;
//! but whenever a wire is observed (terminated, measured or output) it
//! must have the same value in every term, otherwise the circuit is not
//! classical.

use std::collections::HashMap;

use num_complex::Complex64;

use super::vector::gate_matrix;
use super::{Engine, Fault, Rng};
use crate::ir::{Control, Gate, GateKind, NamedGate, WireId};

/// Most simultaneous basis terms before giving up.
const MAX_TERMS: usize = 64;
/// Amplitudes below this are treated as cancelled.
const EPS: f64 = 1e-9;

#[derive(Clone, Debug)]
struct Term {
    bits: Vec<u64>,
    amp: Complex64,
}

impl Term {
    fn get(&self, p: usize) -> bool {
        self.bits[p / 64] >> (p % 64) & 1 == 1
    }

    fn set(&mut self, p: usize, v: bool) {
        let m = 1u64 << (p % 64);
        if v {
            self.bits[p / 64] |= m;
        } else {
            self.bits[p / 64] &= !m;
        }
    }

    fn flip(&mut self, p: usize) {
        self.bits[p / 64] ^= 1 << (p % 64);
    }
}

#[derive(Clone, Debug)]
pub(crate) struct ClassicalEngine {
    terms: Vec<Term>,
    pos: HashMap<WireId, usize>,
    free: Vec<usize>,
    width: usize,
}

impl Default for ClassicalEngine {
    fn default() -> Self {
        ClassicalEngine {
            terms: vec![Term { bits: Vec::new(), amp: Complex64::new(1.0, 0.0) }],
            pos: HashMap::new(),
            free: Vec::new(),
            width: 0,
        }
    }
}

impl ClassicalEngine {
    /// The value of position `p` if it is the same in every term.
    fn read(&self, p: usize) -> Option<bool> {
        let v = self.terms[0].get(p);
        self.terms.iter().all(|t| t.get(p) == v).then_some(v)
    }

    fn release(&mut self, wire: WireId) {
        let p = self.pos.remove(&wire).expect("live wire");
        for t in &mut self.terms {
            t.set(p, false);
        }
        self.free.push(p);
    }

    fn fires(t: &Term, controls: &[(usize, bool)]) -> bool {
        controls.iter().all(|(p, v)| t.get(*p) == *v)
    }

    fn branch(&mut self, m: &[[Complex64; 2]; 2], target: usize, controls: &[(usize, bool)]) -> Result<(), Fault> {
        let mut merged: HashMap<Vec<u64>, Complex64> = HashMap::new();
        let mut order: Vec<Vec<u64>> = Vec::new();
        let mut push = |bits: Vec<u64>, amp: Complex64| {
            merged
                .entry(bits)
                .and_modify(|a| *a += amp)
                .or_insert_with_key(|k| {
                    order.push(k.clone());
                    amp
                });
        };
        for t in self.terms.drain(..) {
            if !Self::fires(&t, controls) {
                push(t.bits, t.amp);
                continue;
            }
            let b = usize::from(t.get(target));
            for out in [false, true] {
                let a = m[usize::from(out)][b] * t.amp;
                if a.norm() > EPS {
                    let mut u = t.clone();
                    u.set(target, out);
                    push(u.bits, a);
                }
            }
        }
        self.terms = order
            .into_iter()
            .filter_map(|bits| {
                let amp = merged[&bits];
                (amp.norm() > EPS).then_some(Term { bits, amp })
            })
            .collect();
        if self.terms.len() > MAX_TERMS {
            return Err(Fault::NotClassical);
        }
        Ok(())
    }
}

impl Engine for ClassicalEngine {
    fn init(&mut self, wire: WireId, value: bool) -> Result<(), Fault> {
        let p = self.free.pop().unwrap_or_else(|| {
            self.width += 1;
            if self.width > self.terms[0].bits.len() * 64 {
                for t in &mut self.terms {
                    t.bits.push(0);
                }
            }
            self.width - 1
        });
        for t in &mut self.terms {
            t.set(p, value);
        }
        self.pos.insert(wire, p);
        Ok(())
    }

    fn term(&mut self, wire: WireId, value: bool) -> Result<(), Fault> {
        match self.read(self.pos[&wire]) {
            Some(v) if v == value => {
                self.release(wire);
                Ok(())
            }
            Some(_) => Err(Fault::Assertion),
            None => Err(Fault::NotClassical),
        }
    }

    fn unitary(&mut self, gate: &Gate, target: WireId, controls: &[Control]) -> Result<(), Fault> {
        let t = self.pos[&target];
        let cs: Vec<(usize, bool)> = controls.iter().map(|c| (self.pos[&c.wire], c.positive)).collect();
        if gate.kind == GateKind::Named(NamedGate::X) {
            for term in &mut self.terms {
                if Self::fires(term, &cs) {
                    term.flip(t);
                }
            }
            return Ok(());
        }
        let m = gate_matrix(&gate.kind, gate.inverted).expect("unitary gate");
        self.branch(&m, t, &cs)
    }

    fn measure(&mut self, wire: WireId, rng: &mut Rng) -> Result<bool, Fault> {
        rng.next_f64();
        let v = self.read(self.pos[&wire]).ok_or(Fault::NotClassical)?;
        self.release(wire);
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(w: u64) -> Gate {
        Gate::named(NamedGate::H, WireId(w))
    }

    #[test]
    fn hadamard_pair_recombines() {
        let mut e = ClassicalEngine::default();
        e.init(WireId(0), true).unwrap();
        e.unitary(&h(0), WireId(0), &[]).unwrap();
        assert_eq!(e.terms.len(), 2);
        assert_eq!(e.term(WireId(0), true), Err(Fault::NotClassical));
        e.unitary(&h(0), WireId(0), &[]).unwrap();
        assert_eq!(e.terms.len(), 1);
        assert_eq!(e.measure(WireId(0), &mut Rng::new(0)), Ok(true));
    }

    #[test]
    fn positions_are_reused() {
        let mut e = ClassicalEngine::default();
        for w in 0..100 {
            e.init(WireId(w), w % 3 == 0).unwrap();
        }
        for w in 0..100 {
            e.term(WireId(w), w % 3 == 0).unwrap();
        }
        e.init(WireId(500), false).unwrap();
        assert_eq!(e.width, 100);
        assert_eq!(e.read(e.pos[&WireId(500)]), Some(false));
    }
}
