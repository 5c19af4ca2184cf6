//! Stabilizer simulation with the destabilizer/stabilizer tableau of
//! Aaronson and Gottesman: `n` destabilizer and `n` stabilizer rows, each a
//! Pauli string packed into X and Z bit vectors plus a sign bit.

use std::collections::HashMap;

use super::{Engine, Fault, Rng};
use crate::ir::{Control, Gate, GateKind, NamedGate, WireId};

#[derive(Clone, Debug, PartialEq, Eq)]
struct Row {
    x: Vec<u64>,
    z: Vec<u64>,
    sign: bool,
}

impl Row {
    fn zero(words: usize) -> Self {
        Row { x: vec![0; words], z: vec![0; words], sign: false }
    }

    fn x(&self, q: usize) -> bool {
        self.x[q / 64] >> (q % 64) & 1 == 1
    }

    fn z(&self, q: usize) -> bool {
        self.z[q / 64] >> (q % 64) & 1 == 1
    }

    /// `self ← source · self`, tracking the sign through the phase sum.
    fn absorb(&mut self, source: &Row) {
        let mut phase: i64 = 2 * i64::from(self.sign) + 2 * i64::from(source.sign);
        for w in 0..self.x.len() {
            let (x1, z1, x2, z2) = (source.x[w], source.z[w], self.x[w], self.z[w]);
            let plus = (x1 & z1 & z2 & !x2) | (x1 & !z1 & x2 & z2) | (!x1 & z1 & x2 & !z2);
            let minus = (x1 & z1 & x2 & !z2) | (x1 & !z1 & !x2 & z2) | (!x1 & z1 & x2 & z2);
            phase += i64::from(plus.count_ones()) - i64::from(minus.count_ones());
            self.x[w] ^= x1;
            self.z[w] ^= z1;
        }
        debug_assert!(phase.rem_euclid(2) == 0, "rows must commute or anticommute cleanly");
        self.sign = phase.rem_euclid(4) == 2;
    }
}

#[derive(Clone, Debug, Default)]
struct Tableau {
    n: usize,
    words: usize,
    destab: Vec<Row>,
    stab: Vec<Row>,
}

impl Tableau {
    /// Adds a qubit in state |0⟩ and returns its index.
    fn add_qubit(&mut self) -> usize {
        let q = self.n;
        self.n += 1;
        if self.n > self.words * 64 {
            self.words += 1;
            for r in self.destab.iter_mut().chain(self.stab.iter_mut()) {
                r.x.push(0);
                r.z.push(0);
            }
        }
        let mut d = Row::zero(self.words);
        d.x[q / 64] |= 1 << (q % 64);
        let mut s = Row::zero(self.words);
        s.z[q / 64] |= 1 << (q % 64);
        self.destab.push(d);
        self.stab.push(s);
        q
    }

    fn rows_mut(&mut self) -> impl Iterator<Item = &mut Row> {
        self.destab.iter_mut().chain(self.stab.iter_mut())
    }

    fn h(&mut self, a: usize) {
        let (w, b) = (a / 64, 1u64 << (a % 64));
        for r in self.rows_mut() {
            let (x, z) = (r.x[w] & b, r.z[w] & b);
            r.sign ^= x != 0 && z != 0;
            r.x[w] = (r.x[w] & !b) | z;
            r.z[w] = (r.z[w] & !b) | x;
        }
    }

    fn s(&mut self, a: usize) {
        let (w, b) = (a / 64, 1u64 << (a % 64));
        for r in self.rows_mut() {
            let (x, z) = (r.x[w] & b, r.z[w] & b);
            r.sign ^= x != 0 && z != 0;
            r.z[w] ^= x;
        }
    }

    fn x(&mut self, a: usize) {
        for r in self.rows_mut() {
            r.sign ^= r.z(a);
        }
    }

    fn z(&mut self, a: usize) {
        for r in self.rows_mut() {
            r.sign ^= r.x(a);
        }
    }

    fn y(&mut self, a: usize) {
        for r in self.rows_mut() {
            r.sign ^= r.x(a) ^ r.z(a);
        }
    }

    fn sdg(&mut self, a: usize) {
        self.s(a);
        self.z(a);
    }

    fn cnot(&mut self, c: usize, t: usize) {
        let (wc, bc) = (c / 64, c % 64);
        let (wt, bt) = (t / 64, t % 64);
        for r in self.rows_mut() {
            let xc = r.x[wc] >> bc & 1;
            let zc = r.z[wc] >> bc & 1;
            let xt = r.x[wt] >> bt & 1;
            let zt = r.z[wt] >> bt & 1;
            r.sign ^= xc & zt & (xt ^ zc ^ 1) == 1;
            r.x[wt] ^= xc << bt;
            r.z[wc] ^= zt << bc;
        }
    }

    fn cz(&mut self, c: usize, t: usize) {
        self.h(t);
        self.cnot(c, t);
        self.h(t);
    }

    /// The deterministic outcome of measuring qubit `a` in the Z basis, or
    /// `None` if the outcome is random.
    fn peek(&self, a: usize) -> Option<bool> {
        if self.stab.iter().any(|r| r.x(a)) {
            return None;
        }
        let mut acc = Row::zero(self.words);
        for (d, s) in self.destab.iter().zip(&self.stab) {
            if d.x(a) {
                acc.absorb(s);
            }
        }
        Some(acc.sign)
    }

    /// Measures qubit `a`; a random outcome is `coin`.
    fn measure(&mut self, a: usize, coin: bool) -> bool {
        let Some(p) = self.stab.iter().position(|r| r.x(a)) else {
            return self.peek(a).expect("deterministic");
        };
        let pivot = self.stab[p].clone();
        for (i, r) in self.destab.iter_mut().enumerate() {
            if i != p && r.x(a) {
                r.absorb(&pivot);
            }
        }
        for (i, r) in self.stab.iter_mut().enumerate() {
            if i != p && r.x(a) {
                r.absorb(&pivot);
            }
        }
        self.destab[p] = pivot;
        let mut z = Row::zero(self.words);
        z.z[a / 64] |= 1 << (a % 64);
        z.sign = coin;
        self.stab[p] = z;
        coin
    }
}

/// Qubits map to tableau columns; measured or terminated columns are reset
/// to |0⟩ and reused.
#[derive(Clone, Debug, Default)]
pub(crate) struct StabilizerEngine {
    tableau: Tableau,
    index: HashMap<WireId, usize>,
    free: Vec<usize>,
}

impl StabilizerEngine {
    fn release(&mut self, wire: WireId, outcome: bool) {
        let q = self.index.remove(&wire).expect("live wire");
        if outcome {
            self.tableau.x(q);
        }
        self.free.push(q);
    }
}

impl Engine for StabilizerEngine {
    fn init(&mut self, wire: WireId, value: bool) -> Result<(), Fault> {
        let q = match self.free.pop() {
            Some(q) => q,
            None => self.tableau.add_qubit(),
        };
        if value {
            self.tableau.x(q);
        }
        self.index.insert(wire, q);
        Ok(())
    }

    fn term(&mut self, wire: WireId, value: bool) -> Result<(), Fault> {
        let q = self.index[&wire];
        match self.tableau.peek(q) {
            Some(v) if v == value => {
                self.release(wire, v);
                Ok(())
            }
            _ => Err(Fault::Assertion),
        }
    }

    fn unitary(&mut self, gate: &Gate, target: WireId, controls: &[Control]) -> Result<(), Fault> {
        let t = self.index[&target];
        let inv = gate.inverted;
        match controls {
            [] => {
                match gate.kind {
                    GateKind::Named(NamedGate::H) => self.tableau.h(t),
                    GateKind::Named(NamedGate::X) => self.tableau.x(t),
                    GateKind::Named(NamedGate::Y) => self.tableau.y(t),
                    GateKind::Named(NamedGate::Z) | GateKind::RGate(1) => self.tableau.z(t),
                    GateKind::Named(NamedGate::S) | GateKind::RGate(2) => {
                        if inv {
                            self.tableau.sdg(t)
                        } else {
                            self.tableau.s(t)
                        }
                    }
                    _ => return Err(Fault::NotClifford),
                }
                Ok(())
            }
            [c] => {
                let cq = self.index[&c.wire];
                let apply = |tab: &mut Tableau| -> Result<(), Fault> {
                    match gate.kind {
                        GateKind::Named(NamedGate::X) => tab.cnot(cq, t),
                        GateKind::Named(NamedGate::Z) | GateKind::RGate(1) => tab.cz(cq, t),
                        GateKind::Named(NamedGate::Y) => {
                            tab.sdg(t);
                            tab.cnot(cq, t);
                            tab.s(t);
                        }
                        _ => return Err(Fault::NotClifford),
                    }
                    Ok(())
                };
                if c.positive {
                    apply(&mut self.tableau)
                } else {
                    self.tableau.x(cq);
                    let r = apply(&mut self.tableau);
                    self.tableau.x(cq);
                    r
                }
            }
            _ => Err(Fault::NotClifford),
        }
    }

    fn measure(&mut self, wire: WireId, rng: &mut Rng) -> Result<bool, Fault> {
        let coin = rng.next_f64() < 0.5;
        let q = self.index[&wire];
        let outcome = self.tableau.measure(q, coin);
        self.release(wire, outcome);
        Ok(outcome)
    }
}
