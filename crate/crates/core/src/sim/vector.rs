use std::collections::HashMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use super::{c64, Engine, Fault, Rng, TERM_TOLERANCE};
use crate::ir::{Control, Gate, GateKind, NamedGate, WireId};

/// A pure state over an ordered list of wires. Amplitude index bit
/// `n-1-k` is the value of `wires[k]`, so the first wire is the most
/// significant.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
    wires: Vec<WireId>,
}

impl StateVector {
    /// Panics unless `amplitudes.len()` is a power of two.
    pub fn new(amplitudes: Vec<Complex64>) -> Self {
        assert!(amplitudes.len().is_power_of_two(), "state length must be a power of two");
        let n = amplitudes.len().trailing_zeros() as u64;
        StateVector { amplitudes, wires: (0..n).map(WireId).collect() }
    }

    pub fn basis(bits: &[bool]) -> Self {
        let mut a = vec![c64(0.0, 0.0); 1 << bits.len()];
        a[super::bits_index(bits)] = c64(1.0, 0.0);
        StateVector::new(a)
    }

    /// `α|0⟩ + β|1⟩`.
    pub fn qubit(alpha: Complex64, beta: Complex64) -> Self {
        StateVector::new(vec![alpha, beta])
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn wires(&self) -> &[WireId] {
        &self.wires
    }

    pub fn num_qubits(&self) -> usize {
        self.amplitudes.len().trailing_zeros() as usize
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    /// `|⟨self|other⟩|`, which is 1 for equal states up to phase.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        if self.amplitudes.len() != other.amplitudes.len() {
            return 0.0;
        }
        self.inner(other).norm()
    }

    /// `self ⊗ other`, with `self`'s wires first.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut a = Vec::with_capacity(self.amplitudes.len() * other.amplitudes.len());
        for x in &self.amplitudes {
            for y in &other.amplitudes {
                a.push(x * y);
            }
        }
        StateVector::new(a)
    }

    /// Probability that wire number `k` reads 1.
    pub fn probability_one(&self, k: usize) -> f64 {
        let bit = self.num_qubits() - 1 - k;
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i >> bit & 1 == 1)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }
}

/// The 2×2 matrix of a named gate or rotation, adjoint when inverted.
pub fn gate_matrix(kind: &GateKind, inverted: bool) -> Option<[[Complex64; 2]; 2]> {
    let o = c64(0.0, 0.0);
    let l = c64(1.0, 0.0);
    let h = c64(FRAC_1_SQRT_2, 0.0);
    let phase = |angle: f64| Complex64::from_polar(1.0, if inverted { -angle } else { angle });
    let m = match kind {
        GateKind::Named(NamedGate::H) => [[h, h], [h, -h]],
        GateKind::Named(NamedGate::X) => [[o, l], [l, o]],
        GateKind::Named(NamedGate::Y) => [[o, c64(0.0, -1.0)], [c64(0.0, 1.0), o]],
        GateKind::Named(NamedGate::Z) => [[l, o], [o, -l]],
        GateKind::Named(NamedGate::S) => [[l, o], [o, phase(PI / 2.0)]],
        GateKind::Named(NamedGate::T) => [[l, o], [o, phase(PI / 4.0)]],
        GateKind::RGate(m) => [[l, o], [o, phase(2.0 * PI / 2f64.powi(*m as i32))]],
        _ => return None,
    };
    Some(m)
}

/// Dense amplitudes over the live qubits. A wire's position `p` is its
/// bit `1 << p` in the amplitude index; new wires take the next position
/// and removing a wire compacts the positions above it.
#[derive(Clone, Debug)]
pub(crate) struct VectorEngine {
    amps: Vec<Complex64>,
    wires: Vec<WireId>,
    pos: HashMap<WireId, usize>,
    limit: usize,
}

impl VectorEngine {
    pub(crate) fn new(limit: usize) -> Self {
        VectorEngine { amps: vec![c64(1.0, 0.0)], wires: Vec::new(), pos: HashMap::new(), limit }
    }

    /// Starts from `amplitudes` over `wires` (first wire most significant).
    pub(crate) fn with_state(limit: usize, wires: &[WireId], amplitudes: &[Complex64]) -> Result<Self, Fault> {
        let n = wires.len();
        if n > limit {
            return Err(Fault::TooManyQubits(limit));
        }
        assert_eq!(amplitudes.len(), 1 << n);
        let order: Vec<WireId> = wires.iter().rev().copied().collect();
        let pos = order.iter().enumerate().map(|(p, w)| (*w, p)).collect();
        Ok(VectorEngine { amps: amplitudes.to_vec(), wires: order, pos, limit })
    }

    /// The state over `order` (first most significant); `order` must be a
    /// permutation of the live wires.
    pub(crate) fn state_over(&self, order: &[WireId]) -> StateVector {
        assert_eq!(order.len(), self.wires.len(), "state must cover every live qubit");
        let n = order.len();
        let positions: Vec<usize> = order.iter().map(|w| self.pos[w]).collect();
        let mut out = vec![c64(0.0, 0.0); self.amps.len()];
        for (i, a) in self.amps.iter().enumerate() {
            let mut j = 0;
            for (k, p) in positions.iter().enumerate() {
                j |= (i >> p & 1) << (n - 1 - k);
            }
            out[j] = *a;
        }
        StateVector { amplitudes: out, wires: order.to_vec() }
    }

    fn prob_one(&self, p: usize) -> f64 {
        let bit = 1 << p;
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Keeps the half of the state where position `p` equals `value`,
    /// rescaled by `scale`, and drops the position.
    fn project_out(&mut self, wire: WireId, value: bool, scale: f64) {
        let p = self.pos[&wire];
        let low = (1usize << p) - 1;
        let half = self.amps.len() / 2;
        let v = usize::from(value) << p;
        let mut out = Vec::with_capacity(half);
        for k in 0..half {
            let i = ((k & !low) << 1) | v | (k & low);
            out.push(self.amps[i] * scale);
        }
        self.amps = out;
        self.wires.remove(p);
        self.pos.remove(&wire);
        for (q, w) in self.wires.iter().enumerate().skip(p) {
            self.pos.insert(*w, q);
        }
    }

    fn apply(&mut self, m: &[[Complex64; 2]; 2], target: usize, mask: usize, want: usize) {
        let tb = 1usize << target;
        for i in 0..self.amps.len() {
            if i & tb == 0 && i & mask == want {
                let j = i | tb;
                let (a0, a1) = (self.amps[i], self.amps[j]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[j] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }
}

impl Engine for VectorEngine {
    fn init(&mut self, wire: WireId, value: bool) -> Result<(), Fault> {
        if self.wires.len() >= self.limit {
            return Err(Fault::TooManyQubits(self.limit));
        }
        let n = self.amps.len();
        let zero = c64(0.0, 0.0);
        if value {
            let mut a = vec![zero; n];
            a.append(&mut self.amps);
            self.amps = a;
        } else {
            self.amps.resize(2 * n, zero);
        }
        self.pos.insert(wire, self.wires.len());
        self.wires.push(wire);
        Ok(())
    }

    fn term(&mut self, wire: WireId, value: bool) -> Result<(), Fault> {
        let p1 = self.prob_one(self.pos[&wire]);
        let kept = if value { p1 } else { 1.0 - p1 };
        if 1.0 - kept > TERM_TOLERANCE {
            return Err(Fault::Assertion);
        }
        self.project_out(wire, value, 1.0 / kept.sqrt());
        Ok(())
    }

    fn unitary(&mut self, gate: &Gate, target: WireId, controls: &[Control]) -> Result<(), Fault> {
        let m = gate_matrix(&gate.kind, gate.inverted).expect("unitary gate");
        let mut mask = 0;
        let mut want = 0;
        for c in controls {
            let b = 1usize << self.pos[&c.wire];
            mask |= b;
            if c.positive {
                want |= b;
            }
        }
        self.apply(&m, self.pos[&target], mask, want);
        Ok(())
    }

    fn measure(&mut self, wire: WireId, rng: &mut Rng) -> Result<bool, Fault> {
        let u = rng.next_f64();
        let p1 = self.prob_one(self.pos[&wire]);
        let outcome = u < p1;
        let p = if outcome { p1 } else { 1.0 - p1 };
        self.project_out(wire, outcome, 1.0 / p.sqrt());
        Ok(outcome)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn init_order_and_readout() {
        let mut e = VectorEngine::new(4);
        e.init(WireId(0), true).unwrap();
        e.init(WireId(1), false).unwrap();
        let s = e.state_over(&[WireId(0), WireId(1)]);
        assert_eq!(s.amplitudes()[2], c64(1.0, 0.0));
        let s = e.state_over(&[WireId(1), WireId(0)]);
        assert_eq!(s.amplitudes()[1], c64(1.0, 0.0));
    }

    #[test]
    fn termination_compacts() {
        let mut e = VectorEngine::new(4);
        for (w, v) in [(0, false), (1, true), (2, true)] {
            e.init(WireId(w), v).unwrap();
        }
        e.term(WireId(1), true).unwrap();
        let s = e.state_over(&[WireId(0), WireId(2)]);
        assert_eq!(s.amplitudes()[1], c64(1.0, 0.0));
        assert!(e.term(WireId(2), false).is_err());
    }

    #[test]
    fn with_state_round_trips() {
        let amps: Vec<Complex64> = (0..8).map(|i| c64(i as f64, -(i as f64))).collect();
        let wires = [WireId(5), WireId(2), WireId(9)];
        let e = VectorEngine::with_state(8, &wires, &amps).unwrap();
        assert_eq!(e.state_over(&wires).amplitudes(), &amps[..]);
    }

    #[test]
    fn inverted_rotation_is_adjoint() {
        let m = gate_matrix(&GateKind::RGate(3), false).unwrap();
        let mi = gate_matrix(&GateKind::RGate(3), true).unwrap();
        assert!((m[1][1] * mi[1][1] - c64(1.0, 0.0)).norm() < 1e-15);
        let t = gate_matrix(&GateKind::Named(NamedGate::T), false).unwrap();
        assert!((t[1][1] - m[1][1]).norm() < 1e-15);
    }
}
