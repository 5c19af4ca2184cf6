//! Lowering of multiply-controlled gates.

use std::str::FromStr;

use super::{transform, Emitter, TransformError, Transformer};
use crate::ir::{Circuit, Control, Gate, GateKind, NamedGate, WireId};

/// Target gate set of [`Decompose`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateSet {
    /// Every gate acts on at most two qubits, controls included.
    Binary,
    /// As `Binary`, but a NOT with two positive controls is kept.
    Toffoli,
}

impl GateSet {
    /// Most quantum wires a gate may touch in this set.
    pub fn arity(self) -> usize {
        match self {
            GateSet::Binary => 2,
            GateSet::Toffoli => 3,
        }
    }
}

impl FromStr for GateSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "binary" => Ok(GateSet::Binary),
            "toffoli" => Ok(GateSet::Toffoli),
            _ => Err(format!("unknown gate set {s:?} (expected binary or toffoli)")),
        }
    }
}

/// Rewrites gates with two or more quantum controls.
///
/// A gate `U` with `k ≥ 2` quantum controls becomes a ladder of `k - 1`
/// Toffolis into fresh ancillas, `U` controlled by the last ancilla, and
/// the ladder undone. Negative controls are flipped to positive by NOTs
/// around the whole expansion. Toffolis are then either kept or lowered to
/// H, T, T* and CNOT. Classical controls stay on the central gate only.
#[derive(Clone, Copy, Debug)]
pub struct Decompose {
    pub gateset: GateSet,
}

impl Decompose {
    pub fn new(gateset: GateSet) -> Self {
        Decompose { gateset }
    }

    fn toffoli(&self, a: WireId, b: WireId, t: WireId, extra: &[Control], out: &mut Emitter<'_>) -> Result<(), TransformError> {
        match self.gateset {
            GateSet::Toffoli => out.emit(x(t).with_controls([Control::pos(a), Control::pos(b)].into_iter().chain(extra.iter().copied()))),
            GateSet::Binary => {
                for g in toffoli_network(a, b, t) {
                    out.emit(g.with_controls(extra.iter().copied()))?;
                }
                Ok(())
            }
        }
    }
}

fn x(w: WireId) -> Gate {
    Gate::named(NamedGate::X, w)
}

fn cx(control: WireId, target: WireId) -> Gate {
    x(target).with_controls([Control::pos(control)])
}

/// NOT on `c` controlled by `a` and `b`, exactly, in fifteen gates.
fn toffoli_network(a: WireId, b: WireId, c: WireId) -> [Gate; 15] {
    let h = |w| Gate::named(NamedGate::H, w);
    let t = |w| Gate::named(NamedGate::T, w);
    let tdg = |w| Gate::named(NamedGate::T, w).with_inverse(true);
    [
        h(c),
        cx(b, c),
        tdg(c),
        cx(a, c),
        t(c),
        cx(b, c),
        tdg(c),
        cx(a, c),
        t(b),
        t(c),
        h(c),
        cx(a, b),
        t(a),
        tdg(b),
        cx(a, b),
    ]
}

impl Transformer for Decompose {
    fn rewrite(&mut self, gate: Gate, out: &mut Emitter<'_>) -> Result<(), TransformError> {
        if !matches!(gate.kind, GateKind::Named(_) | GateKind::RGate(_)) {
            return out.emit(gate);
        }
        let (classical, quantum): (Vec<Control>, Vec<Control>) =
            gate.controls.iter().partition(|c| out.is_classical(c.wire));
        let is_not = gate.kind == GateKind::Named(NamedGate::X);
        let keep = quantum.len() <= 1
            || (self.gateset == GateSet::Toffoli && is_not && quantum.len() == 2 && quantum.iter().all(|c| c.positive));
        if keep {
            return out.emit(gate);
        }

        let flipped: Vec<WireId> = quantum.iter().filter(|c| !c.positive).map(|c| c.wire).collect();
        for w in &flipped {
            out.emit(x(*w))?;
        }
        let target = gate.operands[0];
        if is_not && quantum.len() == 2 {
            self.toffoli(quantum[0].wire, quantum[1].wire, target, &classical, out)?;
        } else {
            let mut ladder = Vec::with_capacity(quantum.len() - 1);
            let mut acc = quantum[0].wire;
            for c in &quantum[1..] {
                let anc = out.fresh();
                out.emit(Gate::qinit(anc, false))?;
                self.toffoli(acc, c.wire, anc, &[], out)?;
                ladder.push((acc, c.wire, anc));
                acc = anc;
            }
            let mut core = gate.clone();
            core.controls = std::iter::once(Control::pos(acc)).chain(classical.iter().copied()).collect();
            out.emit(core)?;
            for (a, b, anc) in ladder.into_iter().rev() {
                self.toffoli(a, b, anc, &[], out)?;
                out.emit(Gate::qterm(anc, false))?;
            }
        }
        for w in &flipped {
            out.emit(x(*w))?;
        }
        Ok(())
    }
}

pub fn decompose(gateset: GateSet, c: &Circuit) -> Result<Circuit, TransformError> {
    transform(&mut Decompose::new(gateset), c)
}

pub fn decompose_binary(c: &Circuit) -> Result<Circuit, TransformError> {
    decompose(GateSet::Binary, c)
}

pub fn decompose_toffoli(c: &Circuit) -> Result<Circuit, TransformError> {
    decompose(GateSet::Toffoli, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::{extract, Circ, QUBIT};
    use crate::ir::Endpoint;
    use crate::sim::circuit_unitary;
    use crate::transform::arity_violations;
    use crate::Qubit;

    fn on_qubits(n: usize, f: impl Fn(&mut Circ, &[Qubit]) -> Result<(), crate::BuildError>) -> Circuit {
        extract(&vec![QUBIT; n], |c, qs: Vec<Qubit>| {
            f(c, &qs)?;
            Ok(qs)
        })
        .unwrap()
        .circuit
    }

    fn check(c: &Circuit) {
        let u = circuit_unitary(c).unwrap();
        for set in [GateSet::Binary, GateSet::Toffoli] {
            let d = decompose(set, c).unwrap();
            assert!(arity_violations(&d, set.arity()).is_empty(), "{set:?}");
            let v = circuit_unitary(&d).unwrap();
            assert!(u.phase_diff(&v) < 1e-9, "{set:?}: {}", u.phase_diff(&v));
        }
    }

    #[test]
    fn toffoli_network_is_exact() {
        let c = on_qubits(3, |c, q| {
            c.gate(NamedGate::X, q[2], &[q[0].ctrl(), q[1].ctrl()])?;
            Ok(())
        });
        let d = decompose_binary(&c).unwrap();
        assert_eq!(d.gates().len(), 15);
        assert!(circuit_unitary(&c).unwrap().max_diff(&circuit_unitary(&d).unwrap()) < 1e-12);
        assert_eq!(decompose_toffoli(&c).unwrap(), c);
    }

    #[test]
    fn negative_and_many_controls() {
        check(&on_qubits(3, |c, q| {
            c.gate(NamedGate::X, q[0], &[q[1].neg(), q[2].ctrl()])?;
            Ok(())
        }));
        check(&on_qubits(4, |c, q| {
            c.gate(NamedGate::X, q[3], &[q[0].ctrl(), q[1].neg(), q[2].ctrl()])?;
            Ok(())
        }));
        for g in [NamedGate::H, NamedGate::Y, NamedGate::S, NamedGate::T] {
            check(&on_qubits(4, |c, q| {
                c.gate_inv(g, q[0], &[q[1].ctrl(), q[2].ctrl(), q[3].neg()])?;
                Ok(())
            }));
        }
        for m in 1..=4 {
            check(&on_qubits(3, |c, q| {
                c.rgate(m, q[0], &[q[1].ctrl(), q[2].ctrl()])?;
                c.rgate_inv(m, q[2], &[q[1].ctrl()])?;
                Ok(())
            }));
        }
    }

    #[test]
    fn classical_controls_ride_on_core_gate() {
        let c = extract(&(QUBIT, QUBIT, QUBIT), |c, (a, b, t)| {
            let m = c.measure(a)?;
            c.gate(NamedGate::Z, t, &[m.ctrl(), b.ctrl()])?;
            let p = c.qinit(false)?;
            c.gate(NamedGate::X, p, &[m.ctrl(), b.ctrl(), t.ctrl()])?;
            Ok((m, (b, t, p)))
        })
        .unwrap()
        .circuit;
        let d = decompose_binary(&c).unwrap();
        assert!(arity_violations(&d, 2).is_empty());
        let classical = |g: &Gate| g.controls.iter().any(|k| k.wire == WireId(0));
        assert_eq!(d.gates().iter().filter(|g| classical(g)).count(), 1 + 15);
        assert_eq!(d.outputs()[0], Endpoint::classical(0));
    }

    #[test]
    fn subroutines_are_decomposed_once() {
        let c = on_qubits(3, |c, q| {
            let v = q.to_vec();
            c.boxed_repeated("ccz", 3, v, |c, q: Vec<Qubit>| {
                c.gate(NamedGate::Z, q[0], &[q[1].ctrl(), q[2].ctrl()])?;
                Ok(q)
            })?;
            Ok(())
        });
        let d = decompose_binary(&c).unwrap();
        assert_eq!(d.gates().len(), 1);
        assert!(arity_violations(&d, 2).is_empty());
        assert!(circuit_unitary(&c).unwrap().phase_diff(&circuit_unitary(&d).unwrap()) < 1e-9);
    }

    #[test]
    fn gateset_parses() {
        assert_eq!("binary".parse::<GateSet>().unwrap(), GateSet::Binary);
        assert!("nand".parse::<GateSet>().is_err());
    }
}
