//! Circuit combinators built on the emission context: reversible wrappers
//! for classical-style circuit functions and the compiler from boolean
//! expressions to circuits.

use crate::boolexpr::{BoolExpr, ClassicalFunction};
use crate::builder::{BuildError, Circ, Qubit};
use crate::ir::{Control, NamedGate};
use crate::shapes::{QData, ShapeMismatch, Tree};

pub use crate::builder::reverse_endo;

type Result<T, E = BuildError> = std::result::Result<T, E>;

/// Turns `f : a -> b` into the reversible `(x, y) -> (x, y xor f(x))`.
///
/// `f` is computed, its outputs are copied onto `y` with CNOTs and the
/// computation is undone, so every ancilla `f` used is returned to its
/// initial state and terminated.
pub fn classical_to_reversible<A, B, F>(f: F) -> impl Fn(&mut Circ, (A, B)) -> Result<(A, B)>
where
    A: QData + Clone,
    B: QData,
    F: Fn(&mut Circ, A) -> Result<B>,
{
    move |c: &mut Circ, (x, y): (A, B)| {
        let arg = x.clone();
        let y = c.with_computed(|c| f(c, arg), |c, fx| xor_into(c, &fx, y))?;
        Ok((x, y))
    }
}

/// CNOTs every wire of `source` onto the matching wire of `target`.
fn xor_into<B: QData>(c: &mut Circ, source: &B, target: B) -> Result<B> {
    if source.kinds() != target.kinds() {
        return Err(ShapeMismatch { left: source.kinds().to_string(), right: target.kinds().to_string() }.into());
    }
    for (s, t) in source.endpoints().into_iter().zip(target.endpoints()) {
        c.gate(NamedGate::X, Qubit::from_wire(t.wire), &[Control::pos(s.wire)])?;
    }
    Ok(target)
}

/// The circuit function computing `f` on qubits.
///
/// Every non-trivial subexpression is written to its own fresh ancilla.
/// The result holds one qubit per output expression; input qubits and
/// intermediate ancillas stay live as garbage.
pub fn compile_classical(f: &ClassicalFunction) -> impl Fn(&mut Circ, Vec<Qubit>) -> Result<Vec<Qubit>> + '_ {
    move |c: &mut Circ, inputs: Vec<Qubit>| {
        if inputs.len() != f.arity() {
            return Err(ShapeMismatch {
                left: format!("{} input(s)", f.arity()),
                right: format!("{} qubit(s)", inputs.len()),
            }
            .into());
        }
        let mut out: Vec<Qubit> = Vec::with_capacity(f.outputs().len());
        for e in f.outputs() {
            let mut w = lower(c, e, &inputs)?;
            if out.contains(&w) {
                let copy = c.qinit(false)?;
                c.controlled_not(copy, w)?;
                w = copy;
            }
            out.push(w);
        }
        Ok(out)
    }
}

/// The wire holding the value of `e`.
fn lower(c: &mut Circ, e: &BoolExpr, inputs: &[Qubit]) -> Result<Qubit> {
    let x = NamedGate::X;
    match e {
        BoolExpr::Var(i) => Ok(inputs[*i]),
        BoolExpr::Const(b) => c.qinit(*b),
        BoolExpr::Not(a) => {
            let a = lower(c, a, inputs)?;
            let t = c.qinit(false)?;
            c.gate(x, t, &[a.ctrl()])?;
            c.qnot(t)
        }
        BoolExpr::Xor(a, b) => {
            let a = lower(c, a, inputs)?;
            let b = lower(c, b, inputs)?;
            let t = c.qinit(false)?;
            if a != b {
                c.gate(x, t, &[a.ctrl()])?;
                c.gate(x, t, &[b.ctrl()])?;
            }
            Ok(t)
        }
        BoolExpr::And(a, b) => {
            let a = lower(c, a, inputs)?;
            let b = lower(c, b, inputs)?;
            let t = c.qinit(false)?;
            if a == b {
                c.gate(x, t, &[a.ctrl()])?;
            } else {
                c.gate(x, t, &[a.ctrl(), b.ctrl()])?;
            }
            Ok(t)
        }
        BoolExpr::Or(a, b) => {
            let a = lower(c, a, inputs)?;
            let b = lower(c, b, inputs)?;
            let t = c.qinit(false)?;
            if a == b {
                c.gate(x, t, &[a.ctrl()])?;
                return Ok(t);
            }
            // a | b = !(!a & !b)
            c.qnot(a)?;
            c.qnot(b)?;
            c.gate(x, t, &[a.ctrl(), b.ctrl()])?;
            c.qnot(a)?;
            c.qnot(b)?;
            c.qnot(t)
        }
    }
}

/// Builds `f` as a circuit over a list of qubits.
pub fn compile_classical_tree(f: &ClassicalFunction) -> impl Fn(&mut Circ, Tree<Qubit>) -> Result<Tree<Qubit>> + '_ {
    let g = compile_classical(f);
    move |c: &mut Circ, xs: Tree<Qubit>| Ok(Tree::from(g(c, xs.into_leaves())?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::{extract, QUBIT};
    use crate::ir::GateKind;

    #[test]
    fn constant_true_is_one_init() {
        let f = ClassicalFunction::new(0, vec![BoolExpr::Const(true)]).unwrap();
        let sc = extract(&Vec::<Qubit>::new(), compile_classical(&f)).unwrap();
        assert_eq!(sc.circuit.gates().len(), 1);
        assert_eq!(sc.circuit.gates()[0].kind, GateKind::QInit(true));
    }

    #[test]
    fn variable_is_plain_wiring() {
        let f = ClassicalFunction::new(1, vec![BoolExpr::var(0)]).unwrap();
        let sc = extract(&vec![QUBIT], compile_classical(&f)).unwrap();
        assert!(sc.circuit.gates().is_empty());
        assert_eq!(sc.circuit.outputs(), sc.circuit.inputs());
    }

    #[test]
    fn repeated_output_is_copied() {
        let f = ClassicalFunction::new(1, vec![BoolExpr::var(0), BoolExpr::var(0)]).unwrap();
        let sc = extract(&vec![QUBIT], compile_classical(&f)).unwrap();
        assert_eq!(sc.circuit.gates().len(), 2);
        assert_eq!(sc.output.len(), 2);
    }

    #[test]
    fn arity_mismatch_is_shape_error() {
        let f = ClassicalFunction::adder();
        let err = extract(&vec![QUBIT; 2], compile_classical(&f)).unwrap_err();
        assert!(matches!(err, BuildError::Shape(_)));
    }

    #[test]
    fn reversible_wrapper_cleans_up() {
        let f = ClassicalFunction::adder();
        let g = compile_classical(&f);
        let r = classical_to_reversible(move |c: &mut Circ, x: Vec<Qubit>| g(c, x));
        let sc = extract(&(vec![QUBIT; 3], vec![QUBIT; 2]), r).unwrap();
        assert_eq!(sc.garbage(), 0);
        let inits = sc.circuit.gates().iter().filter(|g| matches!(g.kind, GateKind::QInit(_))).count();
        let terms = sc.circuit.gates().iter().filter(|g| matches!(g.kind, GateKind::QTerm(_))).count();
        assert_eq!(inits, terms);
    }
}
