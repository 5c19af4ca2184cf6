//! The example programs: teleportation, the quantum Fourier transform, the
//! Draper adder and the compiled full adder, plus a registry that builds
//! them by name.

use std::fmt;

use thiserror::Error;

use crate::boolexpr::ClassicalFunction;
use crate::builder::{extract, Bit, BuildError, Circ, Qubit, ShapedCircuit, BIT, QUBIT};
use crate::ir::{NamedGate, WireId, WireKind};
use crate::ops::{classical_to_reversible, compile_classical, reverse_endo};
use crate::shapes::{
    cdiscard_shape, label_names, map_binary, map_binary_c, map_unary, measure_shape, qc_false, qinit_shape,
    ShapeParseError, Tree,
};
use crate::transform::{decompose_binary, TransformError};

type Result<T, E = BuildError> = std::result::Result<T, E>;

pub fn plus_minus(c: &mut Circ, b: bool) -> Result<Qubit> {
    let q = c.qinit(b)?;
    c.hadamard(q)
}

pub fn share(c: &mut Circ, a: Qubit) -> Result<(Qubit, Qubit)> {
    let b = c.qinit(false)?;
    let b = c.gate(NamedGate::X, b, &[a.ctrl()])?;
    Ok((a, b))
}

pub fn bell00(c: &mut Circ) -> Result<(Qubit, Qubit)> {
    let a = plus_minus(c, false)?;
    share(c, a)
}

pub fn alice(c: &mut Circ, q: Qubit, a: Qubit) -> Result<(Bit, Bit)> {
    let a = c.gate(NamedGate::X, a, &[q.ctrl()])?;
    let q = c.hadamard(q)?;
    let x = c.measure(q)?;
    let y = c.measure(a)?;
    Ok((x, y))
}

pub fn bob(c: &mut Circ, b: Qubit, (x, y): (Bit, Bit)) -> Result<Qubit> {
    let b = c.gate(NamedGate::X, b, &[y.ctrl()])?;
    let b = c.gate(NamedGate::Z, b, &[x.ctrl()])?;
    c.cdiscard(x)?;
    c.cdiscard(y)?;
    Ok(b)
}

pub fn teleport(c: &mut Circ, q: Qubit) -> Result<Qubit> {
    let (a, b) = bell00(c)?;
    let xy = alice(c, q, a)?;
    bob(c, b, xy)
}

pub fn plus_minus_generic(c: &mut Circ, values: &Tree<bool>) -> Result<Tree<Qubit>> {
    let qs = qinit_shape(c, values)?;
    map_unary(c, &mut |c, q| c.hadamard(q), qs)
}

pub fn share_generic(c: &mut Circ, qa: Tree<Qubit>) -> Result<(Tree<Qubit>, Tree<Qubit>)> {
    let qb = qinit_shape(c, &qc_false(&qa))?;
    let (qb, qa) = map_binary(c, &mut |c, t, s| c.controlled_not(t, s), qb, qa)?;
    Ok((qa, qb))
}

pub fn bell00_generic(c: &mut Circ, shape: &Tree<bool>) -> Result<(Tree<Qubit>, Tree<Qubit>)> {
    let qa = plus_minus_generic(c, shape)?;
    share_generic(c, qa)
}

pub fn alice_generic(c: &mut Circ, q: Tree<Qubit>, a: Tree<Qubit>) -> Result<(Tree<Bit>, Tree<Bit>)> {
    let (a, q) = map_binary(c, &mut |c, t, s| c.controlled_not(t, s), a, q)?;
    let q = map_unary(c, &mut |c, q| c.hadamard(q), q)?;
    let x = measure_shape(c, q)?;
    let y = measure_shape(c, a)?;
    Ok((x, y))
}

pub fn bob_generic(c: &mut Circ, b: Tree<Qubit>, (x, y): (Tree<Bit>, Tree<Bit>)) -> Result<Tree<Qubit>> {
    let controlled = |g: crate::NamedGate| {
        move |c: &mut Circ, q: Qubit, k: Bit| -> Result<(Qubit, Bit)> { Ok((c.gate(g, q, &[k.ctrl()])?, k)) }
    };
    let (b, y) = map_binary_c(c, &mut controlled(NamedGate::X), b, y)?;
    let (b, x) = map_binary_c(c, &mut controlled(NamedGate::Z), b, x)?;
    cdiscard_shape(c, x)?;
    cdiscard_shape(c, y)?;
    Ok(b)
}

/// Teleports every qubit of `q` through its own Bell pair.
pub fn teleport_generic(c: &mut Circ, q: Tree<Qubit>) -> Result<Tree<Qubit>> {
    let (a, b) = bell00_generic(c, &qc_false(&q))?;
    let xy = alice_generic(c, q, a)?;
    bob_generic(c, b, xy)
}

pub fn teleport_generic_labeled(c: &mut Circ, q: Tree<Qubit>) -> Result<Tree<Qubit>> {
    c.comment_with_label("ENTER: bell00", &q, "q")?;
    let (a, b) = bell00_generic(c, &qc_false(&q))?;
    c.comment_with_labels("ENTER: alice", pair_labels(&a, "a", &b, "b"))?;
    let (x, y) = alice_generic(c, q, a)?;
    c.comment_with_labels("ENTER: bob", pair_labels(&x, "x", &y, "y"))?;
    bob_generic(c, b, (x, y))
}

fn pair_labels<A: crate::QData, B: crate::QData>(a: &A, an: &str, b: &B, bn: &str) -> Vec<(WireId, String)> {
    let mut labels = label_names(a, an);
    labels.extend(label_names(b, bn));
    labels
}

/// Fourier transform of a little-endian register, output big-endian.
pub fn qft_prime(c: &mut Circ, qs: Vec<Qubit>) -> Result<Vec<Qubit>> {
    match qs.len() {
        0 => Ok(qs),
        1 => {
            c.hadamard(qs[0])?;
            Ok(qs)
        }
        _ => {
            let x = qs[0];
            let xs = qft_prime(c, qs[1..].to_vec())?;
            let n = xs.len();
            let xs = rotations(c, x, &xs, n)?;
            let x = c.hadamard(x)?;
            let mut out = vec![x];
            out.extend(xs);
            Ok(out)
        }
    }
}

fn rotations(c: &mut Circ, ctrl: Qubit, qs: &[Qubit], n: usize) -> Result<Vec<Qubit>> {
    let Some((&q, rest)) = qs.split_first() else {
        return Ok(Vec::new());
    };
    let rest = rotations(c, ctrl, rest, n)?;
    let m = (n + 1 - qs[1..].len()) as u32;
    let q = c.rgate(m, q, &[ctrl.ctrl()])?;
    let mut out = vec![q];
    out.extend(rest);
    Ok(out)
}

/// The empty register gives the empty circuit, without the trace comments.
pub fn qft_big_endian(c: &mut Circ, qs: Vec<Qubit>) -> Result<Vec<Qubit>> {
    if qs.is_empty() {
        return Ok(qs);
    }
    c.comment_with_label("ENTER: qft_big_endian", &qs, "qs")?;
    let qs = qft_prime(c, qs.into_iter().rev().collect())?;
    c.comment_with_label("EXIT: qft_big_endian", &qs, "qs")?;
    Ok(qs)
}

pub fn inverse_qft_big_endian(c: &mut Circ, qs: Vec<Qubit>) -> Result<Vec<Qubit>> {
    reverse_endo(qft_big_endian)(c, qs)
}

/// The phase rotations of the Draper adder, applied in the Fourier basis
/// of `bs`.
pub fn qft_adder(c: &mut Circ, a: &[Qubit], b: &[Qubit]) -> Result<()> {
    let Some((&b0, bs)) = b.split_first() else {
        return Ok(());
    };
    for (k, &ak) in a.iter().enumerate() {
        c.rgate(k as u32 + 1, b0, &[ak.ctrl()])?;
    }
    qft_adder(c, a.get(1..).unwrap_or(&[]), bs)
}

fn label_ab(c: &mut Circ, a: &[Qubit], b: &[Qubit]) -> Result<()> {
    let labels = pair_labels(&a.to_vec(), "a", &b.to_vec(), "b");
    c.comment_with_labels("", labels)
}

/// `b ← b + a (mod 2^n)` without ancillas. Both registers are read with
/// their first qubit as the most significant bit.
pub fn qft_add_in_place(c: &mut Circ, (a, b): (Vec<Qubit>, Vec<Qubit>)) -> Result<(Vec<Qubit>, Vec<Qubit>)> {
    label_ab(c, &a, &b)?;
    c.with_computed(
        |c| qft_big_endian(c, b.clone()),
        |c, b2| {
            let rev: Vec<Qubit> = b2.iter().rev().copied().collect();
            qft_adder(c, &a, &rev)
        },
    )?;
    label_ab(c, &a, &b)?;
    Ok((a, b))
}

/// As [`qft_add_in_place`] with the transform boxed as `"QFT"`.
pub fn qft_add_in_place_boxed(c: &mut Circ, (a, b): (Vec<Qubit>, Vec<Qubit>)) -> Result<(Vec<Qubit>, Vec<Qubit>)> {
    label_ab(c, &a, &b)?;
    c.with_computed(
        |c| c.boxed("QFT", b.clone(), qft_big_endian),
        |c, b2| {
            let rev: Vec<Qubit> = b2.iter().rev().copied().collect();
            qft_adder(c, &a, &rev)
        },
    )?;
    label_ab(c, &a, &b)?;
    Ok((a, b))
}

/// The full adder `(a, b, carry) -> (sum, carry out)`, compiled from its
/// boolean formulas. Inputs and intermediate values remain as garbage.
pub fn adder_circ(c: &mut Circ, (a, b, cin): (Qubit, Qubit, Qubit)) -> Result<(Qubit, Qubit)> {
    let f = ClassicalFunction::adder();
    let out = compile_classical(&f)(c, vec![a, b, cin])?;
    Ok((out[0], out[1]))
}

/// `((a, b, c), (s, k)) -> ((a, b, c), (s ⊕ sum, k ⊕ carry))` with all
/// ancillas uncomputed.
#[allow(clippy::type_complexity)]
pub fn adder_reversible(
    c: &mut Circ,
    args: ((Qubit, Qubit, Qubit), (Qubit, Qubit)),
) -> Result<((Qubit, Qubit, Qubit), (Qubit, Qubit))> {
    classical_to_reversible(adder_circ)(c, args)
}

/// A named, buildable example program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExampleId {
    PlusMinus,
    Share,
    Bell00,
    Alice,
    Bob,
    Teleport,
    TeleportGeneric(Tree<WireKind>),
    TeleportGenericLabeled(Tree<WireKind>),
    Qft(usize),
    QftInverse(usize),
    QftAdd(usize),
    QftAddBoxed(usize),
    AdderCirc,
    AdderReversible,
    AdderBinary,
}

#[derive(Debug, Error)]
pub enum ExampleError {
    #[error("unknown example {0:?}")]
    Unknown(String),
    #[error("bad shape: {0}")]
    Shape(#[from] ShapeParseError),
    #[error("teleport_generic needs an all-quantum shape, got {0}")]
    ClassicalShape(Tree<WireKind>),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Transform(#[from] TransformError),
}

impl ExampleId {
    pub const NAMES: [&'static str; 15] = [
        "plus_minus",
        "share",
        "bell00",
        "alice",
        "bob",
        "teleport",
        "teleport_generic",
        "teleport_generic_labeled",
        "qft",
        "qft_inverse",
        "qft_add",
        "qft_add_boxed",
        "adder_circ",
        "adder_reversible",
        "adder_binary",
    ];

    /// `n` sizes the register examples; `shape` (default `(q,q)`) is the
    /// data teleported by the generic examples.
    pub fn from_name(name: &str, n: usize, shape: Option<&str>) -> Result<ExampleId, ExampleError> {
        let shape = || -> Result<Tree<WireKind>, ExampleError> {
            let s: Tree<WireKind> = shape.unwrap_or("(q,q)").parse()?;
            if s.leaves().iter().any(|k| **k != WireKind::Quantum) {
                return Err(ExampleError::ClassicalShape(s));
            }
            Ok(s)
        };
        Ok(match name {
            "plus_minus" => ExampleId::PlusMinus,
            "share" => ExampleId::Share,
            "bell00" => ExampleId::Bell00,
            "alice" => ExampleId::Alice,
            "bob" => ExampleId::Bob,
            "teleport" => ExampleId::Teleport,
            "teleport_generic" => ExampleId::TeleportGeneric(shape()?),
            "teleport_generic_labeled" => ExampleId::TeleportGenericLabeled(shape()?),
            "qft" => ExampleId::Qft(n),
            "qft_inverse" => ExampleId::QftInverse(n),
            "qft_add" => ExampleId::QftAdd(n),
            "qft_add_boxed" => ExampleId::QftAddBoxed(n),
            "adder_circ" => ExampleId::AdderCirc,
            "adder_reversible" => ExampleId::AdderReversible,
            "adder_binary" => ExampleId::AdderBinary,
            _ => return Err(ExampleError::Unknown(name.to_string())),
        })
    }

    pub fn build(&self) -> Result<ShapedCircuit, ExampleError> {
        let reg = |n: usize| vec![QUBIT; n];
        let sc = match self {
            ExampleId::PlusMinus => extract(&(), |c, ()| plus_minus(c, false))?,
            ExampleId::Share => extract(&QUBIT, share)?,
            ExampleId::Bell00 => extract(&(), |c, ()| bell00(c))?,
            ExampleId::Alice => extract(&(QUBIT, QUBIT), |c, (q, a)| alice(c, q, a))?,
            ExampleId::Bob => extract(&(QUBIT, (BIT, BIT)), |c, (b, xy)| bob(c, b, xy))?,
            ExampleId::Teleport => extract(&QUBIT, teleport)?,
            ExampleId::TeleportGeneric(s) => extract(&s.map(&mut |_| QUBIT), teleport_generic)?,
            ExampleId::TeleportGenericLabeled(s) => extract(&s.map(&mut |_| QUBIT), teleport_generic_labeled)?,
            ExampleId::Qft(n) => extract(&reg(*n), qft_big_endian)?,
            ExampleId::QftInverse(n) => extract(&reg(*n), inverse_qft_big_endian)?,
            ExampleId::QftAdd(n) => extract(&(reg(*n), reg(*n)), qft_add_in_place)?,
            ExampleId::QftAddBoxed(n) => extract(&(reg(*n), reg(*n)), qft_add_in_place_boxed)?,
            ExampleId::AdderCirc => extract(&(QUBIT, QUBIT, QUBIT), adder_circ)?,
            ExampleId::AdderReversible => extract(&((QUBIT, QUBIT, QUBIT), (QUBIT, QUBIT)), adder_reversible)?,
            ExampleId::AdderBinary => {
                let sc = extract(&(QUBIT, QUBIT, QUBIT), adder_circ)?;
                ShapedCircuit { circuit: decompose_binary(&sc.circuit)?, ..sc }
            }
        };
        Ok(sc)
    }
}

impl fmt::Display for ExampleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExampleId::PlusMinus => f.write_str("plus_minus"),
            ExampleId::Share => f.write_str("share"),
            ExampleId::Bell00 => f.write_str("bell00"),
            ExampleId::Alice => f.write_str("alice"),
            ExampleId::Bob => f.write_str("bob"),
            ExampleId::Teleport => f.write_str("teleport"),
            ExampleId::TeleportGeneric(s) => write!(f, "teleport_generic {s}"),
            ExampleId::TeleportGenericLabeled(s) => write!(f, "teleport_generic_labeled {s}"),
            ExampleId::Qft(n) => write!(f, "qft {n}"),
            ExampleId::QftInverse(n) => write!(f, "qft_inverse {n}"),
            ExampleId::QftAdd(n) => write!(f, "qft_add {n}"),
            ExampleId::QftAddBoxed(n) => write!(f, "qft_add_boxed {n}"),
            ExampleId::AdderCirc => f.write_str("adder_circ"),
            ExampleId::AdderReversible => f.write_str("adder_reversible"),
            ExampleId::AdderBinary => f.write_str("adder_binary"),
        }
    }
}
