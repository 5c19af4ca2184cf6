//! Random circuit generators shared by the integration tests.
#![allow(dead_code)]

use quill::builder::{extract_to, reverse_endo, Extracted, GateSink};
use quill::sim::Rng;
use quill::{extract, BuildError, Bit, Circ, Circuit, Control, NamedGate, Qubit, ShapedCircuit, BIT, QUBIT};

pub fn below(rng: &mut Rng, n: usize) -> usize {
    (rng.next_u64() % n as u64) as usize
}

pub fn coin(rng: &mut Rng) -> bool {
    rng.next_u64() & 1 == 1
}

fn pick<T: Copy>(rng: &mut Rng, xs: &[T]) -> T {
    xs[below(rng, xs.len())]
}

fn take(rng: &mut Rng, xs: &mut Vec<Qubit>) -> Qubit {
    let i = below(rng, xs.len());
    xs.swap_remove(i)
}

/// Up to two quantum and one classical control, none on `target`.
fn controls(rng: &mut Rng, qs: &[Qubit], bs: &[Bit], target: Qubit) -> Vec<Control> {
    let mut out = Vec::new();
    let others: Vec<Qubit> = qs.iter().copied().filter(|q| *q != target).collect();
    let k = below(rng, 3).min(others.len());
    let mut pool = others;
    for _ in 0..k {
        let q = take(rng, &mut pool);
        out.push(if coin(rng) { q.ctrl() } else { q.neg() });
    }
    if !bs.is_empty() && below(rng, 4) == 0 {
        let b = pick(rng, bs);
        out.push(if coin(rng) { b.ctrl() } else { b.neg() });
    }
    out
}

const TEXTS: [&str; 5] = ["step", "say \"hi\"", "back\\slash", "a -- b", "unicode: ψ"];

/// Boxed body whose shape and content depend only on the argument count, so
/// repeated uses under one name always agree.
fn hadamards(c: &mut Circ, qs: Vec<Qubit>) -> Result<Vec<Qubit>, BuildError> {
    let a = c.qinit(false)?;
    for q in &qs {
        c.hadamard(*q)?;
        c.gate(NamedGate::X, a, &[q.ctrl()])?;
    }
    c.gate_t(a)?;
    c.gate_inv(NamedGate::T, a, &[])?;
    for q in qs.iter().rev() {
        c.gate(NamedGate::X, a, &[q.ctrl()])?;
    }
    c.qterm(a, false)?;
    Ok(qs)
}

fn phases(c: &mut Circ, qs: Vec<Qubit>) -> Result<Vec<Qubit>, BuildError> {
    for (i, q) in qs.iter().enumerate() {
        c.rgate(i as u32 + 2, *q, &[])?;
    }
    Ok(qs)
}

/// A random valid circuit using every gate kind, boxes, repetition,
/// inverted calls and `with_computed`.
pub fn random_circuit(rng: &mut Rng, max_gates: usize) -> ShapedCircuit {
    let (template, steps) = random_shape(rng, max_gates);
    extract(&template, |c, (qs, bs)| random_body(c, rng, steps, qs, bs)).expect("generator builds valid circuits")
}

/// The same program as [`random_circuit`] for the same generator state,
/// streamed into `sink`.
pub fn random_circuit_to(rng: &mut Rng, max_gates: usize, sink: &mut dyn GateSink) -> Extracted {
    let (template, steps) = random_shape(rng, max_gates);
    extract_to(&template, sink, |c, (qs, bs)| random_body(c, rng, steps, qs, bs)).expect("generator builds valid circuits")
}

fn random_shape(rng: &mut Rng, max_gates: usize) -> ((Vec<Qubit>, Vec<Bit>), usize) {
    let nq = 1 + below(rng, 4);
    let nc = below(rng, 3);
    ((vec![QUBIT; nq], vec![BIT; nc]), below(rng, max_gates + 1))
}

fn random_body(
    c: &mut Circ,
    rng: &mut Rng,
    steps: usize,
    mut qs: Vec<Qubit>,
    mut bs: Vec<Bit>,
) -> Result<(Vec<Qubit>, Vec<Bit>), BuildError> {
    {
        for _ in 0..steps {
            match below(rng, 13) {
                0 => qs.push(c.qinit(coin(rng))?),
                1 if qs.len() > 1 => {
                    let q = take(rng, &mut qs);
                    c.qterm(q, coin(rng))?;
                }
                2 => bs.push(c.cinit(coin(rng))?),
                3 if !bs.is_empty() => {
                    let i = below(rng, bs.len());
                    c.cdiscard(bs.swap_remove(i))?;
                }
                4 if qs.len() > 1 => {
                    let q = take(rng, &mut qs);
                    bs.push(c.measure(q)?);
                }
                5 | 6 => {
                    let t = pick(rng, &qs);
                    let ctrls = controls(rng, &qs, &bs, t);
                    let g = pick(rng, &NamedGate::ALL);
                    if coin(rng) {
                        c.gate_inv(g, t, &ctrls)?;
                    } else {
                        c.gate(g, t, &ctrls)?;
                    }
                }
                7 => {
                    let t = pick(rng, &qs);
                    let ctrls = controls(rng, &qs, &bs, t);
                    let m = 1 + below(rng, 6) as u32;
                    if coin(rng) {
                        c.rgate_inv(m, t, &ctrls)?;
                    } else {
                        c.rgate(m, t, &ctrls)?;
                    }
                }
                8 => {
                    let text = pick(rng, &TEXTS);
                    let labels = qs.iter().enumerate().map(|(i, q)| (q.wire(), format!("q[{i}]"))).collect();
                    c.comment_with_labels(text, labels)?;
                }
                9 => {
                    let args = std::mem::take(&mut qs);
                    let name = format!("had{}", args.len());
                    qs = c.boxed(&name, args, hadamards)?;
                }
                10 => {
                    let args = std::mem::take(&mut qs);
                    let name = format!("ph{}", args.len());
                    let reps = 1 + rng.next_u64() % 1000;
                    qs = c.boxed_repeated(&name, reps, args, phases)?;
                }
                11 => {
                    let args = std::mem::take(&mut qs);
                    let name = format!("had{}", args.len());
                    let f = move |c: &mut Circ, a: Vec<Qubit>| c.boxed(&name, a, hadamards);
                    qs = reverse_endo(f)(c, args)?;
                }
                12 if qs.len() > 1 => {
                    let (a, b) = (qs[0], qs[1]);
                    c.with_computed(
                        |c| {
                            c.hadamard(a)?;
                            c.gate_s(a)
                        },
                        |c, a| c.gate(NamedGate::Z, b, &[a.ctrl()]),
                    )?;
                }
                _ => {}
            }
        }
        Ok((qs, bs))
    }
}

pub fn random_valid(rng: &mut Rng, max_gates: usize) -> Circuit {
    random_circuit(rng, max_gates).circuit
}

/// A random Clifford circuit on `n` inputs with at most `max_gates` gates:
/// H, S, S*, X, Y, Z, CNOT and CZ, with occasional mid-circuit measurement
/// feeding a classically controlled Pauli. Every quantum output is measured
/// by the simulators at the end.
pub fn random_clifford(rng: &mut Rng, n: usize, max_gates: usize) -> Circuit {
    let steps = below(rng, max_gates + 1);
    extract(&vec![QUBIT; n], |c, mut qs| {
        let mut bs: Vec<Bit> = Vec::new();
        for _ in 0..steps {
            let t = pick(rng, &qs);
            let other: Vec<Qubit> = qs.iter().copied().filter(|q| *q != t).collect();
            match below(rng, 10) {
                0 | 1 => {
                    c.hadamard(t)?;
                }
                2 => {
                    c.gate_s(t)?;
                }
                3 => {
                    c.gate_inv(NamedGate::S, t, &[])?;
                }
                4 => {
                    let g = pick(rng, &[NamedGate::X, NamedGate::Y, NamedGate::Z]);
                    c.gate(g, t, &[])?;
                }
                5 | 6 if !other.is_empty() => {
                    c.controlled_not(t, pick(rng, &other))?;
                }
                7 if !other.is_empty() => {
                    c.gate(NamedGate::Z, t, &[pick(rng, &other).ctrl()])?;
                }
                8 if qs.len() > 1 && bs.len() < 2 => {
                    let i = qs.iter().position(|q| *q == t).unwrap();
                    qs.remove(i);
                    bs.push(c.measure(t)?);
                }
                9 if !bs.is_empty() => {
                    let b = pick(rng, &bs);
                    let g = pick(rng, &[NamedGate::X, NamedGate::Z]);
                    c.gate(g, t, &[b.ctrl()])?;
                }
                _ => {
                    c.hadamard(t)?;
                }
            }
        }
        Ok((qs, bs))
    })
    .expect("generator builds valid circuits")
    .circuit
}
