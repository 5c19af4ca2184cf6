mod common;

use proptest::prelude::*;
use quill::boolexpr::{BoolExpr, ClassicalFunction};
use quill::builder::reverse_endo;
use quill::ir::{parse, serialize};
use quill::ops::{classical_to_reversible, compile_classical};
use quill::resources::{count, flatten, Counter};
use quill::sim::{circuit_unitary, index_bits, sim_classical, sim_vector, Matrix, Rng};
use quill::transform::{arity_violations, decompose, transform, GateSet, StripComments};
use quill::{extract, BuildError, Circ, Circuit, Control, NamedGate, Qubit, QUBIT};

use common::{below, coin, random_circuit, random_circuit_to, random_valid};

/// Random measurement-free circuit over `n` qubits with multiply
/// controlled gates, scoped ancillas and boxed calls (some inverted).
fn random_unitary(rng: &mut Rng, n: usize, steps: usize) -> Circuit {
    fn rot(c: &mut Circ, qs: Vec<Qubit>) -> Result<Vec<Qubit>, BuildError> {
        c.hadamard(qs[0])?;
        for w in qs.windows(2) {
            c.rgate(3, w[1], &[w[0].ctrl()])?;
        }
        c.gate_s(qs[qs.len() - 1])?;
        Ok(qs)
    }
    extract(&vec![QUBIT; n], |c, qs| {
        let mut qs = qs;
        for _ in 0..steps {
            let t = qs[below(rng, n)];
            let mut ctrls: Vec<Control> = Vec::new();
            for q in &qs {
                if *q != t && below(rng, 3) == 0 {
                    ctrls.push(if coin(rng) { q.ctrl() } else { q.neg() });
                }
            }
            match below(rng, 6) {
                0 => {
                    let g = NamedGate::ALL[below(rng, 6)];
                    c.gate(g, t, &ctrls)?;
                }
                1 => {
                    let g = NamedGate::ALL[below(rng, 6)];
                    c.gate_inv(g, t, &ctrls)?;
                }
                2 => {
                    c.rgate(1 + below(rng, 5) as u32, t, &ctrls)?;
                }
                3 => {
                    let a = c.qinit(false)?;
                    c.gate(NamedGate::X, a, &ctrls)?;
                    c.gate(NamedGate::Z, t, &[a.ctrl()])?;
                    c.gate(NamedGate::X, a, &ctrls)?;
                    c.qterm(a, false)?;
                }
                4 => {
                    qs = c.boxed("rot", qs, rot)?;
                }
                _ => {
                    qs = reverse_endo(|c: &mut Circ, a: Vec<Qubit>| c.boxed("rot", a, rot))(c, qs)?;
                }
            }
        }
        Ok(qs)
    })
    .unwrap()
    .circuit
}

/// A random expression over `arity` variables with its truth table, indexed
/// by the input read most significant first.
fn random_expr(rng: &mut Rng, arity: usize, depth: usize) -> (BoolExpr, Vec<bool>) {
    let rows = 1usize << arity;
    if depth == 0 || below(rng, 4) == 0 {
        if below(rng, 5) == 0 {
            let v = coin(rng);
            return (BoolExpr::Const(v), vec![v; rows]);
        }
        let i = below(rng, arity);
        let table = (0..rows).map(|r| (r >> (arity - 1 - i)) & 1 == 1).collect();
        return (BoolExpr::var(i), table);
    }
    let (a, ta) = random_expr(rng, arity, depth - 1);
    if below(rng, 5) == 0 {
        return (BoolExpr::not(a), ta.iter().map(|x| !x).collect());
    }
    let (b, tb) = random_expr(rng, arity, depth - 1);
    let zip = |f: fn(bool, bool) -> bool| ta.iter().zip(&tb).map(|(x, y)| f(*x, *y)).collect::<Vec<_>>();
    match below(rng, 3) {
        0 => (BoolExpr::and(a, b), zip(|x, y| x & y)),
        1 => (BoolExpr::or(a, b), zip(|x, y| x | y)),
        _ => (BoolExpr::xor(a, b), zip(|x, y| x ^ y)),
    }
}

fn unitary_close(a: &Matrix, b: &Matrix) -> bool {
    a.max_diff(b) < 1e-9
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn text_round_trip(seed in any::<u64>()) {
        let c = random_valid(&mut Rng::new(seed), 40);
        let text = serialize(&c);
        prop_assert_eq!(parse(&text).unwrap(), c.clone());
        prop_assert_eq!(serialize(&parse(&text).unwrap()), text);
    }

    #[test]
    fn reversal_is_an_involution(seed in any::<u64>()) {
        let c = random_valid(&mut Rng::new(seed), 40);
        if let Ok(r) = c.reversed() {
            r.validate().unwrap();
            prop_assert_eq!(r.reversed().unwrap(), c);
        }
    }

    #[test]
    fn reversal_inverts_the_unitary(seed in any::<u64>()) {
        let mut rng = Rng::new(seed);
        let n = 1 + below(&mut rng, 3);
        let c = random_unitary(&mut rng, n, 12);
        let u = circuit_unitary(&c).unwrap();
        let v = circuit_unitary(&c.reversed().unwrap()).unwrap();
        prop_assert!(unitary_close(&(&v * &u), &Matrix::identity(1 << n)));
    }

    #[test]
    fn flattening_preserves_the_unitary_and_counts(seed in any::<u64>()) {
        let mut rng = Rng::new(seed);
        let n = 1 + below(&mut rng, 3);
        let c = random_unitary(&mut rng, n, 12);
        let flat = flatten(&c, None).unwrap();
        prop_assert!(flat.subroutines.is_empty());
        prop_assert!(unitary_close(&circuit_unitary(&c).unwrap(), &circuit_unitary(&flat).unwrap()));
        prop_assert_eq!(count(&c), count(&flat));
    }

    #[test]
    fn counting_agrees_with_flattening(seed in any::<u64>()) {
        let c = random_valid(&mut Rng::new(seed), 30);
        let flat = flatten(&c, None).unwrap();
        prop_assert_eq!(count(&c), count(&flat));
    }

    #[test]
    fn decomposition_preserves_the_unitary(seed in any::<u64>()) {
        let mut rng = Rng::new(seed);
        let n = 1 + below(&mut rng, 3);
        let c = random_unitary(&mut rng, n, 8);
        let u = circuit_unitary(&c).unwrap();
        for gs in [GateSet::Binary, GateSet::Toffoli] {
            let d = decompose(gs, &c).unwrap();
            prop_assert!(arity_violations(&d, gs.arity()).is_empty());
            prop_assert!(u.phase_diff(&circuit_unitary(&d).unwrap()) < 1e-9);
        }
    }

    #[test]
    fn decomposition_keeps_shapes(seed in any::<u64>()) {
        let sc = random_circuit(&mut Rng::new(seed), 30);
        for gs in [GateSet::Binary, GateSet::Toffoli] {
            let d = decompose(gs, &sc.circuit).unwrap();
            prop_assert!(arity_violations(&d, gs.arity()).is_empty());
            let kinds = |es: &[quill::Endpoint]| es.iter().map(|e| e.kind).collect::<Vec<_>>();
            prop_assert_eq!(kinds(d.inputs()), kinds(sc.circuit.inputs()));
            prop_assert_eq!(kinds(d.outputs()), kinds(sc.circuit.outputs()));
        }
    }

    #[test]
    fn comments_do_not_matter(seed in any::<u64>()) {
        let sc = random_circuit(&mut Rng::new(seed), 30);
        let stripped = transform(&mut StripComments, &sc.circuit).unwrap();
        prop_assert!(stripped.gates().iter().all(|g| !g.is_comment()));
        prop_assert_eq!(count(&stripped), count(&sc.circuit));
        if sc.circuit.inputs().iter().all(|e| e.kind == quill::WireKind::Quantum)
            && sc.circuit.outputs().iter().all(|e| e.kind == quill::WireKind::Quantum)
            && sc.circuit.inputs().len() <= 4
            && sc.circuit.outputs().len() <= 6
        {
            let a = circuit_unitary(&sc.circuit);
            let b = circuit_unitary(&stripped);
            if let (Ok(a), Ok(b)) = (a, b) {
                prop_assert!(unitary_close(&a, &b));
            }
        }
    }

    #[test]
    fn compiled_functions_match_truth_tables(seed in any::<u64>()) {
        let mut rng = Rng::new(seed);
        let arity = 1 + below(&mut rng, 3);
        let outs = 1 + below(&mut rng, 2);
        let (exprs, tables): (Vec<_>, Vec<_>) = (0..outs).map(|_| random_expr(&mut rng, arity, 3)).unzip();
        let f = ClassicalFunction::new(arity, exprs).unwrap();
        let plain = extract(&vec![QUBIT; arity], compile_classical(&f)).unwrap();
        let g = |c: &mut Circ, x: Vec<Qubit>| compile_classical(&f)(c, x);
        let rev = extract(&(vec![QUBIT; arity], vec![QUBIT; outs]), classical_to_reversible(g)).unwrap();
        prop_assert_eq!(rev.garbage(), 0);
        for row in 0..1usize << arity {
            let x = index_bits(row, arity);
            let want: Vec<bool> = tables.iter().map(|t| t[row]).collect();
            let out = sim_classical(&plain.circuit, &x).unwrap();
            prop_assert_eq!(&out[..outs], &want[..]);
            for ys in 0..1usize << outs {
                let y = index_bits(ys, outs);
                let mut input = x.clone();
                input.extend(&y);
                let mut expect = x.clone();
                expect.extend(y.iter().zip(&want).map(|(a, b)| a ^ b));
                prop_assert_eq!(sim_classical(&rev.circuit, &input).unwrap(), expect);
            }
        }
    }

    #[test]
    fn classical_and_vector_agree_on_permutations(seed in any::<u64>()) {
        let mut rng = Rng::new(seed);
        let n = 1 + below(&mut rng, 5);
        let steps = below(&mut rng, 30);
        let c = extract(&vec![QUBIT; n], |c, qs| {
            for _ in 0..steps {
                let t = qs[below(&mut rng, n)];
                let mut ctrls: Vec<Control> = Vec::new();
                for q in &qs {
                    if *q != t && below(&mut rng, 3) == 0 {
                        ctrls.push(if coin(&mut rng) { q.ctrl() } else { q.neg() });
                    }
                }
                c.gate(NamedGate::X, t, &ctrls)?;
            }
            Ok(qs)
        })
        .unwrap()
        .circuit;
        for row in 0..1usize << n {
            let x = index_bits(row, n);
            let a = sim_classical(&c, &x).unwrap();
            let b = sim_vector(&c, &x, &mut Rng::new(seed)).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn streaming_count_matches_batch(seed in any::<u64>()) {
        let sc = random_circuit(&mut Rng::new(seed), 40);
        let mut counter = Counter::new();
        let ex = random_circuit_to(&mut Rng::new(seed), 40, &mut counter);
        prop_assert_eq!(ex.outputs, sc.circuit.outputs().to_vec());
        prop_assert_eq!(counter.report(), count(&sc.circuit));
    }
}
