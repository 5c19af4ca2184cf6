use num_bigint::BigUint;
use quill::ir::serialize;
use quill::programs::{self, ExampleId};
use quill::resources::{count, flatten, GateClass};
use quill::sim::{
    bits_index, circuit_unitary, index_bits, sim_classical, sim_vector, sim_vector_state, simulate_shaped, Matrix, Rng, Simulator,
};
use quill::{extract, GateKind, NamedGate, Tree, QUBIT};


#[test]
fn plus_minus_document() {
    let sc = ExampleId::PlusMinus.build().unwrap();
    let text = serialize(&sc.circuit);
    assert_eq!(text, "Inputs:\nQInit0(0)\nQGate[\"H\"](0)\nOutputs: 0:Qbit\n");
    let kinds: Vec<&GateKind> = sc.circuit.gates().iter().map(|g| &g.kind).collect();
    assert_eq!(kinds, [&GateKind::QInit(false), &GateKind::Named(NamedGate::H)]);
}

#[test]
fn bell00_state() {
    let sc = ExampleId::Bell00.build().unwrap();
    let s = sim_vector_state(&sc.circuit, &[]).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let want = [h, 0.0, 0.0, h];
    for (a, w) in s.amplitudes().iter().zip(want) {
        assert!((a.re - w).abs() < 1e-12 && a.im.abs() < 1e-12);
    }
}

#[test]
fn teleport_basis_states() {
    let sc = ExampleId::Teleport.build().unwrap();
    let mut rng = Rng::new(11);
    for b in [false, true] {
        for _ in 0..20 {
            let out = sim_vector(&sc.circuit, &[b], &mut rng).unwrap();
            assert_eq!(out, [b]);
        }
    }
}

#[test]
fn teleport_generic_measure_counts() {
    for (shape, pairs) in [("(q,q)", 2), ("[q;3]", 3), ("q", 1), ("((q,[q;2]),q)", 4)] {
        let sc = ExampleId::from_name("teleport_generic", 0, Some(shape)).unwrap().build().unwrap();
        let measures = sc.circuit.gates().iter().filter(|g| g.kind == GateKind::Measure).count();
        assert_eq!(measures, 2 * pairs, "{shape}");
        let input: Tree<bool> = sc.input.map(&mut |_| true);
        let out = simulate_shaped(Simulator::Stabilizer, &sc, &input, &mut Rng::new(3)).unwrap();
        assert_eq!(out, input);
    }
}

#[test]
fn teleport_generic_rejects_classical_shape() {
    assert!(ExampleId::from_name("teleport_generic", 0, Some("(q,c)")).is_err());
}

#[test]
fn qft_matches_dft() {
    for n in 1..=4 {
        let sc = ExampleId::Qft(n).build().unwrap();
        let u = circuit_unitary(&sc.circuit).unwrap();
        assert!(u.max_diff(&Matrix::dft(1 << n)) < 1e-10, "n = {n}");
        let inv = ExampleId::QftInverse(n).build().unwrap();
        let v = circuit_unitary(&inv.circuit).unwrap();
        assert!((&v * &u).max_diff(&Matrix::identity(1 << n)) < 1e-10);
    }
}

#[test]
fn qft_gate_counts() {
    for n in 0..=8usize {
        let r = count(&ExampleId::Qft(n).build().unwrap().circuit);
        let h = GateClass::Named { gate: NamedGate::H, inverted: false, controls: 0 };
        assert_eq!(r.get(h), BigUint::from(n));
        let rotations: BigUint = r
            .gates
            .iter()
            .filter(|(c, _)| matches!(c, GateClass::Rotation { controls: 1, .. }))
            .map(|(_, k)| k.clone())
            .sum();
        assert_eq!(rotations, BigUint::from(n * n.saturating_sub(1) / 2));
        assert_eq!(r.total(), BigUint::from(n + n * n.saturating_sub(1) / 2));
    }
}

#[test]
fn qft_of_nothing_is_empty() {
    let sc = ExampleId::Qft(0).build().unwrap();
    assert!(sc.circuit.inputs().is_empty());
    assert!(sc.circuit.gates().is_empty());
    assert_eq!(serialize(&sc.circuit), "Inputs:\nOutputs:\n");
}

#[test]
fn draper_adds_big_endian() {
    for n in 1..=3 {
        for boxed in [false, true] {
            let sc = if boxed { ExampleId::QftAddBoxed(n) } else { ExampleId::QftAdd(n) }.build().unwrap();
            for a in 0..1usize << n {
                for b in 0..1usize << n {
                    let mut input = index_bits(a, n);
                    input.extend(index_bits(b, n));
                    let out = sim_vector(&sc.circuit, &input, &mut Rng::new(0)).unwrap();
                    assert_eq!(bits_index(&out[..n]), a);
                    assert_eq!(bits_index(&out[n..]), (a + b) % (1 << n), "{a} + {b}, n = {n}");
                }
            }
        }
    }
}

#[test]
fn boxed_adder_has_two_calls_and_one_subroutine() {
    let sc = ExampleId::QftAddBoxed(3).build().unwrap();
    let calls: Vec<bool> = sc
        .circuit
        .gates()
        .iter()
        .filter(|g| matches!(g.kind, GateKind::SubCall { .. }))
        .map(|g| g.inverted)
        .collect();
    assert_eq!(calls, [false, true]);
    assert_eq!(sc.circuit.subroutines.len(), 1);
    let flat = flatten(&sc.circuit, None).unwrap();
    let plain = ExampleId::QftAdd(3).build().unwrap();
    assert_eq!(count(&flat).total(), count(&plain.circuit).total());
    let a = circuit_unitary(&flat).unwrap();
    let b = circuit_unitary(&plain.circuit).unwrap();
    assert!(a.max_diff(&b) < 1e-10);
}

#[test]
fn adder_truth_table() {
    let sc = ExampleId::AdderCirc.build().unwrap();
    let bin = ExampleId::AdderBinary.build().unwrap();
    for v in 0..8 {
        let bits = index_bits(v, 3);
        let ones = bits.iter().filter(|b| **b).count();
        let want = Tree::Tuple(vec![Tree::Leaf(ones % 2 == 1), Tree::Leaf(ones >= 2)]);
        let input = Tree::Tuple(bits.iter().map(|b| Tree::Leaf(*b)).collect());
        for s in [&sc, &bin] {
            let out = simulate_shaped(Simulator::Classical, s, &input, &mut Rng::new(0)).unwrap();
            assert_eq!(out, want, "{bits:?}");
        }
    }
    assert_eq!(sim_classical(&sc.circuit, &[true, true, false]).unwrap()[..2], [false, true]);
}

#[test]
fn adder_reversible_uncomputes() {
    let sc = ExampleId::AdderReversible.build().unwrap();
    assert_eq!(sc.garbage(), 0);
    for v in 0..32 {
        let bits = index_bits(v, 5);
        let out = sim_classical(&sc.circuit, &bits).unwrap();
        let ones = bits[..3].iter().filter(|b| **b).count();
        assert_eq!(out[..3], bits[..3]);
        assert_eq!(out[3], bits[3] ^ (ones % 2 == 1));
        assert_eq!(out[4], bits[4] ^ (ones >= 2));
    }
}

#[test]
fn every_example_validates() {
    for name in ExampleId::NAMES {
        let sc = ExampleId::from_name(name, 3, None).unwrap().build().unwrap();
        sc.circuit.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn labeled_teleport_carries_comments() {
    let sc = ExampleId::from_name("teleport_generic_labeled", 0, Some("[q;2]")).unwrap().build().unwrap();
    let texts: Vec<&str> = sc
        .circuit
        .gates()
        .iter()
        .filter_map(|g| match &g.kind {
            GateKind::Comment { text, .. } => Some(text.as_str()),
            _ => None,
        })
        .collect();
    assert_eq!(texts, ["ENTER: bell00", "ENTER: alice", "ENTER: bob"]);
}

#[test]
fn share_entangles() {
    let sc = extract(&QUBIT, programs::share).unwrap();
    let s = sim_vector_state(&sc.circuit, &[true]).unwrap();
    assert!((s.amplitudes()[3].re - 1.0).abs() < 1e-12);
}
