use num_complex::Complex64;
use proptest::prelude::*;

use qgate_core::compiler::{
    compile_direct_term, compile_pauli_rotation, expand_projector_pauli, label_coefficients, trotter_schedule,
    SparseHamiltonian, TermOrdering, TrotterOrder,
};
use qgate_core::io::{parse_matrix_market, parse_pauli_terms, write_matrix_market, write_pauli_terms};
use qgate_core::pauli::pauli_rotation_matrix;
use qgate_core::stabilizer::conjugate_pauli;
use qgate_core::{
    execute, program_unitary, Clifford, DenseMatrix, ExecMode, FramePolicy, Gate, Letter, PauliString, QGateProgram,
    StateVector,
};

fn letter() -> impl Strategy<Value = Letter> {
    prop_oneof![Just(Letter::I), Just(Letter::X), Just(Letter::Y), Just(Letter::Z)]
}

fn pauli(n: usize) -> impl Strategy<Value = PauliString> {
    (prop::collection::vec(letter(), n), 0u8..4).prop_map(|(ls, k)| PauliString::from_letters(&ls).with_phase(k))
}

fn pauli_triple() -> impl Strategy<Value = (PauliString, PauliString, PauliString)> {
    (1usize..=4).prop_flat_map(|n| (pauli(n), pauli(n), pauli(n)))
}

fn close(a: &DenseMatrix, b: &DenseMatrix, tol: f64) -> bool {
    (a - b).norm() < tol
}

fn clifford_dense(n: usize, gate: Clifford) -> DenseMatrix {
    let dim = 1 << n;
    let mut m = DenseMatrix::zeros(dim, dim);
    for col in 0..dim {
        let mut s = StateVector::init_basis(n, col).unwrap();
        match gate {
            Clifford::H(q) => s.apply_single(q, Gate::H),
            Clifford::S(q) => s.apply_single(q, Gate::S),
            Clifford::Sdg(q) => s.apply_single(q, Gate::Sdg),
            Clifford::X(q) => s.apply_single(q, Gate::X),
            Clifford::Y(q) => s.apply_single(q, Gate::Y),
            Clifford::Z(q) => s.apply_single(q, Gate::Z),
            Clifford::CX(c, t) => s.apply_controlled_pauli(c, t, Letter::X),
            Clifford::CY(c, t) => s.apply_controlled_pauli(c, t, Letter::Y),
            Clifford::CZ(c, t) => s.apply_controlled_pauli(c, t, Letter::Z),
        }
        .unwrap();
        for (row, a) in s.amplitudes().iter().enumerate() {
            m[(row, col)] = *a;
        }
    }
    m
}

fn clifford(n: usize) -> impl Strategy<Value = Clifford> {
    let single = (0..6usize, 0..n).prop_map(|(k, q)| match k {
        0 => Clifford::H(q),
        1 => Clifford::S(q),
        2 => Clifford::Sdg(q),
        3 => Clifford::X(q),
        4 => Clifford::Y(q),
        _ => Clifford::Z(q),
    });
    let pair = (0..3usize, 0..n, 1..n.max(2)).prop_map(move |(k, c, off)| {
        let t = (c + off) % n;
        match k {
            0 => Clifford::CX(c, t),
            1 => Clifford::CY(c, t),
            _ => Clifford::CZ(c, t),
        }
    });
    if n == 1 {
        single.boxed()
    } else {
        prop_oneof![single, pair].boxed()
    }
}

proptest! {
    #[test]
    fn multiplication_is_associative((a, b, c) in pauli_triple()) {
        let left = a.multiply(&b).unwrap().multiply(&c).unwrap();
        let right = a.multiply(&b.multiply(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn multiplication_matches_dense((a, b, _) in pauli_triple()) {
        let prod = a.multiply(&b).unwrap().to_dense().unwrap();
        prop_assert!(close(&prod, &(a.to_dense().unwrap() * b.to_dense().unwrap()), 1e-12));
    }

    #[test]
    fn commutation_matches_dense((a, b, _) in pauli_triple()) {
        let (da, db) = (a.to_dense().unwrap(), b.to_dense().unwrap());
        let commute = close(&(&da * &db), &(&db * &da), 1e-12);
        prop_assert_eq!(a.commutes(&b).unwrap(), commute);
    }

    #[test]
    fn conjugation_matches_dense((g, gate) in (1usize..=3).prop_flat_map(|n| (pauli(n), clifford(n)))) {
        let n = g.n_qubits();
        let u = clifford_dense(n, gate);
        let want = &u * g.to_dense().unwrap() * u.adjoint();
        let got = conjugate_pauli(&g, gate).unwrap().to_dense().unwrap();
        prop_assert!(close(&got, &want, 1e-12));
    }

    #[test]
    fn compiled_rotation_is_exact(p in (1usize..=4).prop_flat_map(pauli), phi in -4.0f64..4.0) {
        // rotations are defined for Hermitian strings
        let p = if p.is_hermitian() { p } else { p.with_phase(0) };
        let prog = compile_pauli_rotation(&p, phi).unwrap();
        let u = program_unitary(&prog).unwrap();
        prop_assert!(close(u.matrix(), &pauli_rotation_matrix(&p, phi).unwrap(), 1e-10));
    }

    #[test]
    fn branches_agree(p in (1usize..=3).prop_flat_map(pauli), phi in -4.0f64..4.0, seed in any::<u64>()) {
        let p = p.with_phase(0);
        let prog = compile_pauli_rotation(&p, phi).unwrap();
        let psi = StateVector::random(p.n_qubits(), &mut <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed));
        let results = execute(&prog, &psi, ExecMode::AllBranches, FramePolicy::TrackToEnd).unwrap();
        let total: f64 = results.iter().map(|r| r.weight).sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
        for r in &results[1..] {
            prop_assert!(r.final_state.max_abs_diff(&results[0].final_state).unwrap() < 1e-10);
        }
    }

    #[test]
    fn labels_partition_qubits(n in 1usize..=6, i in any::<usize>(), j in any::<usize>()) {
        let (i, j) = (i % (1 << n), j % (1 << n));
        let labels = label_coefficients(i, j, n).unwrap();
        let mut seen = labels.flip_set();
        seen.extend(labels.number_keys().into_iter().map(|(q, _)| q));
        seen.sort();
        prop_assert_eq!(seen, (0..n).collect::<Vec<_>>());
    }

    #[test]
    fn projector_expansion_matches_dense(n in 1usize..=3, i in any::<usize>(), j in any::<usize>(), re in -1.0f64..1.0, im in -1.0f64..1.0) {
        let (i, j) = (i % (1 << n), j % (1 << n));
        let h = if i == j { Complex64::new(re, 0.0) } else { Complex64::new(re, im) };
        let terms = expand_projector_pauli(i, j, h, n).unwrap();
        let mut want = DenseMatrix::zeros(1 << n, 1 << n);
        want[(i, j)] += h;
        if i != j {
            want[(j, i)] += h.conj();
        }
        prop_assert!(close(&terms.to_dense().unwrap(), &want, 1e-12));
    }

    #[test]
    fn schedule_weights_sum_to_one(terms in 1usize..6, steps in 1usize..5, k in 0usize..3, seed in any::<u64>()) {
        let order = [TrotterOrder::First, TrotterOrder::Second, TrotterOrder::Fourth][k];
        let sched = trotter_schedule(terms, order, steps, TermOrdering::Random(seed)).unwrap();
        let mut sums = vec![0.0; terms];
        for (m, w) in sched {
            sums[m] += w;
        }
        for s in sums {
            prop_assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn direct_term_programs_survive_json(n in 1usize..=3, i in any::<usize>(), j in any::<usize>(), h in -1.0f64..1.0) {
        let (i, j) = (i % (1 << n), j % (1 << n));
        prop_assume!(i != j);
        let prog = compile_direct_term(i, j, h, 0.7, n).unwrap();
        let back = QGateProgram::from_json(&prog.to_json().unwrap()).unwrap();
        prop_assert_eq!(back, prog);
    }

    #[test]
    fn matrix_market_round_trip(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
        let h = SparseHamiltonian::random_real(n, 0.5, &mut rng).unwrap();
        let back = parse_matrix_market(&write_matrix_market(&h)).unwrap();
        prop_assert!(close(&back.to_dense().unwrap(), &h.to_dense().unwrap(), 1e-12));
    }

    #[test]
    fn pauli_text_round_trip(coeffs in prop::collection::vec(-2.0f64..2.0, 1..5), strings in prop::collection::vec(pauli(3), 5)) {
        let text: String = coeffs.iter().zip(&strings).map(|(c, p)| format!("{c} {}\n", p.clone().with_phase(0))).collect();
        let terms = parse_pauli_terms(&text).unwrap();
        prop_assert_eq!(parse_pauli_terms(&write_pauli_terms(&terms).unwrap()).unwrap(), terms);
    }
}
