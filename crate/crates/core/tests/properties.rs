//! Property tests for invariants across the simulator, estimators, and
//! reference solvers.

use std::f64::consts::PI;

use proptest::prelude::*;
use vqasvm::linalg::c;
use vqasvm::oracle::{build_dataset_oracle, direct_oracle_state};
use vqasvm::reference::{kernel_matrix, project_simplex, simplex_objective, solve_probability_simplex_qp};
use vqasvm::*;

const N: usize = 4;

fn gate_strategy() -> impl Strategy<Value = Gate> {
    let q = 0..N;
    let angle = -PI..PI;
    prop_oneof![
        (q.clone(), angle.clone()).prop_map(|(q, t)| Gate::Rx { qubit: q, theta: t }),
        (q.clone(), angle.clone()).prop_map(|(q, t)| Gate::Ry { qubit: q, theta: t }),
        (q.clone(), angle).prop_map(|(q, t)| Gate::Rz { qubit: q, theta: t }),
        q.clone().prop_map(Gate::H),
        q.clone().prop_map(Gate::Sx),
        (q.clone(), 1..N).prop_map(|(a, d)| Gate::Cnot { control: a, target: (a + d) % N }),
        (q.clone(), 1..N).prop_map(|(a, d)| Gate::Cz(a, (a + d) % N)),
        (q.clone(), 1..N).prop_map(|(a, d)| Gate::Swap(a, (a + d) % N)),
        (q, 1..N - 1).prop_map(|(a, d)| Gate::Cswap { control: a, a: (a + d) % N, b: (a + d + 1) % N }),
    ]
}

fn random_state(n: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n).prop_filter_map("nonzero", |v| {
        let norm: f64 = v.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
        (norm > 1e-3).then(|| StateVector::from_amplitudes(v.iter().map(|(a, b)| c(a / norm, b / norm)).collect()).unwrap())
    })
}

fn point(fmap: &FeatureMapSpec) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-PI..PI, fmap.feature_dim())
}

fn training_set(fmap: FeatureMapSpec, m: usize) -> impl Strategy<Value = TrainingSet> {
    let mm = 1usize << m;
    (prop::collection::vec(point(&fmap), mm), prop::collection::vec(prop::bool::ANY, mm))
        .prop_map(|(pts, ls)| TrainingSet::new(pts, ls.iter().map(|&b| if b { 1 } else { -1 }).collect()).unwrap())
}

fn fmap_strategy() -> impl Strategy<Value = FeatureMapSpec> {
    prop_oneof![Just(FeatureMapSpec::bloch()), (2usize..4, 1usize..3).prop_map(|(n, r)| FeatureMapSpec::zz(n, r).unwrap())]
}

fn instance() -> impl Strategy<Value = (FeatureMapSpec, TrainingSet, AnsatzSpec, Vec<f64>)> {
    (fmap_strategy(), 1usize..3, 1usize..3).prop_flat_map(|(fmap, m, layers)| {
        let ansatz = AnsatzSpec::new(m, layers).unwrap();
        (Just(fmap), training_set(fmap, m), Just(ansatz), prop::collection::vec(-PI..PI, ansatz.num_params()))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gates_preserve_norm(psi in random_state(N), gates in prop::collection::vec(gate_strategy(), 1..20)) {
        let mut s = psi;
        for g in &gates {
            s.apply(g).unwrap();
        }
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn inverse_round_trip(psi in random_state(N), gates in prop::collection::vec(gate_strategy(), 1..20)) {
        let mut circ = Circuit::new(N);
        circ.extend(gates).unwrap();
        let back = circ.inverse().run(&circ.run(&psi).unwrap()).unwrap();
        prop_assert!((back.fidelity(&psi).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn basis_rewrite_preserves_action(psi in random_state(N), gates in prop::collection::vec(gate_strategy(), 1..12)) {
        let mut circ = Circuit::new(N);
        circ.extend(gates).unwrap();
        let dec = circ.decomposed();
        prop_assert!(dec.gates().iter().all(|g| matches!(g.kind(), GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::Cnot)));
        let a = circ.run(&psi).unwrap();
        let b = dec.run(&psi).unwrap();
        prop_assert!((a.fidelity(&b).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn z_parity_matches_marginal(psi in random_state(N), mask in 1usize..(1 << N)) {
        let qubits: Vec<usize> = (0..N).filter(|q| mask >> q & 1 == 1).collect();
        let direct = psi.expectation_pauli_z(&qubits).unwrap();
        let marginal = psi.marginal(&qubits).unwrap();
        let from_marginal: f64 = marginal
            .iter()
            .enumerate()
            .map(|(k, p)| if k.count_ones() % 2 == 0 { *p } else { -*p })
            .sum();
        prop_assert!((direct - from_marginal).abs() < 1e-12);
        prop_assert!((marginal.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gate_oracle_equals_direct_state((fmap, set, _, _) in instance()) {
        let circ = build_dataset_oracle(&set, &fmap).unwrap();
        let mut input = StateVector::zero(circ.num_qubits()).unwrap();
        for q in circ.reg("i").unwrap() {
            input.apply(&Gate::H(q)).unwrap();
        }
        let built = circ.run(&input).unwrap();
        let direct = direct_oracle_state(&set, &fmap, &vec![1.0 / set.len() as f64; set.len()]).unwrap();
        // Probabilities agree everywhere; each index branch agrees up to its
        // own phase (the label flip RX(pi) = -iX contributes -i).
        for (p, q) in built.probabilities().iter().zip(direct.probabilities()) {
            prop_assert!((p - q).abs() < 1e-9);
        }
        let mm = set.len();
        for i in 0..mm {
            let branch = |s: &StateVector| -> Vec<vqasvm::linalg::C64> {
                s.amplitudes().iter().enumerate().filter(|(k, _)| k % mm == i).map(|(_, a)| *a).collect()
            };
            let (u, v) = (branch(&built), branch(&direct));
            let overlap: vqasvm::linalg::C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            prop_assert!((overlap.norm() - 1.0 / mm as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn alpha_on_simplex_and_regularizer_bounds((_, set, ansatz, theta) in instance()) {
        let alpha = alpha_distribution(&ansatz, &theta).unwrap();
        prop_assert!(alpha.iter().all(|&a| a >= 0.0));
        prop_assert!((alpha.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        let r = estimate_regularizer(&theta, &ansatz, &EstimatorConfig::exact()).unwrap();
        prop_assert!(r >= 1.0 / set.len() as f64 - 1e-12 && r <= 1.0 + 1e-12);
    }

    #[test]
    fn paths_agree_and_match_kernel_sums((fmap, set, ansatz, theta) in instance(), x in point(&FeatureMapSpec::bloch())) {
        let hp = Hyperparams::new(50.0, 20.0).unwrap();
        let direct = EstimatorConfig::exact();
        let circuit = direct.with_path(SimPath::Circuit);
        let alpha = alpha_distribution(&ansatz, &theta).unwrap();
        let k = kernel_matrix(&set, &fmap).unwrap();
        let want_loss = simplex_objective(&k, set.labels(), &Hyperparams::hard_margin(50.0).unwrap(), &alpha);
        let l_direct = estimate_loss(&theta, &set, &fmap, &ansatz, &hp, &direct).unwrap();
        let l_circuit = estimate_loss(&theta, &set, &fmap, &ansatz, &hp, &circuit).unwrap();
        prop_assert!((l_direct - want_loss).abs() < 1e-9);
        prop_assert!((l_circuit - want_loss).abs() < 1e-9);
        if fmap.kind == FeatureMapKind::Bloch {
            let d1 = estimate_decision(&x, &theta, &set, &fmap, &ansatz, hp.lambda, &direct).unwrap();
            let d2 = estimate_decision(&x, &theta, &set, &fmap, &ansatz, hp.lambda, &circuit).unwrap();
            prop_assert!((d1 - d2).abs() < 1e-9);
        }
    }

    #[test]
    fn decision_flips_with_labels((fmap, set, ansatz, theta) in instance(), seed in 0u64..100) {
        let xhat: Vec<f64> = (0..fmap.feature_dim()).map(|k| ((seed + k as u64) as f64 * 0.37).sin() * 3.0).collect();
        let est = EstimatorConfig::exact();
        let f = estimate_decision(&xhat, &theta, &set, &fmap, &ansatz, 1e4, &est).unwrap();
        let g = estimate_decision(&xhat, &theta, &set.with_flipped_labels(), &fmap, &ansatz, 1e4, &est).unwrap();
        prop_assert!((f + g).abs() < 1e-12);
    }

    #[test]
    fn shot_estimates_are_bounded((fmap, set, ansatz, theta) in instance(), shots in 1u64..200, seed in 0u64..50) {
        let hp = Hyperparams::new(10.0, 5.0).unwrap();
        let est = EstimatorConfig::shots(shots, seed).unwrap();
        let l = estimate_loss(&theta, &set, &fmap, &ansatz, &hp, &est).unwrap();
        prop_assert!(l.abs() <= 1.0 + 1.0 / hp.lambda + 1e-12);
        let r = estimate_regularizer(&theta, &ansatz, &est).unwrap();
        prop_assert!((0.0..=1.0).contains(&r));
        prop_assert_eq!(l, estimate_loss(&theta, &set, &fmap, &ansatz, &hp, &est).unwrap());
    }

    #[test]
    fn kernel_matrix_is_valid((fmap, set, _, _) in instance()) {
        let k = kernel_matrix(&set, &fmap).unwrap();
        prop_assert!(k.has_unit_diagonal(1e-12));
        for i in 0..k.size() {
            for j in 0..k.size() {
                prop_assert!((k.get(i, j) - k.get(j, i)).abs() < 1e-14);
                prop_assert!((-1e-12..=1.0 + 1e-12).contains(&k.get(i, j)));
            }
        }
        prop_assert!(k.min_eigenvalue(0.0) > -1e-9);
    }

    #[test]
    fn simplex_projection_lands_on_simplex(mut v in prop::collection::vec(-5.0f64..5.0, 1..12)) {
        project_simplex(&mut v);
        prop_assert!(v.iter().all(|&a| a >= 0.0));
        prop_assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn simplex_optimum_not_beaten_by_alpha((fmap, set, ansatz, theta) in instance()) {
        let hp = Hyperparams::default();
        let k = kernel_matrix(&set, &fmap).unwrap();
        let opt = solve_probability_simplex_qp(&k, set.labels(), &hp).unwrap();
        let alpha = alpha_distribution(&ansatz, &theta).unwrap();
        prop_assert!(simplex_objective(&k, set.labels(), &hp, &alpha) >= opt.objective - 1e-9);
    }
}
