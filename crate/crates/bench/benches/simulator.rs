use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use vqasvm::multiplexer::multiplexed_rotation;
use vqasvm::reference::{kernel_matrix, solve_probability_simplex_qp};
use vqasvm::spsa::{spsa_minimize, SpsaConfig};
use vqasvm::{
    build_loss_circuit, Axis, EstimatorConfig, FeatureMapSpec, Gate, Hyperparams, SimPath, StateVector,
    TrainingEstimator,
};
use vqasvm_bench::fixture;

fn gate_application(c: &mut Criterion) {
    let mut group = c.benchmark_group("apply_gate");
    for n in [10usize, 16, 20] {
        let mut psi = StateVector::zero(n).unwrap();
        let gates = [Gate::H(n / 2), Gate::Cnot { control: 0, target: n - 1 }, Gate::Ry { qubit: 3, theta: 0.7 }];
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| {
                for g in &gates {
                    psi.apply(black_box(g)).unwrap();
                }
            })
        });
    }
    group.finish();
}

fn multiplexer_build(c: &mut Criterion) {
    let mut group = c.benchmark_group("multiplexed_rotation");
    for m in [2usize, 4, 6] {
        let angles: Vec<f64> = (0..1 << m).map(|i| 0.01 * i as f64).collect();
        let controls: Vec<usize> = (0..m).collect();
        group.bench_with_input(BenchmarkId::from_parameter(1 << m), &m, |b, &m| {
            b.iter(|| multiplexed_rotation(black_box(&angles), Axis::Y, &controls, m).unwrap())
        });
    }
    group.finish();
}

fn loss_estimation(c: &mut Criterion) {
    let fmap = FeatureMapSpec::zz(4, 2).unwrap();
    let mut group = c.benchmark_group("loss_direct_exact");
    for mm in [4usize, 16, 64] {
        let (set, ansatz, theta) = fixture(mm, &fmap, 5);
        let est = TrainingEstimator::new(&set, &fmap, &ansatz, &Hyperparams::default(), &EstimatorConfig::exact()).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(mm), &mm, |b, _| b.iter(|| est.loss(black_box(&theta), 0).unwrap()));
    }
    group.finish();

    let bloch = FeatureMapSpec::bloch();
    let (set, ansatz, theta) = fixture(4, &bloch, 2);
    let circuit = EstimatorConfig::exact().with_path(SimPath::Circuit);
    let est = TrainingEstimator::new(&set, &bloch, &ansatz, &Hyperparams::default(), &circuit).unwrap();
    c.bench_function("loss_circuit_exact_bloch_m4", |b| b.iter(|| est.loss(black_box(&theta), 0).unwrap()));
    c.bench_function("build_loss_circuit_bloch_m4", |b| {
        b.iter(|| build_loss_circuit(&set, &bloch, &ansatz, black_box(&theta)).unwrap())
    });
}

fn reference_solvers(c: &mut Criterion) {
    let fmap = FeatureMapSpec::zz(4, 2).unwrap();
    let (set, _, _) = fixture(64, &fmap, 1);
    c.bench_function("kernel_matrix_zz_m64", |b| b.iter(|| kernel_matrix(black_box(&set), &fmap).unwrap()));
    let k = kernel_matrix(&set, &fmap).unwrap();
    c.bench_function("simplex_qp_m64", |b| {
        b.iter(|| solve_probability_simplex_qp(black_box(&k), set.labels(), &Hyperparams::default()).unwrap())
    });
}

fn spsa_quadratic(c: &mut Criterion) {
    let config = SpsaConfig { max_iter: 200, early_stop: false, ..SpsaConfig::default() };
    let f = |t: &[f64], _: u64| t.iter().map(|x| x * x).sum::<f64>();
    c.bench_function("spsa_quadratic_8d_200", |b| b.iter(|| spsa_minimize(&f, black_box(&[0.5; 8]), &config).unwrap()));
}

criterion_group!(benches, gate_application, multiplexer_build, loss_estimation, reference_solvers, spsa_quadratic);
criterion_main!(benches);
