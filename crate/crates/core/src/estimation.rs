//! Loss, decision, and regularizer estimators in exact and finite-shot modes.
//!
//! Two preparation paths share one sampling routine:
//! - `SimPath::Circuit` simulates the assembled gate-level circuit.
//! - `SimPath::Direct` uses the fact that the index branches are orthogonal,
//!   so the measured registers see the mixture
//!   `rho = sum_i alpha_i |phi(x_i)><phi(x_i)| (x) |y_i><y_i|`, and builds the
//!   outcome distribution of the measured bits from alpha and the kernel.
//!
//! Shot mode draws a multinomial sample of the jointly measured bits and forms
//! both expectation terms of an identity from that single sample. Labels are
//! stored as |1> for y = +1, so Z on a label qubit reads -y; the decision
//! estimate carries the corresponding sign.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::ansatz::{alpha_distribution, AnsatzSpec};
use crate::assembly::{build_decision_circuit, build_loss_circuit, build_regularization_circuit};
use crate::circuit::projector_probability;
use crate::dataset::TrainingSet;
use crate::error::{Error, Result};
use crate::feature_map::FeatureMapSpec;
use crate::oracle::label_bit;
use crate::params::{EstimatorConfig, Hyperparams, Mode, SimPath};
use crate::reference::{kernel_matrix, KernelMatrix};
use crate::rng::{counter_rng, derive_seed, sample_counts};
use crate::statevector::StateVector;

const TAG_LOSS: u64 = 1;
const TAG_REG: u64 = 2;
const TAG_DECISION: u64 = 3;

fn parity_sign(bits: usize) -> f64 {
    if bits.count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Expectations of Z-parities over an outcome distribution, exactly or from
/// one multinomial sample. `masks` select bits of the outcome index.
fn parity_expectations(probs: &[f64], masks: &[usize], mode: Mode, seed: u64, tag: u64, eval_index: u64) -> Vec<f64> {
    match mode {
        Mode::Exact => masks
            .iter()
            .map(|&mask| probs.iter().enumerate().map(|(k, p)| p * parity_sign(k & mask)).sum())
            .collect(),
        Mode::Shots(r) => {
            let mut rng = counter_rng(derive_seed(seed, tag), eval_index);
            let counts = sample_counts(probs, r, &mut rng);
            masks
                .iter()
                .map(|&mask| {
                    counts.iter().enumerate().map(|(k, &n)| n as f64 * parity_sign(k & mask)).sum::<f64>()
                        / r as f64
                })
                .collect()
        }
    }
}

/// Probability of the all-zero outcome, exactly or as a shot frequency.
fn zero_probability(p: f64, mode: Mode, seed: u64, eval_index: u64) -> f64 {
    match mode {
        Mode::Exact => p,
        Mode::Shots(r) => {
            let mut rng = counter_rng(derive_seed(seed, TAG_REG), eval_index);
            sample_counts(&[p, 1.0 - p], r, &mut rng)[0] as f64 / r as f64
        }
    }
}

/// R(theta) = P(j = 0...0) = sum_i alpha_i^2.
pub fn regularizer_value(ansatz: &AnsatzSpec, theta: &[f64], config: &EstimatorConfig, eval_index: u64) -> Result<f64> {
    config.validate()?;
    let p = match config.path {
        SimPath::Circuit if ansatz.m > 0 => {
            let circ = build_regularization_circuit(ansatz, theta)?;
            let state = circ.run_from_zero()?;
            projector_probability(&state, circ.registers(), "j", &"0".repeat(ansatz.m))?
        }
        _ => alpha_distribution(ansatz, theta)?.iter().map(|a| a * a).sum(),
    };
    Ok(zero_probability(p, config.mode, config.seed, eval_index))
}

/// Estimator for the training objective L(theta) + R(theta)/C.
///
/// Evaluation `eval_index` keys the random stream, so results do not depend
/// on the order in which evaluations run.
#[derive(Debug)]
pub struct TrainingEstimator {
    set: TrainingSet,
    fmap: FeatureMapSpec,
    ansatz: AnsatzSpec,
    hp: Hyperparams,
    config: EstimatorConfig,
    kernel: KernelMatrix,
    loss_evals: AtomicU64,
    reg_evals: AtomicU64,
}

impl TrainingEstimator {
    pub fn new(
        set: &TrainingSet,
        fmap: &FeatureMapSpec,
        ansatz: &AnsatzSpec,
        hp: &Hyperparams,
        config: &EstimatorConfig,
    ) -> Result<TrainingEstimator> {
        hp.validate()?;
        config.validate()?;
        fmap.validate()?;
        if ansatz.m != set.m() {
            return Err(Error::DimensionMismatch { expected: set.m(), found: ansatz.m });
        }
        set.points().iter().try_for_each(|x| fmap.check_features(x))?;
        Ok(TrainingEstimator {
            kernel: kernel_matrix(set, fmap)?,
            set: set.clone(),
            fmap: *fmap,
            ansatz: *ansatz,
            hp: *hp,
            config: *config,
            loss_evals: AtomicU64::new(0),
            reg_evals: AtomicU64::new(0),
        })
    }

    pub fn kernel(&self) -> &KernelMatrix {
        &self.kernel
    }

    pub fn hyperparams(&self) -> &Hyperparams {
        &self.hp
    }

    pub fn config(&self) -> &EstimatorConfig {
        &self.config
    }

    pub fn loss_evaluations(&self) -> u64 {
        self.loss_evals.load(Ordering::Relaxed)
    }

    pub fn regularizer_evaluations(&self) -> u64 {
        self.reg_evals.load(Ordering::Relaxed)
    }

    /// Distribution of (a, y0, y1) at the end of the loss circuit; outcome
    /// index bits are a, y0, y1 from low to high.
    pub fn loss_outcomes(&self, theta: &[f64]) -> Result<Vec<f64>> {
        match self.config.path {
            SimPath::Circuit => {
                let circ = build_loss_circuit(&self.set, &self.fmap, &self.ansatz, theta)?;
                let state = circ.run_from_zero()?;
                let qubits = [circ.reg("a")?[0], circ.reg("y0")?[0], circ.reg("y1")?[0]];
                state.marginal(&qubits)
            }
            SimPath::Direct => {
                let alpha = alpha_distribution(&self.ansatz, theta)?;
                let y = self.set.labels();
                let mut probs = vec![0.0; 8];
                for i in 0..alpha.len() {
                    for j in 0..alpha.len() {
                        let w = 0.5 * alpha[i] * alpha[j];
                        let k = self.kernel.get(i, j);
                        let base = (label_bit(y[i]) << 1) | (label_bit(y[j]) << 2);
                        probs[base] += w * (1.0 + k);
                        probs[base | 1] += w * (1.0 - k);
                    }
                }
                Ok(probs)
            }
        }
    }

    /// L(theta) = <Z_a Z_y0 Z_y1> + (1/lambda) <Z_y0 Z_y1>
    pub fn loss(&self, theta: &[f64], eval_index: u64) -> Result<f64> {
        self.loss_evals.fetch_add(1, Ordering::Relaxed);
        let probs = self.loss_outcomes(theta)?;
        let e = parity_expectations(&probs, &[0b111, 0b110], self.config.mode, self.config.seed, TAG_LOSS, eval_index);
        Ok(e[0] + self.hp.inv_lambda() * e[1])
    }

    pub fn regularizer(&self, theta: &[f64], eval_index: u64) -> Result<f64> {
        self.reg_evals.fetch_add(1, Ordering::Relaxed);
        regularizer_value(&self.ansatz, theta, &self.config, eval_index)
    }

    /// L(theta) + R(theta)/C; the regularizer is never evaluated when C is
    /// infinite.
    pub fn objective(&self, theta: &[f64], eval_index: u64) -> Result<f64> {
        let loss = self.loss(theta, eval_index)?;
        if self.hp.is_hard_margin() {
            return Ok(loss);
        }
        Ok(loss + self.hp.inv_c() * self.regularizer(theta, eval_index)?)
    }
}

/// Estimator for decision values with fixed trained parameters. It holds no
/// loss or regularization circuitry.
#[derive(Debug, Clone)]
pub struct DecisionEstimator {
    set: TrainingSet,
    fmap: FeatureMapSpec,
    ansatz: AnsatzSpec,
    theta: Vec<f64>,
    lambda: f64,
    config: EstimatorConfig,
    alpha: Vec<f64>,
    train_states: Vec<StateVector>,
}

impl DecisionEstimator {
    pub fn new(
        set: &TrainingSet,
        fmap: &FeatureMapSpec,
        ansatz: &AnsatzSpec,
        theta: &[f64],
        lambda: f64,
        config: &EstimatorConfig,
    ) -> Result<DecisionEstimator> {
        Hyperparams { lambda, c: f64::INFINITY }.validate()?;
        config.validate()?;
        if ansatz.m != set.m() {
            return Err(Error::DimensionMismatch { expected: set.m(), found: ansatz.m });
        }
        let train_states = set.points().iter().map(|x| fmap.state(x)).collect::<Result<Vec<_>>>()?;
        Ok(DecisionEstimator {
            alpha: alpha_distribution(ansatz, theta)?,
            set: set.clone(),
            fmap: *fmap,
            ansatz: *ansatz,
            theta: theta.to_vec(),
            lambda,
            config: *config,
            train_states,
        })
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// Distribution of (a, y) at the end of the decision circuit; outcome
    /// index bits are a, y from low to high.
    pub fn decision_outcomes(&self, xhat: &[f64]) -> Result<Vec<f64>> {
        match self.config.path {
            SimPath::Circuit => {
                let circ = build_decision_circuit(xhat, &self.set, &self.fmap, &self.ansatz, &self.theta)?;
                let state = circ.run_from_zero()?;
                state.marginal(&[circ.reg("a")?[0], circ.reg("y")?[0]])
            }
            SimPath::Direct => {
                let target = self.fmap.state(xhat)?;
                let mut probs = vec![0.0; 4];
                for (i, phi) in self.train_states.iter().enumerate() {
                    let k = phi.fidelity(&target)?;
                    let base = label_bit(self.set.labels()[i]) << 1;
                    probs[base] += 0.5 * self.alpha[i] * (1.0 + k);
                    probs[base | 1] += 0.5 * self.alpha[i] * (1.0 - k);
                }
                Ok(probs)
            }
        }
    }

    /// f(x) = sum_i alpha_i y_i [k(x_i, x) + 1/lambda]
    ///      = -(<Z_a Z_y> + (1/lambda) <Z_y>) under the |1> = +1 label encoding.
    pub fn decision(&self, xhat: &[f64], eval_index: u64) -> Result<f64> {
        self.fmap.check_features(xhat)?;
        let probs = self.decision_outcomes(xhat)?;
        let e = parity_expectations(&probs, &[0b11, 0b10], self.config.mode, self.config.seed, TAG_DECISION, eval_index);
        Ok(-(e[0] + e[1] / self.lambda))
    }
}

pub fn estimate_loss(
    theta: &[f64],
    set: &TrainingSet,
    fmap: &FeatureMapSpec,
    ansatz: &AnsatzSpec,
    hp: &Hyperparams,
    est: &EstimatorConfig,
) -> Result<f64> {
    TrainingEstimator::new(set, fmap, ansatz, hp, est)?.loss(theta, 0)
}

pub fn estimate_objective(
    theta: &[f64],
    set: &TrainingSet,
    fmap: &FeatureMapSpec,
    ansatz: &AnsatzSpec,
    hp: &Hyperparams,
    est: &EstimatorConfig,
) -> Result<f64> {
    TrainingEstimator::new(set, fmap, ansatz, hp, est)?.objective(theta, 0)
}

pub fn estimate_decision(
    xhat: &[f64],
    theta: &[f64],
    set: &TrainingSet,
    fmap: &FeatureMapSpec,
    ansatz: &AnsatzSpec,
    lambda: f64,
    est: &EstimatorConfig,
) -> Result<f64> {
    DecisionEstimator::new(set, fmap, ansatz, theta, lambda, est)?.decision(xhat, 0)
}

pub fn estimate_regularizer(theta: &[f64], ansatz: &AnsatzSpec, est: &EstimatorConfig) -> Result<f64> {
    regularizer_value(ansatz, theta, est, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn exact(path: SimPath) -> EstimatorConfig {
        EstimatorConfig::exact().with_path(path)
    }

    #[test]
    fn identical_positive_points() {
        let fmap = FeatureMapSpec::bloch();
        let set = TrainingSet::new(vec![vec![0.4, 1.0]; 2], vec![1, 1]).unwrap();
        let ansatz = AnsatzSpec::new(1, 1).unwrap();
        let hp = Hyperparams::new(7.0, 3.0).unwrap();
        for path in [SimPath::Direct, SimPath::Circuit] {
            for theta in [0.0, 0.8, -2.1] {
                let l = estimate_loss(&[theta], &set, &fmap, &ansatz, &hp, &exact(path)).unwrap();
                assert!((l - (1.0 + 1.0 / 7.0)).abs() < 1e-12, "{path:?}");
            }
        }
    }

    #[test]
    fn orthogonal_opposite_points() {
        let fmap = FeatureMapSpec::bloch();
        let set = TrainingSet::new(vec![vec![0.0, 0.0], vec![PI, 0.0]], vec![1, -1]).unwrap();
        let ansatz = AnsatzSpec::new(1, 1).unwrap();
        let hp = Hyperparams::new(5.0, 1.0).unwrap();
        for path in [SimPath::Direct, SimPath::Circuit] {
            let l = estimate_loss(&[0.0], &set, &fmap, &ansatz, &hp, &exact(path)).unwrap();
            assert!((l - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn hard_margin_skips_regularizer() {
        let fmap = FeatureMapSpec::bloch();
        let set = TrainingSet::new(vec![vec![0.1, 0.2], vec![1.0, 2.0]], vec![1, -1]).unwrap();
        let ansatz = AnsatzSpec::new(1, 2).unwrap();
        let hp = Hyperparams::hard_margin(100.0).unwrap();
        let est = TrainingEstimator::new(&set, &fmap, &ansatz, &hp, &EstimatorConfig::exact()).unwrap();
        let theta = [0.3, -0.2];
        assert_eq!(est.objective(&theta, 0).unwrap(), est.loss(&theta, 1).unwrap());
        assert_eq!(est.regularizer_evaluations(), 0);
        assert_eq!(est.loss_evaluations(), 2);
    }

    #[test]
    fn single_branch_objective() {
        let fmap = FeatureMapSpec::bloch();
        let set = TrainingSet::new(vec![vec![0.3, 0.3], vec![0.9, 0.3]], vec![1, -1]).unwrap();
        let ansatz = AnsatzSpec::new(1, 1).unwrap();
        let hp = Hyperparams::new(1.0, 4.0).unwrap();
        // RY(-pi/2)|+> = |0>: one-hot alpha on the positive point
        for path in [SimPath::Direct, SimPath::Circuit] {
            let v = estimate_objective(&[-FRAC_PI_2], &set, &fmap, &ansatz, &hp, &exact(path)).unwrap();
            assert!((v - (2.0 + 0.25)).abs() < 1e-12);
        }
    }

    #[test]
    fn regularizer_cases() {
        let ansatz = AnsatzSpec::new(3, 2).unwrap();
        for path in [SimPath::Direct, SimPath::Circuit] {
            let r = estimate_regularizer(&[0.0; 6], &ansatz, &exact(path)).unwrap();
            assert!((r - 0.125).abs() < 1e-14);
        }
        let one = AnsatzSpec::new(1, 1).unwrap();
        let r = estimate_regularizer(&[FRAC_PI_2], &one, &exact(SimPath::Circuit)).unwrap();
        assert!((r - 1.0).abs() < 1e-14);
    }

    #[test]
    fn decision_self_similarity() {
        let fmap = FeatureMapSpec::bloch();
        let set = TrainingSet::new(vec![vec![0.3, 0.3], vec![0.9, 0.3]], vec![1, -1]).unwrap();
        let ansatz = AnsatzSpec::new(1, 1).unwrap();
        for path in [SimPath::Direct, SimPath::Circuit] {
            let f = estimate_decision(&[0.3, 0.3], &[-FRAC_PI_2], &set, &fmap, &ansatz, 4.0, &exact(path)).unwrap();
            assert!((f - 1.25).abs() < 1e-12, "{path:?} {f}");
        }
    }

    #[test]
    fn shot_estimates_are_seeded_and_path_independent() {
        let fmap = FeatureMapSpec::bloch();
        let set = TrainingSet::new(vec![vec![0.3, 0.3], vec![2.9, -1.0]], vec![1, -1]).unwrap();
        let ansatz = AnsatzSpec::new(1, 2).unwrap();
        let hp = Hyperparams::new(10.0, 10.0).unwrap();
        let cfg = EstimatorConfig::shots(2048, 99).unwrap();
        let d = TrainingEstimator::new(&set, &fmap, &ansatz, &hp, &cfg).unwrap();
        let c = TrainingEstimator::new(&set, &fmap, &ansatz, &hp, &cfg.with_path(SimPath::Circuit)).unwrap();
        let theta = [0.4, -0.7];
        assert_eq!(d.objective(&theta, 5).unwrap(), d.objective(&theta, 5).unwrap());
        assert_ne!(d.objective(&theta, 5).unwrap(), d.objective(&theta, 6).unwrap());
        let exact = TrainingEstimator::new(&set, &fmap, &ansatz, &hp, &EstimatorConfig::exact()).unwrap();
        let truth = exact.objective(&theta, 0).unwrap();
        assert!((d.objective(&theta, 5).unwrap() - truth).abs() < 0.1);
        assert!((c.objective(&theta, 5).unwrap() - truth).abs() < 0.1);
    }
}
