//! End-to-end training and inference transfer.
//!
//! `train` optimises theta on the estimated objective with SPSA starting from
//! theta = 0 (uniform alpha). `infer` rebuilds only decision estimators from
//! the stored theta; it never touches the loss or regularization circuitry.

use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::ansatz::{alpha_distribution, AnsatzSpec};
use crate::dataset::{Dataset, TrainingSet};
use crate::error::{Error, Result};
use crate::estimation::{DecisionEstimator, TrainingEstimator};
use crate::feature_map::FeatureMapSpec;
use crate::params::{EstimatorConfig, Hyperparams};
use crate::reference::{kernel_matrix, solve_probability_simplex_qp};
use crate::spsa::{OptimizationTrace, Spsa, SpsaConfig};

pub const MODEL_SCHEMA_VERSION: u32 = 1;

/// Sign with the boundary convention sign(0) = -1.
pub fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else {
        -1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub iterations: usize,
    pub accepted: usize,
    pub rejected: usize,
    pub stopped_early: bool,
    pub sigma: f64,
    pub a: f64,
    pub c: f64,
    pub stability: f64,
    pub initial_value: f64,
    pub final_value: f64,
    pub objective_evaluations: u64,
    pub loss_evaluations: u64,
    pub regularizer_evaluations: u64,
}

impl TraceSummary {
    fn new(trace: &OptimizationTrace, loss_evaluations: u64, regularizer_evaluations: u64) -> TraceSummary {
        let accepted = trace.accepted().count();
        TraceSummary {
            iterations: trace.records.len(),
            accepted,
            rejected: trace.records.len() - accepted,
            stopped_early: trace.stopped_early,
            sigma: trace.sigma,
            a: trace.a,
            c: trace.c,
            stability: trace.stability,
            initial_value: trace.initial_value,
            final_value: trace.final_value(),
            objective_evaluations: trace.evaluations,
            loss_evaluations,
            regularizer_evaluations,
        }
    }
}

/// Trained parameters plus everything needed to rebuild decision circuits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelFile", into = "ModelFile")]
pub struct Model {
    pub theta_star: Vec<f64>,
    pub ansatz: AnsatzSpec,
    pub fmap: FeatureMapSpec,
    pub hp: Hyperparams,
    pub training_set: TrainingSet,
    pub trace_summary: TraceSummary,
    /// Exact readout of alpha(theta*), a diagnostic only.
    pub alpha_star: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    schema_version: u32,
    theta_star: Vec<f64>,
    ansatz: AnsatzSpec,
    fmap: FeatureMapSpec,
    lambda: f64,
    #[serde(rename = "C", serialize_with = "ser_c", deserialize_with = "de_c")]
    c: f64,
    training_set: TrainingSet,
    trace_summary: TraceSummary,
    alpha_star: Vec<f64>,
}

fn ser_c<S: Serializer>(c: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if c.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*c)
    }
}

fn de_c<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }
    match Repr::deserialize(d)? {
        Repr::Num(v) => Ok(v),
        Repr::Text(t) => parse_c(&t).map_err(serde::de::Error::custom),
    }
}

/// Parse a C value; "inf" (any case) or "infinity" selects the hard margin.
pub fn parse_c(text: &str) -> Result<f64> {
    match text.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "+inf" => Ok(f64::INFINITY),
        t => t.parse::<f64>().map_err(|_| Error::InvalidInput(format!("invalid C value `{text}`"))),
    }
}

impl From<Model> for ModelFile {
    fn from(m: Model) -> ModelFile {
        ModelFile {
            schema_version: MODEL_SCHEMA_VERSION,
            theta_star: m.theta_star,
            ansatz: m.ansatz,
            fmap: m.fmap,
            lambda: m.hp.lambda,
            c: m.hp.c,
            training_set: m.training_set,
            trace_summary: m.trace_summary,
            alpha_star: m.alpha_star,
        }
    }
}

impl TryFrom<ModelFile> for Model {
    type Error = Error;
    fn try_from(f: ModelFile) -> Result<Model> {
        if f.schema_version != MODEL_SCHEMA_VERSION {
            return Err(Error::InvalidInput(format!("unsupported model schema version {}", f.schema_version)));
        }
        let model = Model {
            theta_star: f.theta_star,
            ansatz: f.ansatz,
            fmap: f.fmap,
            hp: Hyperparams::new(f.lambda, f.c)?,
            training_set: f.training_set,
            trace_summary: f.trace_summary,
            alpha_star: f.alpha_star,
        };
        model.validate()?;
        Ok(model)
    }
}

impl Model {
    pub fn validate(&self) -> Result<()> {
        self.fmap.validate()?;
        self.hp.validate()?;
        if self.ansatz.m != self.training_set.m() {
            return Err(Error::DimensionMismatch { expected: self.training_set.m(), found: self.ansatz.m });
        }
        if self.training_set.dim() != self.fmap.feature_dim() {
            return Err(Error::DimensionMismatch { expected: self.fmap.feature_dim(), found: self.training_set.dim() });
        }
        self.ansatz.check_theta(&self.theta_star)?;
        if self.alpha_star.len() != self.training_set.len() {
            return Err(Error::DimensionMismatch { expected: self.training_set.len(), found: self.alpha_star.len() });
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Model> {
        Ok(serde_json::from_str(text)?)
    }

    fn decision_estimator(&self, est: &EstimatorConfig) -> Result<DecisionEstimator> {
        DecisionEstimator::new(&self.training_set, &self.fmap, &self.ansatz, &self.theta_star, self.hp.lambda, est)
    }
}

/// A trained model together with its full optimisation trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub model: Model,
    pub trace: OptimizationTrace,
}

/// Adapt a fallible estimator to the SPSA objective signature; the first
/// error is kept and the optimiser aborts through a NaN value.
struct Objective<'a> {
    est: &'a TrainingEstimator,
    error: Mutex<Option<Error>>,
}

impl<'a> Objective<'a> {
    fn new(est: &'a TrainingEstimator) -> Self {
        Objective { est, error: Mutex::new(None) }
    }

    fn eval(&self, theta: &[f64], eval_index: u64) -> f64 {
        match self.est.objective(theta, eval_index) {
            Ok(v) => v,
            Err(e) => {
                self.error.lock().expect("objective error slot").get_or_insert(e);
                f64::NAN
            }
        }
    }

    fn resolve<T>(&self, r: Result<T>) -> Result<T> {
        match self.error.lock().expect("objective error slot").take() {
            Some(e) => Err(e),
            None => r,
        }
    }
}

pub fn train(
    set: &TrainingSet,
    fmap: &FeatureMapSpec,
    ansatz: &AnsatzSpec,
    hp: &Hyperparams,
    est: &EstimatorConfig,
    spsa: &SpsaConfig,
) -> Result<TrainOutcome> {
    train_with_warm_start(set, fmap, ansatz, hp, est, est, spsa, 0)
}

/// Run the first `handoff` iterations (including sigma estimation) with the
/// `cheap` estimator, then continue the same optimiser state with `est`.
#[allow(clippy::too_many_arguments)]
pub fn train_with_warm_start(
    set: &TrainingSet,
    fmap: &FeatureMapSpec,
    ansatz: &AnsatzSpec,
    hp: &Hyperparams,
    cheap: &EstimatorConfig,
    est: &EstimatorConfig,
    spsa: &SpsaConfig,
    handoff: usize,
) -> Result<TrainOutcome> {
    if set.dim() != fmap.feature_dim() {
        return Err(Error::DimensionMismatch { expected: fmap.feature_dim(), found: set.dim() });
    }
    let cheap_est = TrainingEstimator::new(set, fmap, ansatz, hp, cheap)?;
    let main_est = TrainingEstimator::new(set, fmap, ansatz, hp, est)?;
    let (f_cheap, f_main) = (Objective::new(&cheap_est), Objective::new(&main_est));
    let cheap_fn = |t: &[f64], i: u64| f_cheap.eval(t, i);
    let main_fn = |t: &[f64], i: u64| f_main.eval(t, i);

    let theta0 = vec![0.0; ansatz.num_params()];
    let mut opt = Spsa::new(spsa, &theta0)?;
    if handoff > 0 {
        let r = opt.initialize(&cheap_fn);
        f_cheap.resolve(r)?;
        loop {
            if opt.iteration() >= handoff {
                break;
            }
            let r = opt.step(&cheap_fn);
            if !f_cheap.resolve(r)? {
                break;
            }
        }
    }
    loop {
        let r = opt.step(&main_fn);
        if !f_main.resolve(r)? {
            break;
        }
    }
    let (theta_star, trace) = opt.finish();
    let summary = TraceSummary::new(
        &trace,
        main_est.loss_evaluations() + if handoff > 0 { cheap_est.loss_evaluations() } else { 0 },
        main_est.regularizer_evaluations() + if handoff > 0 { cheap_est.regularizer_evaluations() } else { 0 },
    );
    let model = Model {
        alpha_star: alpha_distribution(ansatz, &theta_star)?,
        theta_star,
        ansatz: *ansatz,
        fmap: *fmap,
        hp: *hp,
        training_set: set.clone(),
        trace_summary: summary,
    };
    Ok(TrainOutcome { model, trace })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inference {
    pub labels: Vec<i8>,
    pub values: Vec<f64>,
}

/// Decision values and labels for a batch; point `k` uses evaluation index
/// `k`, so the result is independent of scheduling.
pub fn infer(model: &Model, points: &[Vec<f64>], est: &EstimatorConfig) -> Result<Inference> {
    let dec = model.decision_estimator(est)?;
    let values = points
        .par_iter()
        .enumerate()
        .map(|(k, x)| dec.decision(x, k as u64))
        .collect::<Result<Vec<f64>>>()?;
    Ok(Inference { labels: values.iter().map(|&v| sign(v)).collect(), values })
}

/// Exact objective at theta* minus the convex optimum over the simplex.
pub fn residual_loss(model: &Model, set: &TrainingSet, hp: &Hyperparams) -> Result<f64> {
    let exact = TrainingEstimator::new(set, &model.fmap, &model.ansatz, hp, &EstimatorConfig::exact())?;
    let value = exact.objective(&model.theta_star, 0)?;
    let k = kernel_matrix(set, &model.fmap)?;
    let opt = solve_probability_simplex_qp(&k, set.labels(), hp)?;
    Ok(value - opt.objective)
}

/// Fraction of test labels matched by the inferred signs.
pub fn accuracy(model: &Model, test: &Dataset, est: &EstimatorConfig) -> Result<f64> {
    if test.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let out = infer(model, test.points(), est)?;
    let hits = out.labels.iter().zip(test.labels()).filter(|(p, t)| p == t).count();
    Ok(hits as f64 / test.len() as f64)
}
