//! Simultaneous perturbation stochastic approximation with blocking, early
//! stopping, terminal parameter averaging, and warm-start handoff.
//!
//! Objectives have the form `f(theta, eval_index)`: every evaluation gets a
//! unique index from a counter, which noisy objectives use to key their
//! random stream. The gain index `t` advances on every iteration, accepted or
//! not; only accepted iterations count as recorded for early stopping and
//! averaging.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{counter_rng, derive_seed};

const TAG_PERTURB: u64 = 11;
const TAG_CALIBRATE: u64 = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpsaConfig {
    /// Step gain; calibrated from the first-step target when absent.
    pub a: Option<f64>,
    /// Perturbation gain; sigma (or 0.1 if sigma = 0) when absent.
    pub c: Option<f64>,
    /// Stability constant A; `max_iter / 10` when absent.
    pub stability: Option<f64>,
    pub alpha_gain: f64,
    pub gamma_gain: f64,
    pub max_iter: usize,
    pub blocking: bool,
    pub sigma_samples: usize,
    pub calibration_samples: usize,
    /// Desired magnitude of the first update, in radians.
    pub target_step: f64,
    pub early_stop: bool,
    pub window_short: usize,
    pub window_long: usize,
    pub averaging_window: usize,
    pub seed: u64,
}

impl Default for SpsaConfig {
    fn default() -> Self {
        SpsaConfig {
            a: None,
            c: None,
            stability: None,
            alpha_gain: 0.602,
            gamma_gain: 0.101,
            max_iter: 1024,
            blocking: true,
            sigma_samples: 25,
            calibration_samples: 10,
            target_step: 0.1,
            early_stop: true,
            window_short: 16,
            window_long: 32,
            averaging_window: 16,
            seed: 0,
        }
    }
}

impl SpsaConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidInput(format!("{name} must be positive, got {v}")))
            }
        };
        positive("alpha_gain", self.alpha_gain)?;
        positive("gamma_gain", self.gamma_gain)?;
        positive("target_step", self.target_step)?;
        if let Some(a) = self.a {
            positive("a", a)?;
        }
        if let Some(c) = self.c {
            positive("c", c)?;
        }
        if let Some(s) = self.stability {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(Error::InvalidInput(format!("stability constant must be >= 0, got {s}")));
            }
        }
        if self.sigma_samples < 2 {
            return Err(Error::TooFewSamples(self.sigma_samples));
        }
        if self.calibration_samples == 0 && self.a.is_none() {
            return Err(Error::InvalidInput("calibration needs at least one sample".into()));
        }
        if self.averaging_window == 0 {
            return Err(Error::InvalidInput("averaging window must be at least 1".into()));
        }
        if self.early_stop && !(self.window_short < self.window_long && self.window_long <= self.max_iter) {
            return Err(Error::InvalidInput(format!(
                "early-stop windows need short < long <= max_iter ({} / {} / {})",
                self.window_short, self.window_long, self.max_iter
            )));
        }
        Ok(())
    }

    pub fn stability_constant(&self) -> f64 {
        self.stability.unwrap_or(self.max_iter as f64 / 10.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub iteration: usize,
    /// Objective at the candidate parameters.
    pub value: f64,
    pub accepted: bool,
    /// Hash of the parameters held after this iteration.
    pub theta_hash: u64,
    /// Evaluation index of the candidate evaluation.
    pub eval_index: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationTrace {
    pub records: Vec<Record>,
    pub sigma: f64,
    pub a: f64,
    pub c: f64,
    pub stability: f64,
    pub initial_value: f64,
    pub stopped_early: bool,
    pub evaluations: u64,
    pub theta_star: Vec<f64>,
}

impl OptimizationTrace {
    pub fn accepted(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| r.accepted)
    }

    pub fn final_value(&self) -> f64 {
        self.accepted().last().map_or(self.initial_value, |r| r.value)
    }
}

pub fn theta_hash(theta: &[f64]) -> u64 {
    let mut h = DefaultHasher::new();
    for t in theta {
        t.to_bits().hash(&mut h);
    }
    h.finish()
}

fn checked<F: Fn(&[f64], u64) -> f64>(f: &F, theta: &[f64], eval_index: u64) -> Result<f64> {
    let v = f(theta, eval_index);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { value: v, eval_index })
    }
}

/// Sample standard deviation of `samples` evaluations at `theta0`, using
/// evaluation indices `first_eval..first_eval + samples`.
pub fn estimate_sigma<F: Fn(&[f64], u64) -> f64>(
    objective: &F,
    theta0: &[f64],
    samples: usize,
    first_eval: u64,
) -> Result<f64> {
    Ok(sample_stats(objective, theta0, samples, first_eval)?.1)
}

fn sample_stats<F: Fn(&[f64], u64) -> f64>(f: &F, theta0: &[f64], samples: usize, first_eval: u64) -> Result<(f64, f64)> {
    if samples < 2 {
        return Err(Error::TooFewSamples(samples));
    }
    let values = (0..samples as u64)
        .map(|k| checked(f, theta0, first_eval + k))
        .collect::<Result<Vec<f64>>>()?;
    // Shifted by the first sample so identical values give exactly zero.
    let n = samples as f64;
    let shift = values[0];
    let s1: f64 = values.iter().map(|v| v - shift).sum();
    let s2: f64 = values.iter().map(|v| (v - shift).powi(2)).sum();
    let var = ((s2 - s1 * s1 / n) / (n - 1.0)).max(0.0);
    Ok((shift + s1 / n, var.sqrt()))
}

fn rademacher(seed: u64, tag: u64, index: u64, dim: usize) -> Vec<f64> {
    let mut rng = counter_rng(derive_seed(seed, tag), index);
    (0..dim).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect()
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Optimizer state; advances one iteration per `step`.
#[derive(Debug, Clone)]
pub struct Spsa {
    config: SpsaConfig,
    theta0: Vec<f64>,
    theta: Vec<f64>,
    a: f64,
    c: f64,
    big_a: f64,
    sigma: f64,
    t: usize,
    f_cur: f64,
    initial_value: f64,
    next_eval: u64,
    records: Vec<Record>,
    accepted_values: Vec<f64>,
    accepted_thetas: Vec<Vec<f64>>,
    stopped_early: bool,
    initialized: bool,
}

impl Spsa {
    pub fn new(config: &SpsaConfig, theta0: &[f64]) -> Result<Spsa> {
        config.validate()?;
        if theta0.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidInput("non-finite initial parameters".into()));
        }
        Ok(Spsa {
            config: config.clone(),
            theta0: theta0.to_vec(),
            theta: theta0.to_vec(),
            a: 0.0,
            c: 0.0,
            big_a: config.stability_constant(),
            sigma: 0.0,
            t: 0,
            f_cur: f64::NAN,
            initial_value: f64::NAN,
            next_eval: 0,
            records: Vec::new(),
            accepted_values: Vec::new(),
            accepted_thetas: Vec::new(),
            stopped_early: false,
            initialized: false,
        })
    }

    fn take_evals(&mut self, n: u64) -> u64 {
        let first = self.next_eval;
        self.next_eval += n;
        first
    }

    /// Estimate sigma and the objective at theta0, then fix the gains.
    pub fn initialize<F: Fn(&[f64], u64) -> f64 + Sync>(&mut self, f: &F) -> Result<()> {
        let n = self.config.sigma_samples;
        let first = self.take_evals(n as u64);
        let (mean0, sigma) = sample_stats(f, &self.theta0, n, first)?;
        self.sigma = sigma;
        self.f_cur = mean0;
        self.initial_value = mean0;
        self.c = self.config.c.unwrap_or(if sigma > 0.0 { sigma } else { 0.1 });
        self.a = match self.config.a {
            Some(a) => a,
            None => self.calibrate(f, mean0)?,
        };
        self.initialized = true;
        Ok(())
    }

    /// Step gain from probes at scale `s = max(c, target_step)`: the smaller
    /// of the first-step rule (first update of size `target_step`) and the
    /// inverse of the mean directional curvature, which keeps the step stable
    /// when theta0 is close to a stationary point.
    fn calibrate<F: Fn(&[f64], u64) -> f64 + Sync>(&mut self, f: &F, f0: f64) -> Result<f64> {
        let k = self.config.calibration_samples;
        let s = self.c.max(self.config.target_step);
        let (mut grad, mut curv) = (0.0, 0.0);
        for j in 0..k as u64 {
            let delta = rademacher(self.config.seed, TAG_CALIBRATE, j, self.theta0.len());
            let (plus, minus) = self.shifted(&self.theta0, &delta, s);
            let i = self.take_evals(2);
            let (fp, fm) = rayon::join(|| checked(f, &plus, i), || checked(f, &minus, i + 1));
            let (fp, fm) = (fp?, fm?);
            grad += (fp - fm).abs() / (2.0 * s);
            curv += (fp + fm - 2.0 * f0).abs() / (s * s);
        }
        grad /= k as f64;
        curv /= k as f64;
        let scale = (self.big_a + 1.0).powf(self.config.alpha_gain);
        let by_step = if grad > 0.0 { self.config.target_step * scale / grad } else { f64::INFINITY };
        let by_curvature = if curv > 0.0 { scale / curv } else { f64::INFINITY };
        let a = by_step.min(by_curvature);
        Ok(if a.is_finite() { a } else { self.config.target_step * scale })
    }

    fn shifted(&self, theta: &[f64], delta: &[f64], ct: f64) -> (Vec<f64>, Vec<f64>) {
        let plus = theta.iter().zip(delta).map(|(t, d)| t + ct * d).collect();
        let minus = theta.iter().zip(delta).map(|(t, d)| t - ct * d).collect();
        (plus, minus)
    }

    pub fn gains(&self, t: usize) -> (f64, f64) {
        let at = self.a / (t as f64 + 1.0 + self.big_a).powf(self.config.alpha_gain);
        let ct = self.c / (t as f64 + 1.0).powf(self.config.gamma_gain);
        (at, ct)
    }

    pub fn is_done(&self) -> bool {
        self.stopped_early || self.t >= self.config.max_iter
    }

    pub fn iteration(&self) -> usize {
        self.t
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// One iteration; returns false once the run is finished.
    pub fn step<F: Fn(&[f64], u64) -> f64 + Sync>(&mut self, f: &F) -> Result<bool> {
        if !self.initialized {
            self.initialize(f)?;
        }
        if self.is_done() {
            return Ok(false);
        }
        let t = self.t;
        let (at, ct) = self.gains(t);
        let delta = rademacher(self.config.seed, TAG_PERTURB, t as u64, self.theta.len());
        let (plus, minus) = self.shifted(&self.theta, &delta, ct);
        let i = self.take_evals(3);
        let (fp, fm) = rayon::join(|| checked(f, &plus, i), || checked(f, &minus, i + 1));
        let diff = fp? - fm?;
        let candidate: Vec<f64> = self
            .theta
            .iter()
            .zip(&delta)
            .map(|(th, d)| th - at * diff / (2.0 * ct * d))
            .collect();
        let value = checked(f, &candidate, i + 2)?;
        let accepted = !self.config.blocking || value < self.f_cur + 2.0 * self.sigma;
        if accepted {
            self.theta = candidate;
            self.f_cur = value;
            self.accepted_values.push(value);
            self.accepted_thetas.push(self.theta.clone());
        }
        self.records.push(Record {
            iteration: t,
            value,
            accepted,
            theta_hash: theta_hash(&self.theta),
            eval_index: i + 2,
        });
        self.t += 1;
        if accepted && self.config.early_stop {
            let (s, l) = (self.config.window_short, self.config.window_long);
            let n = self.accepted_values.len();
            if n >= l && mean(&self.accepted_values[n - s..]) >= mean(&self.accepted_values[n - l..]) {
                self.stopped_early = true;
            }
        }
        Ok(!self.is_done())
    }

    /// Mean of the last `averaging_window` accepted parameter vectors.
    pub fn theta_star(&self) -> Vec<f64> {
        let n = self.accepted_thetas.len();
        if n == 0 {
            return self.theta0.clone();
        }
        let tail = &self.accepted_thetas[n.saturating_sub(self.config.averaging_window)..];
        (0..self.theta.len())
            .map(|k| tail.iter().map(|th| th[k]).sum::<f64>() / tail.len() as f64)
            .collect()
    }

    pub fn finish(self) -> (Vec<f64>, OptimizationTrace) {
        let theta_star = self.theta_star();
        let trace = OptimizationTrace {
            records: self.records,
            sigma: self.sigma,
            a: self.a,
            c: self.c,
            stability: self.big_a,
            initial_value: self.initial_value,
            stopped_early: self.stopped_early,
            evaluations: self.next_eval,
            theta_star: theta_star.clone(),
        };
        (theta_star, trace)
    }
}

pub fn spsa_minimize<F: Fn(&[f64], u64) -> f64 + Sync>(
    objective: &F,
    theta0: &[f64],
    config: &SpsaConfig,
) -> Result<(Vec<f64>, OptimizationTrace)> {
    let mut s = Spsa::new(config, theta0)?;
    while s.step(objective)? {}
    Ok(s.finish())
}

/// Run `handoff` iterations (and the sigma/gain initialisation) on the cheap
/// objective, then continue the same state on the expensive one.
pub fn warm_start<F, G>(
    cheap: &F,
    expensive: &G,
    theta0: &[f64],
    config: &SpsaConfig,
    handoff: usize,
) -> Result<(Vec<f64>, OptimizationTrace)>
where
    F: Fn(&[f64], u64) -> f64 + Sync,
    G: Fn(&[f64], u64) -> f64 + Sync,
{
    let mut s = Spsa::new(config, theta0)?;
    if handoff > 0 {
        s.initialize(cheap)?;
        while s.iteration() < handoff && s.step(cheap)? {}
    }
    while s.step(expensive)? {}
    Ok(s.finish())
}
