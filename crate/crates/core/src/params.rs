//! Estimator configuration and SVM hyperparameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// lambda penalises the bias; C weights the alpha-norm regularizer. C may be
/// infinite (hard margin), in which case the regularizer is dropped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperparams {
    pub lambda: f64,
    pub c: f64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams { lambda: 1e4, c: 1e4 }
    }
}

impl Hyperparams {
    pub fn new(lambda: f64, c: f64) -> Result<Hyperparams> {
        let hp = Hyperparams { lambda, c };
        hp.validate()?;
        Ok(hp)
    }

    pub fn hard_margin(lambda: f64) -> Result<Hyperparams> {
        Hyperparams::new(lambda, f64::INFINITY)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::InvalidInput(format!("lambda must be positive and finite, got {}", self.lambda)));
        }
        if !(self.c > 0.0) || self.c.is_nan() {
            return Err(Error::InvalidInput(format!("C must be positive, got {}", self.c)));
        }
        Ok(())
    }

    pub fn inv_lambda(&self) -> f64 {
        1.0 / self.lambda
    }

    /// 1/C, zero in the hard-margin limit.
    pub fn inv_c(&self) -> f64 {
        if self.c.is_infinite() {
            0.0
        } else {
            1.0 / self.c
        }
    }

    pub fn is_hard_margin(&self) -> bool {
        self.c.is_infinite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    /// Expectations from the final statevector (R = infinity).
    Exact,
    /// Finite-shot estimates.
    Shots(u64),
}

/// How the measured state is prepared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SimPath {
    /// Reduced state built directly from alpha(theta) and the feature states.
    #[default]
    Direct,
    /// Full gate-level simulation of the assembled circuit.
    Circuit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub mode: Mode,
    pub seed: u64,
    pub path: SimPath,
}

impl EstimatorConfig {
    pub fn exact() -> EstimatorConfig {
        EstimatorConfig { mode: Mode::Exact, seed: 0, path: SimPath::Direct }
    }

    pub fn shots(shots: u64, seed: u64) -> Result<EstimatorConfig> {
        if shots == 0 {
            return Err(Error::ZeroShots);
        }
        Ok(EstimatorConfig { mode: Mode::Shots(shots), seed, path: SimPath::Direct })
    }

    pub fn with_path(mut self, path: SimPath) -> EstimatorConfig {
        self.path = path;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.mode {
            Mode::Shots(0) => Err(Error::ZeroShots),
            _ => Ok(()),
        }
    }
}
