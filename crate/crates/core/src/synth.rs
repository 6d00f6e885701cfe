//! Synthetic screening data with known sensitivity and specificity.
//!
//! Scores are `N(μ₁, 1)` for diseased and `N(μ₀, 1)` for healthy subjects;
//! a score above the threshold `t` screens positive. Diseased scores come
//! from `seed.derive(0)` and healthy scores from `seed.derive(1)`, so for a
//! fixed seed the data at a larger `n` extend the draws used at a smaller
//! one.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::DiagnosticData;
use crate::rng::RngState;
use crate::special::std_normal_cdf;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub pi: f64,
    pub n: u64,
    pub mu0: f64,
    pub mu1: f64,
    pub t: f64,
    pub seed: u64,
    #[serde(default)]
    pub stream: u64,
}

impl SynthConfig {
    /// Prevalence 0.35, class means 3 and 4, threshold 3.25.
    pub fn reference(n: u64, seed: u64) -> Self {
        SynthConfig {
            pi: 0.35,
            n,
            mu0: 3.0,
            mu1: 4.0,
            t: 3.25,
            seed,
            stream: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.pi > 0.0 && self.pi < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "pi must lie in (0, 1), got {}",
                self.pi
            )));
        }
        if !(self.mu0 < self.t && self.t < self.mu1) {
            return Err(Error::InvalidParameter(format!(
                "need mu0 < t < mu1, got {} < {} < {}",
                self.mu0, self.t, self.mu1
            )));
        }
        Ok(())
    }

    pub fn rng(&self) -> RngState {
        RngState::new(self.seed, self.stream)
    }

    pub fn diseased_count(&self) -> u64 {
        (self.pi * self.n as f64).floor() as u64
    }
}

/// True `(η, θ) = (1 − Φ(t − μ₁), Φ(t − μ₀))`.
pub fn true_params(c: &SynthConfig) -> (f64, f64) {
    (
        1.0 - std_normal_cdf(c.t - c.mu1),
        std_normal_cdf(c.t - c.mu0),
    )
}

pub fn generate(c: &SynthConfig) -> Result<DiagnosticData> {
    c.validate()?;
    let n1 = c.diseased_count();
    let root = c.rng();
    let mut sick = root.derive(0);
    let mut well = root.derive(1);
    let k1 = (0..n1)
        .filter(|_| c.mu1 + sick.sample::<f64, _>(StandardNormal) > c.t)
        .count() as u64;
    let k2 = (0..c.n - n1)
        .filter(|_| c.mu0 + well.sample::<f64, _>(StandardNormal) <= c.t)
        .count() as u64;
    DiagnosticData::new(c.n, n1, k1, k2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NaiveEstimates {
    pub eta_hat: f64,
    pub theta_hat: f64,
    /// Screen-positives over n.
    pub pi_hat: f64,
}

pub fn naive_estimates(d: &DiagnosticData) -> Result<NaiveEstimates> {
    d.validate()?;
    if d.n1 == 0 || d.healthy() == 0 {
        return Err(Error::InvalidData(
            "naive estimates need at least one diseased and one healthy subject".into(),
        ));
    }
    let positives = d.k1 + (d.healthy() - d.k2);
    Ok(NaiveEstimates {
        eta_hat: d.k1 as f64 / d.n1 as f64,
        theta_hat: d.k2 as f64 / d.healthy() as f64,
        pi_hat: positives as f64 / d.n as f64,
    })
}
