//! Grid posterior for screening-test sensitivity η and specificity θ.
//!
//! The likelihood of `d = (n, n₁, k₁, k₂)` factors as
//!
//! ```text
//! C(n,n₁) C(n₁,k₁) C(n−n₁,k₂) · θ^{k₂} (1−θ)^{n−n₁−k₂} · η^{k₁} (1−η)^{n₁−k₁} · π^{n₁} (1−π)^{n−n₁}
//! ```
//!
//! so with independent priors on π and on (η, θ) the prevalence updates by
//! conjugacy and the (η, θ) posterior is computed on an m×m midpoint grid.
//!
//! The (1−θ) exponent is `n − n₁ − k₂`, the number of healthy subjects who
//! screened positive. A displayed variant `n − k₁ − k₂` agrees with it only
//! when `n₁ = k₁`.

use serde::Serialize;

use crate::density::{cached_density_grid, density_grid, midpoint, DEFAULT_GRID_SAMPLES};
use crate::error::{Error, Result};
use crate::family::FamilySpec;
use crate::rng::RngState;
use crate::special::{ln_gamma_unchecked, BetaParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DiagnosticData {
    pub n: u64,
    pub n1: u64,
    pub k1: u64,
    pub k2: u64,
}

impl DiagnosticData {
    pub fn new(n: u64, n1: u64, k1: u64, k2: u64) -> Result<Self> {
        let d = DiagnosticData { n, n1, k1, k2 };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n1 > self.n {
            return Err(Error::InvalidData(format!(
                "n1 = {} exceeds n = {}",
                self.n1, self.n
            )));
        }
        if self.k1 > self.n1 {
            return Err(Error::InvalidData(format!(
                "k1 = {} exceeds n1 = {}",
                self.k1, self.n1
            )));
        }
        if self.k2 > self.n - self.n1 {
            return Err(Error::InvalidData(format!(
                "k2 = {} exceeds n - n1 = {}",
                self.k2,
                self.n - self.n1
            )));
        }
        Ok(())
    }

    pub fn healthy(&self) -> u64 {
        self.n - self.n1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PriorSpec {
    /// Joint prior; first coordinate is η, second θ.
    pub eta_theta: FamilySpec,
    pub pi: BetaParams,
}

fn ln_choose(n: u64, k: u64) -> f64 {
    ln_gamma_unchecked(n as f64 + 1.0)
        - ln_gamma_unchecked(k as f64 + 1.0)
        - ln_gamma_unchecked((n - k) as f64 + 1.0)
}

/// `k · ln p`, with `0 · ln 0 = 0`.
fn xlogy(k: u64, p: f64, what: &str) -> Result<f64> {
    if k == 0 {
        return Ok(0.0);
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Domain(format!(
            "{what} = {p} with a nonzero exponent"
        )));
    }
    Ok(k as f64 * p.ln())
}

fn check_unit(v: f64, what: &str) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} must lie in [0, 1], got {v}")))
    }
}

pub fn log_likelihood(pi: f64, eta: f64, theta: f64, d: &DiagnosticData) -> Result<f64> {
    d.validate()?;
    check_unit(pi, "pi")?;
    check_unit(eta, "eta")?;
    check_unit(theta, "theta")?;
    let m = d.healthy();
    Ok(ln_choose(d.n, d.n1)
        + ln_choose(d.n1, d.k1)
        + ln_choose(m, d.k2)
        + xlogy(d.k2, theta, "theta")?
        + xlogy(m - d.k2, 1.0 - theta, "1 - theta")?
        + xlogy(d.k1, eta, "eta")?
        + xlogy(d.n1 - d.k1, 1.0 - eta, "1 - eta")?
        + xlogy(d.n1, pi, "pi")?
        + xlogy(m, 1.0 - pi, "1 - pi")?)
}

pub fn pi_posterior(d: &DiagnosticData, prior: BetaParams) -> BetaParams {
    BetaParams {
        a: prior.a + d.n1 as f64,
        b: prior.b + d.healthy() as f64,
    }
}

#[derive(Debug, Clone)]
pub struct GridPosterior {
    pub m: usize,
    /// Row-major, row = η index.
    pub weights: Vec<f64>,
    pub eta_axis: Vec<f64>,
    pub theta_axis: Vec<f64>,
    pub prior: PriorSpec,
    pub data: DiagnosticData,
    pub seed: Option<u64>,
}

impl GridPosterior {
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.m + j]
    }

    /// Build from unnormalized nonnegative weights.
    pub fn from_weights(
        m: usize,
        weights: Vec<f64>,
        prior: PriorSpec,
        data: DiagnosticData,
        seed: Option<u64>,
    ) -> Result<Self> {
        assert_eq!(weights.len(), m * m);
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::DegeneratePosterior);
        }
        let axis: Vec<f64> = (0..m).map(|i| midpoint(i, m)).collect();
        Ok(GridPosterior {
            m,
            weights: weights.into_iter().map(|w| w / total).collect(),
            eta_axis: axis.clone(),
            theta_axis: axis,
            prior,
            data,
            seed,
        })
    }
}

pub const MIN_POSTERIOR_M: usize = 10;

pub fn joint_posterior(
    d: &DiagnosticData,
    prior: &PriorSpec,
    m: usize,
    rng: &RngState,
) -> Result<GridPosterior> {
    joint_posterior_with_samples(d, prior, m, DEFAULT_GRID_SAMPLES, rng)
}

/// As [`joint_posterior`], with an explicit sample count for priors whose
/// density is estimated by histogram.
pub fn joint_posterior_with_samples(
    d: &DiagnosticData,
    prior: &PriorSpec,
    m: usize,
    grid_samples: u64,
    rng: &RngState,
) -> Result<GridPosterior> {
    d.validate()?;
    prior.pi.validate()?;
    if m < MIN_POSTERIOR_M {
        return Err(Error::InvalidParameter(format!(
            "posterior grid needs m >= {MIN_POSTERIOR_M}, got {m}"
        )));
    }
    let family = &prior.eta_theta;
    let grid = if family.variant().has_closed_form() {
        std::sync::Arc::new(density_grid(family, m, 0, rng)?)
    } else {
        cached_density_grid(family, m, grid_samples, rng)?
    };

    let mut log_w = Vec::with_capacity(m * m);
    let axis: Vec<f64> = (0..m).map(|i| midpoint(i, m)).collect();
    let (k1, f1) = (d.k1 as f64, (d.n1 - d.k1) as f64);
    let (k2, f2) = (d.k2 as f64, (d.healthy() - d.k2) as f64);
    for (i, &eta) in axis.iter().enumerate() {
        let le = k1 * eta.ln() + f1 * (-eta).ln_1p();
        for (j, &theta) in axis.iter().enumerate() {
            let lt = k2 * theta.ln() + f2 * (-theta).ln_1p();
            log_w.push(le + lt + grid.at(i, j).ln());
        }
    }
    let max = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(Error::DegeneratePosterior);
    }
    let weights = log_w.into_iter().map(|l| (l - max).exp()).collect();
    GridPosterior::from_weights(m, weights, prior.clone(), *d, grid.seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coord {
    Eta,
    Theta,
}

pub fn marginal_posterior(gp: &GridPosterior, coord: Coord) -> Vec<f64> {
    let m = gp.m;
    match coord {
        Coord::Eta => gp.weights.chunks(m).map(|r| r.iter().sum()).collect(),
        Coord::Theta => (0..m)
            .map(|j| (0..m).map(|i| gp.weights[i * m + j]).sum())
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PosteriorSummary {
    pub mean_eta: f64,
    pub mean_theta: f64,
    pub sd_eta: f64,
    pub sd_theta: f64,
    /// Argmax cell `(i, j)`; ties go to the lexicographically smallest.
    pub mode_cell: (usize, usize),
    pub mode: (f64, f64),
    pub correlation: f64,
}

pub fn posterior_summary(gp: &GridPosterior) -> PosteriorSummary {
    let m = gp.m;
    let (mut me, mut mt) = (0.0, 0.0);
    let mut best = (0usize, 0usize);
    let mut best_w = f64::NEG_INFINITY;
    for i in 0..m {
        for j in 0..m {
            let w = gp.weight(i, j);
            me += w * gp.eta_axis[i];
            mt += w * gp.theta_axis[j];
            if w > best_w {
                best_w = w;
                best = (i, j);
            }
        }
    }
    let (mut ve, mut vt, mut c) = (0.0, 0.0, 0.0);
    for i in 0..m {
        let de = gp.eta_axis[i] - me;
        for j in 0..m {
            let w = gp.weight(i, j);
            let dt = gp.theta_axis[j] - mt;
            ve += w * de * de;
            vt += w * dt * dt;
            c += w * de * dt;
        }
    }
    let correlation = if ve > 0.0 && vt > 0.0 {
        (c / (ve * vt).sqrt()).clamp(-1.0, 1.0)
    } else {
        0.0
    };
    PosteriorSummary {
        mean_eta: me,
        mean_theta: mt,
        sd_eta: ve.sqrt(),
        sd_theta: vt.sqrt(),
        mode_cell: best,
        mode: (gp.eta_axis[best.0], gp.theta_axis[best.1]),
        correlation,
    }
}

/// Positive and negative predictive values `(Λ, Ψ)` for known π, η, θ.
pub fn predictive_values(pi: f64, eta: f64, theta: f64) -> Result<(f64, f64)> {
    for (v, w) in [(pi, "pi"), (eta, "eta"), (theta, "theta")] {
        check_unit(v, w)?;
    }
    let tp = eta * pi;
    let fp = (1.0 - theta) * (1.0 - pi);
    let tn = theta * (1.0 - pi);
    let fneg = (1.0 - eta) * pi;
    if tp + fp <= 0.0 || tn + fneg <= 0.0 {
        return Err(Error::Domain("predictive value denominator is zero".into()));
    }
    Ok((tp / (tp + fp), tn / (tn + fneg)))
}

/// Predictive probabilities of disease after a positive screen and of no
/// disease after a negative one, with η and θ averaged over their grid
/// marginals. Each proportional expression is normalized against its
/// complementary event, so a point-mass grid reproduces
/// [`predictive_values`].
pub fn predictive_propensity(gp: &GridPosterior, pi_star: f64) -> Result<(f64, f64)> {
    if !(pi_star > 0.0 && pi_star < 1.0) {
        return Err(Error::Domain(format!(
            "pi* must lie in (0, 1), got {pi_star}"
        )));
    }
    let pe = marginal_posterior(gp, Coord::Eta);
    let pt = marginal_posterior(gp, Coord::Theta);
    let e_eta: f64 = pe.iter().zip(&gp.eta_axis).map(|(p, e)| p * e).sum();
    let e_theta: f64 = pt.iter().zip(&gp.theta_axis).map(|(p, t)| p * t).sum();
    let e_miss: f64 = pe
        .iter()
        .zip(&gp.eta_axis)
        .map(|(p, e)| p * (1.0 - e))
        .sum();
    let e_false: f64 = pt
        .iter()
        .zip(&gp.theta_axis)
        .map(|(p, t)| p * (1.0 - t))
        .sum();
    let a = pi_star * e_eta;
    let b = (1.0 - pi_star) * e_false;
    let c = (1.0 - pi_star) * e_theta;
    let d = pi_star * e_miss;
    Ok((a / (a + b), c / (c + d)))
}

/// Default π*: posterior mean of the prevalence.
pub fn default_pi_star(gp: &GridPosterior) -> f64 {
    pi_posterior(&gp.data, gp.prior.pi).mean()
}
