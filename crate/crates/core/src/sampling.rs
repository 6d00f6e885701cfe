//! Gamma variates, bivariate draws and Monte Carlo moment estimation.
//!
//! Large jobs are cut into a fixed number of shards; shard `i` draws from
//! `rng.derive(i)` and shard results are merged in index order, so every
//! result depends only on the inputs and the seed, never on thread count.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{FamilySpec, Ratio, RatioPlan};
use crate::rng::RngState;

/// Shapes below this take the boost `G(a+1)·U^{1/a}` in log space.
const LOG_BOOST_BELOW: f64 = 0.02;

/// A pair plan switches to log-space ratios when any positive shape is below
/// this; above it a linear-space draw cannot underflow to zero.
const LOG_PLAN_BELOW: f64 = 0.1;

pub const SHARDS: u64 = 64;

/// Marsaglia–Tsang squeeze sampler for `Gamma(shape, 1)`.
#[derive(Debug, Clone, Copy)]
pub struct GammaSampler {
    shape: f64,
    d: f64,
    c: f64,
}

impl GammaSampler {
    pub fn new(shape: f64) -> Result<Self> {
        if !(shape.is_finite() && shape > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma shape must be positive, got {shape}"
            )));
        }
        Ok(Self::new_unchecked(shape))
    }

    // shape 0 is accepted and yields the constant 0
    fn new_unchecked(shape: f64) -> Self {
        let base = if shape < 1.0 { shape + 1.0 } else { shape };
        let d = base - 1.0 / 3.0;
        GammaSampler {
            shape,
            d,
            c: 1.0 / (9.0 * d).sqrt(),
        }
    }

    fn squeeze<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        loop {
            let x: f64 = rng.sample(StandardNormal);
            let v = 1.0 + self.c * x;
            if v <= 0.0 {
                continue;
            }
            let v = v * v * v;
            let u = open_unit(rng);
            let x2 = x * x;
            if u < 1.0 - 0.0331 * x2 * x2 || u.ln() < 0.5 * x2 + self.d * (1.0 - v + v.ln()) {
                return self.d * v;
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.shape == 0.0 {
            return 0.0;
        }
        if self.shape >= 1.0 {
            return self.squeeze(rng);
        }
        if self.shape < LOG_BOOST_BELOW {
            return self.sample_ln(rng).exp();
        }
        self.squeeze(rng) * open_unit(rng).powf(1.0 / self.shape)
    }

    /// Natural log of a draw; `-inf` for shape 0. Never underflows.
    pub fn sample_ln<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.shape == 0.0 {
            return f64::NEG_INFINITY;
        }
        let g = self.squeeze(rng).ln();
        if self.shape >= 1.0 {
            g
        } else {
            g + open_unit(rng).ln() / self.shape
        }
    }
}

/// Uniform on `(0, 1]`.
fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

pub fn gamma_sample(rng: &mut RngState, shape: f64) -> Result<f64> {
    Ok(GammaSampler::new(shape)?.sample(rng))
}

/// Prepared sampler for one family.
#[derive(Debug, Clone)]
pub struct PairSampler {
    gammas: Vec<GammaSampler>,
    x: Ratio,
    y: Ratio,
    log_space: bool,
}

impl PairSampler {
    pub fn new(family: &FamilySpec) -> Self {
        let RatioPlan { shapes, x, y } = family.ratio_plan();
        let log_space = shapes.iter().any(|&s| s > 0.0 && s < LOG_PLAN_BELOW);
        PairSampler {
            gammas: shapes
                .iter()
                .map(|&s| GammaSampler::new_unchecked(s))
                .collect(),
            x,
            y,
            log_space,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let mut buf = [0.0f64; 8];
        let draws = &mut buf[..self.gammas.len()];
        if self.log_space {
            for (slot, g) in draws.iter_mut().zip(&self.gammas) {
                *slot = g.sample_ln(rng);
            }
            (log_ratio(draws, self.x), log_ratio(draws, self.y))
        } else {
            for (slot, g) in draws.iter_mut().zip(&self.gammas) {
                *slot = g.sample(rng);
            }
            (linear_ratio(draws, self.x), linear_ratio(draws, self.y))
        }
    }
}

fn masked_sum(v: &[f64], mask: u16) -> f64 {
    v.iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, x)| x)
        .sum()
}

fn linear_ratio(v: &[f64], r: Ratio) -> f64 {
    let n = masked_sum(v, r.num);
    let d = masked_sum(v, r.den);
    n / (n + d)
}

fn log_sum_exp(v: &[f64], mask: u16) -> f64 {
    let max = v
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, &x)| x)
        .fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    let s: f64 = v
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, &x)| (x - max).exp())
        .sum();
    max + s.ln()
}

fn log_ratio(v: &[f64], r: Ratio) -> f64 {
    let ln_n = log_sum_exp(v, r.num);
    let ln_d = log_sum_exp(v, r.den);
    // n / (n + d) = 1 / (1 + e^{ln d − ln n})
    1.0 / (1.0 + (ln_d - ln_n).exp())
}

pub fn sample_pair(rng: &mut RngState, family: &FamilySpec) -> (f64, f64) {
    PairSampler::new(family).sample(rng)
}

/// Split `n` into `SHARDS` contiguous blocks; earlier shards absorb the
/// remainder.
pub fn shard_sizes(n: u64) -> Vec<u64> {
    let base = n / SHARDS;
    let extra = n % SHARDS;
    (0..SHARDS).map(|i| base + u64::from(i < extra)).collect()
}

/// `n` draws in a reproducible order.
pub fn sample_pairs(family: &FamilySpec, n: u64, rng: &RngState) -> Vec<(f64, f64)> {
    let sampler = PairSampler::new(family);
    let chunks: Vec<Vec<(f64, f64)>> = shard_sizes(n)
        .into_par_iter()
        .enumerate()
        .map(|(i, size)| {
            let mut r = rng.derive(i as u64);
            (0..size).map(|_| sampler.sample(&mut r)).collect()
        })
        .collect();
    chunks.into_iter().flatten().collect()
}

/// Streaming bivariate summary: centred co-moments (merged with Chan's
/// update) plus raw power sums of each coordinate up to order 4.
#[derive(Debug, Clone, Default)]
pub struct PairAccumulator {
    n: u64,
    mean_x: f64,
    mean_y: f64,
    m2_x: f64,
    m2_y: f64,
    c_xy: f64,
    power_x: [f64; 4],
    power_y: [f64; 4],
    sum_xy: f64,
}

impl PairAccumulator {
    pub fn push(&mut self, x: f64, y: f64) {
        self.n += 1;
        let n = self.n as f64;
        let dx = x - self.mean_x;
        let dy = y - self.mean_y;
        self.mean_x += dx / n;
        self.mean_y += dy / n;
        self.m2_x += dx * (x - self.mean_x);
        self.m2_y += dy * (y - self.mean_y);
        self.c_xy += dx * (y - self.mean_y);
        let (mut px, mut py) = (1.0, 1.0);
        for k in 0..4 {
            px *= x;
            py *= y;
            self.power_x[k] += px;
            self.power_y[k] += py;
        }
        self.sum_xy += x * y;
    }

    pub fn merge(&mut self, other: &PairAccumulator) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = other.clone();
            return;
        }
        let (na, nb) = (self.n as f64, other.n as f64);
        let n = na + nb;
        let dx = other.mean_x - self.mean_x;
        let dy = other.mean_y - self.mean_y;
        self.m2_x += other.m2_x + dx * dx * na * nb / n;
        self.m2_y += other.m2_y + dy * dy * na * nb / n;
        self.c_xy += other.c_xy + dx * dy * na * nb / n;
        self.mean_x += dx * nb / n;
        self.mean_y += dy * nb / n;
        for k in 0..4 {
            self.power_x[k] += other.power_x[k];
            self.power_y[k] += other.power_y[k];
        }
        self.sum_xy += other.sum_xy;
        self.n += other.n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    /// Sample raw moments `E[X^k]`, `k = 1..4`, for each coordinate.
    pub fn raw_moments(&self) -> ([f64; 4], [f64; 4]) {
        let n = self.n as f64;
        (self.power_x.map(|s| s / n), self.power_y.map(|s| s / n))
    }

    pub fn mean_product(&self) -> f64 {
        self.sum_xy / self.n as f64
    }

    pub fn estimate(&self) -> MomentEstimate {
        let n = self.n as f64;
        let var_x = self.m2_x / (n - 1.0);
        let var_y = self.m2_y / (n - 1.0);
        let r = (self.c_xy / (self.m2_x * self.m2_y).sqrt()).clamp(-1.0, 1.0);
        MomentEstimate {
            mean_x: self.mean_x,
            mean_y: self.mean_y,
            var_x,
            var_y,
            correlation: r,
            std_error_corr: (1.0 - r * r) / n.sqrt(),
            n_samples: self.n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub mean_x: f64,
    pub mean_y: f64,
    pub var_x: f64,
    pub var_y: f64,
    pub correlation: f64,
    /// Large-sample standard error `(1 − r²)/√n`.
    pub std_error_corr: f64,
    pub n_samples: u64,
}

pub const DEFAULT_MOMENT_SAMPLES: u64 = 1_000_000;

/// Accumulate `n_samples` draws of `family` across the fixed shard layout.
pub fn accumulate(family: &FamilySpec, n_samples: u64, rng: &RngState) -> PairAccumulator {
    let sampler = PairSampler::new(family);
    let parts: Vec<PairAccumulator> = shard_sizes(n_samples)
        .into_par_iter()
        .enumerate()
        .map(|(i, size)| {
            let mut r = rng.derive(i as u64);
            let mut acc = PairAccumulator::default();
            for _ in 0..size {
                let (x, y) = sampler.sample(&mut r);
                acc.push(x, y);
            }
            acc
        })
        .collect();
    let mut total = PairAccumulator::default();
    for p in &parts {
        total.merge(p);
    }
    total
}

pub fn estimate_moments(
    family: &FamilySpec,
    n_samples: u64,
    rng: &RngState,
) -> Result<MomentEstimate> {
    if n_samples < 2 {
        return Err(Error::InsufficientSamples {
            got: n_samples,
            min: 2,
        });
    }
    Ok(accumulate(family, n_samples, rng).estimate())
}
