//! Closed-form OL densities and m×m density grids.
//!
//! The OL⁺ density is
//!
//! ```text
//! f(x, y) = Γ(a₁+a₂+a₃) / (Γ(a₁)Γ(a₂)Γ(a₃))
//!           · x^{a₁−1} y^{a₂−1} (1−x)^{a₂+a₃−1} (1−y)^{a₁+a₃−1} / (1 − xy)^{a₁+a₂+a₃}
//! ```
//!
//! and OL⁻ follows by substituting `y = 1 − θ`. The gamma-product constant
//! is checked against quadrature once per parameter vector.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use once_cell::sync::Lazy;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::family::{AlphaVector, FamilySpec};
use crate::quad;
use crate::rng::RngState;
use crate::sampling::{shard_sizes, PairSampler};
use crate::special::{beta_pdf, beta_pdf_split, ln_gamma_unchecked, BetaParams};

pub const NORMALIZATION_TOL: f64 = 1e-6;
pub const MIN_GRID_SAMPLES: u64 = 10_000;
pub const DEFAULT_GRID_SAMPLES: u64 = 10_000_000;
pub const DEFAULT_M: usize = 100;

/// OL⁻ density with its normalizing constant resolved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OlDensity {
    a1: f64,
    a2: f64,
    a3: f64,
    log_norm: f64,
}

static VERIFIED: Lazy<Mutex<HashMap<[u64; 3], OlDensity>>> = Lazy::new(Default::default);

impl OlDensity {
    /// Resolve and quadrature-check the constant for `alphas` (length 3,
    /// all positive). Results are memoised per parameter vector.
    pub fn new(alphas: &AlphaVector) -> Result<Self> {
        let v = alphas.values();
        if v.len() != 3 || v.iter().any(|&a| !(a > 0.0)) {
            return Err(Error::InvalidAlphas(format!(
                "OL densities need three positive shapes, got {v:?}"
            )));
        }
        let key = [v[0].to_bits(), v[1].to_bits(), v[2].to_bits()];
        if let Some(d) = VERIFIED.lock().unwrap().get(&key) {
            return Ok(*d);
        }
        let d = Self::unverified(v[0], v[1], v[2]);
        let q = quad::unit_square(|e, ec, t, tc| d.eval(e, ec, t, tc), 1e-9);
        if (q.value - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Normalization {
                integral: q.value,
                tolerance: NORMALIZATION_TOL,
            });
        }
        VERIFIED.lock().unwrap().insert(key, d);
        Ok(d)
    }

    fn unverified(a1: f64, a2: f64, a3: f64) -> Self {
        let log_norm = ln_gamma_unchecked(a1 + a2 + a3)
            - ln_gamma_unchecked(a1)
            - ln_gamma_unchecked(a2)
            - ln_gamma_unchecked(a3);
        OlDensity {
            a1,
            a2,
            a3,
            log_norm,
        }
    }

    pub fn log_norm(&self) -> f64 {
        self.log_norm
    }

    /// OL⁻ density at `(eta, theta)` given also `1 − eta` and `1 − theta`;
    /// no domain check.
    fn eval(&self, eta: f64, eta_c: f64, theta: f64, theta_c: f64) -> f64 {
        let (a1, a2, a3) = (self.a1, self.a2, self.a3);
        // 1 − η(1 − θ) without cancellation near η = 1, θ = 0
        let gap = eta_c + eta * theta;
        let ln = self.log_norm
            + (a1 - 1.0) * eta.ln()
            + (a2 + a3 - 1.0) * eta_c.ln()
            + (a1 + a3 - 1.0) * theta.ln()
            + (a2 - 1.0) * theta_c.ln()
            - (a1 + a2 + a3) * gap.ln();
        ln.exp()
    }

    pub fn minus(&self, eta: f64, theta: f64) -> Result<f64> {
        check_open_square(eta, theta)?;
        Ok(self.eval(eta, 1.0 - eta, theta, 1.0 - theta))
    }

    pub fn plus(&self, x: f64, y: f64) -> Result<f64> {
        check_open_square(x, y)?;
        self.minus(x, 1.0 - y)
    }

    pub fn star(&self, x: f64, y: f64) -> Result<f64> {
        check_open_square(x, y)?;
        self.plus(1.0 - x, 1.0 - y)
    }
}

fn check_open_square(x: f64, y: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "density requires a point in the open unit square, got ({x}, {y})"
        )))
    }
}

pub fn ol_minus_pdf(eta: f64, theta: f64, alphas: &AlphaVector) -> Result<f64> {
    check_open_square(eta, theta)?;
    OlDensity::new(alphas)?.minus(eta, theta)
}

pub fn ol_plus_pdf(x: f64, y: f64, alphas: &AlphaVector) -> Result<f64> {
    check_open_square(x, y)?;
    OlDensity::new(alphas)?.plus(x, y)
}

pub fn ol_star_pdf(x: f64, y: f64, alphas: &AlphaVector) -> Result<f64> {
    check_open_square(x, y)?;
    OlDensity::new(alphas)?.star(x, y)
}

/// Closed-form joint density, available for every family except AN5/AN8.
#[derive(Debug, Clone, Copy)]
pub enum ClosedForm {
    OlPlus(OlDensity),
    OlMinus(OlDensity),
    OlStar(OlDensity),
    Independent(BetaParams, BetaParams),
}

impl ClosedForm {
    pub fn for_family(family: &FamilySpec) -> Result<Option<Self>> {
        Ok(Some(match family {
            FamilySpec::OlPlus(a) => ClosedForm::OlPlus(OlDensity::new(a)?),
            FamilySpec::OlMinus(a) => ClosedForm::OlMinus(OlDensity::new(a)?),
            FamilySpec::OlStar(a) => ClosedForm::OlStar(OlDensity::new(a)?),
            FamilySpec::IndependentBetas(x, y) => ClosedForm::Independent(*x, *y),
            FamilySpec::An5(_) | FamilySpec::An8(_) => return Ok(None),
        }))
    }

    pub fn pdf(&self, x: f64, y: f64) -> Result<f64> {
        match self {
            ClosedForm::OlPlus(d) => d.plus(x, y),
            ClosedForm::OlMinus(d) => d.minus(x, y),
            ClosedForm::OlStar(d) => d.star(x, y),
            ClosedForm::Independent(p, q) => {
                check_open_square(x, y)?;
                Ok(beta_pdf(x, *p)? * beta_pdf(y, *q)?)
            }
        }
    }

    /// Density at `(x, y)` given also `1 − x` and `1 − y`, for points closer
    /// to an upper edge than `1.0 - x` can express.
    pub fn pdf_split(&self, x: f64, x_c: f64, y: f64, y_c: f64) -> Result<f64> {
        if !(x > 0.0 && x_c > 0.0 && y > 0.0 && y_c > 0.0) {
            return Err(Error::Domain(format!(
                "density requires a point in the open unit square, got ({x}, {y})"
            )));
        }
        Ok(match self {
            ClosedForm::OlMinus(d) => d.eval(x, x_c, y, y_c),
            ClosedForm::OlPlus(d) => d.eval(x, x_c, y_c, y),
            ClosedForm::OlStar(d) => d.eval(x_c, x, y, y_c),
            ClosedForm::Independent(p, q) => {
                beta_pdf_split(x, x_c, *p)? * beta_pdf_split(y, y_c, *q)?
            }
        })
    }
}

/// Midpoint of cell `i` on an `m`-cell axis.
pub fn midpoint(i: usize, m: usize) -> f64 {
    (i as f64 + 0.5) / m as f64
}

/// Density values at the m×m cell midpoints, row-major with row = x index.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    pub m: usize,
    pub cells: Vec<f64>,
    pub estimated: bool,
    pub n_samples: u64,
    pub family: FamilySpec,
    pub seed: Option<u64>,
}

impl DensityGrid {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.cells[i * self.m + j]
    }

    /// `(1/m²) Σ cells`, the grid's total mass.
    pub fn mass(&self) -> f64 {
        self.cells.iter().sum::<f64>() / (self.m * self.m) as f64
    }

    /// Per-cell density of the x coordinate: row sums divided by m.
    pub fn x_marginal(&self) -> Vec<f64> {
        self.cells
            .chunks(self.m)
            .map(|row| row.iter().sum::<f64>() / self.m as f64)
            .collect()
    }

    pub fn y_marginal(&self) -> Vec<f64> {
        let m = self.m;
        (0..m)
            .map(|j| (0..m).map(|i| self.cells[i * m + j]).sum::<f64>() / m as f64)
            .collect()
    }
}

pub fn density_grid(
    family: &FamilySpec,
    m: usize,
    n_samples: u64,
    rng: &RngState,
) -> Result<DensityGrid> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!(
            "grid resolution must be >= 2, got {m}"
        )));
    }
    if let Some(cf) = ClosedForm::for_family(family)? {
        let cells: Vec<f64> = (0..m * m)
            .into_par_iter()
            .map(|k| cf.pdf(midpoint(k / m, m), midpoint(k % m, m)))
            .collect::<Result<_>>()?;
        return Ok(DensityGrid {
            m,
            cells,
            estimated: false,
            n_samples: 0,
            family: family.clone(),
            seed: None,
        });
    }
    if n_samples < MIN_GRID_SAMPLES {
        return Err(Error::InsufficientSamples {
            got: n_samples,
            min: MIN_GRID_SAMPLES,
        });
    }
    let counts = histogram(family, m, n_samples, rng);
    let scale = (m * m) as f64 / n_samples as f64;
    Ok(DensityGrid {
        m,
        cells: counts.iter().map(|&c| c as f64 * scale).collect(),
        estimated: true,
        n_samples,
        family: family.clone(),
        seed: Some(rng.seed()),
    })
}

fn cell_index(v: f64, m: usize) -> usize {
    ((v * m as f64) as usize).min(m - 1)
}

fn histogram(family: &FamilySpec, m: usize, n: u64, rng: &RngState) -> Vec<u64> {
    let sampler = PairSampler::new(family);
    shard_sizes(n)
        .into_par_iter()
        .enumerate()
        .map(|(s, size)| {
            let mut r = rng.derive(s as u64);
            let mut counts = vec![0u64; m * m];
            for _ in 0..size {
                let (x, y) = sampler.sample(&mut r);
                counts[cell_index(x, m) * m + cell_index(y, m)] += 1;
            }
            counts
        })
        .reduce(
            || vec![0u64; m * m],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

type GridKey = (String, Vec<u64>, usize, u64, u64, u64);

static GRID_CACHE: Lazy<Mutex<HashMap<GridKey, Arc<DensityGrid>>>> = Lazy::new(Default::default);

/// `density_grid` memoised on `(family, m, n_samples, seed, stream)`.
pub fn cached_density_grid(
    family: &FamilySpec,
    m: usize,
    n_samples: u64,
    rng: &RngState,
) -> Result<Arc<DensityGrid>> {
    let key = (
        family.variant().name().to_string(),
        family.params().iter().map(|v| v.to_bits()).collect(),
        m,
        n_samples,
        rng.seed(),
        rng.stream(),
    );
    if let Some(g) = GRID_CACHE.lock().unwrap().get(&key) {
        return Ok(Arc::clone(g));
    }
    let grid = Arc::new(density_grid(family, m, n_samples, rng)?);
    GRID_CACHE.lock().unwrap().insert(key, Arc::clone(&grid));
    Ok(grid)
}
