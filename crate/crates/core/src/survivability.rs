//! Survivability of two-component systems whose component propensities
//! θ₁, θ₂ are uncertain.
//!
//! Each component survives with probability θᵢ given θᵢ, independently given
//! the propensities, so a series system survives with probability
//! `E(θ₁θ₂)`. A parallel system fails only if both components fail:
//!
//! ```text
//! P(parallel survives) = 1 − E[(1 − θ₁)(1 − θ₂)] = E(θ₁) + E(θ₂) − E(θ₁θ₂)
//! ```
//!
//! `E(θ₁θ₂)` is `E(θ²)` for exchangeable lifetimes (one shared θ),
//! `E(θ₁)E(θ₂)` for hierarchically independent ones, and
//! `ρ √(V₁V₂) + E(θ₁)E(θ₂)` for interdependent ones, with the marginal
//! moments exact and ρ estimated by Monte Carlo.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::FamilySpec;
use crate::rng::RngState;
use crate::sampling::accumulate;
use crate::special::BetaParams;

#[derive(Debug, Clone, PartialEq)]
pub enum Propensities {
    Exchangeable(BetaParams),
    HierIndependent(BetaParams, BetaParams),
    Interdependent(FamilySpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum System {
    Series,
    Parallel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurvivabilityScenario {
    pub propensities: Propensities,
    pub system: System,
}

#[derive(Debug, Clone)]
pub struct MonteCarlo {
    pub n_samples: u64,
    pub rng: RngState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Analytic,
    MonteCarlo,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::MonteCarlo => "monte_carlo",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurvivabilityReport {
    pub component_survivability: (f64, f64),
    pub variances: (f64, f64),
    /// Zero for the exchangeable and independent architectures.
    pub correlation: f64,
    pub system_survivability: f64,
    pub method: Method,
    /// Standard error of `system_survivability`; zero when analytic.
    pub std_error: f64,
    /// Direct Monte Carlo mean of θ₁θ₂, kept as a cross-check of the
    /// correlation route.
    pub direct_product_mean: Option<f64>,
}

/// `E(θ²)` for θ ~ B(α, β).
pub fn exchangeable_second_moment(p: BetaParams) -> f64 {
    let (a, b) = (p.a, p.b);
    let s = a + b;
    (a * b + a * a * (s + 1.0)) / (s * s * (s + 1.0))
}

fn system_value(system: System, e1: f64, e2: f64, e12: f64) -> f64 {
    match system {
        System::Series => e12,
        System::Parallel => e1 + e2 - e12,
    }
}

pub fn survivability(
    s: &SurvivabilityScenario,
    mc: Option<&MonteCarlo>,
) -> Result<SurvivabilityReport> {
    match &s.propensities {
        Propensities::Exchangeable(p) => {
            p.validate()?;
            let (e, v) = (p.mean(), p.variance());
            Ok(SurvivabilityReport {
                component_survivability: (e, e),
                variances: (v, v),
                correlation: 0.0,
                system_survivability: system_value(s.system, e, e, exchangeable_second_moment(*p)),
                method: Method::Analytic,
                std_error: 0.0,
                direct_product_mean: None,
            })
        }
        Propensities::HierIndependent(p, q) => {
            p.validate()?;
            q.validate()?;
            let (e1, e2) = (p.mean(), q.mean());
            Ok(SurvivabilityReport {
                component_survivability: (e1, e2),
                variances: (p.variance(), q.variance()),
                correlation: 0.0,
                system_survivability: system_value(s.system, e1, e2, e1 * e2),
                method: Method::Analytic,
                std_error: 0.0,
                direct_product_mean: None,
            })
        }
        Propensities::Interdependent(family) => {
            let mc = mc.ok_or(Error::MissingMonteCarlo("interdependent propensities"))?;
            if mc.n_samples < 2 {
                return Err(Error::InsufficientSamples {
                    got: mc.n_samples,
                    min: 2,
                });
            }
            let (p, q) = family.marginal_params();
            let (e1, e2) = (p.mean(), q.mean());
            let (v1, v2) = (p.variance(), q.variance());
            let acc = accumulate(family, mc.n_samples, &mc.rng);
            let est = acc.estimate();
            let scale = (v1 * v2).sqrt();
            let e12 = est.correlation * scale + e1 * e2;
            Ok(SurvivabilityReport {
                component_survivability: (e1, e2),
                variances: (v1, v2),
                correlation: est.correlation,
                system_survivability: system_value(s.system, e1, e2, e12),
                method: Method::MonteCarlo,
                std_error: est.std_error_corr * scale,
                direct_product_mean: Some(acc.mean_product()),
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Table {
    Exchangeable,
    OlPlus,
    An5,
}

impl Table {
    pub fn from_number(n: u32) -> Result<Self> {
        match n {
            4 => Ok(Table::Exchangeable),
            5 => Ok(Table::OlPlus),
            6 => Ok(Table::An5),
            other => Err(Error::InvalidParameter(format!(
                "no table {other}; expected 4, 5 or 6"
            ))),
        }
    }
}

pub const TABLE4_PARAMS: [(f64, f64); 5] =
    [(1.0, 1.0), (3.0, 1.0), (10.1, 1.0), (3.0, 0.3), (1.0, 0.1)];

/// Marginals `B(a, b)` realised by OL⁺ with α = (a, a, b).
pub const TABLE5_MARGINALS: [(f64, f64); 4] = [(1.0, 1.0), (3.0, 1.0), (3.0, 0.3), (1.0, 0.1)];

pub const TABLE6_ALPHAS: [[f64; 5]; 3] = [
    [10.0, 10.0, 0.1, 0.1, 10.0],
    [10.0, 10.0, 0.1, 0.1, 1.0],
    [5.0, 10.0, 0.1, 0.1, 0.5],
];

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub label: String,
    pub marginals: (BetaParams, BetaParams),
    pub report: SurvivabilityReport,
}

pub fn reproduce_table(table: Table, mc: Option<&MonteCarlo>) -> Result<Vec<TableRow>> {
    let series = |propensities| SurvivabilityScenario {
        propensities,
        system: System::Series,
    };
    let row_mc = |i: usize| -> Result<MonteCarlo> {
        let mc = mc.ok_or(Error::MissingMonteCarlo("tables 5 and 6"))?;
        Ok(MonteCarlo {
            n_samples: mc.n_samples,
            rng: mc.rng.derive(i as u64),
        })
    };
    match table {
        Table::Exchangeable => TABLE4_PARAMS
            .iter()
            .map(|&(a, b)| {
                let p = BetaParams::new(a, b)?;
                Ok(TableRow {
                    label: format!("({a}, {b})"),
                    marginals: (p, p),
                    report: survivability(&series(Propensities::Exchangeable(p)), None)?,
                })
            })
            .collect(),
        Table::OlPlus => TABLE5_MARGINALS
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| {
                let family = FamilySpec::ol_plus(&[a, a, b])?;
                let rmc = row_mc(i)?;
                Ok(TableRow {
                    label: format!("B({a}, {b})"),
                    marginals: family.marginal_params(),
                    report: survivability(
                        &series(Propensities::Interdependent(family)),
                        Some(&rmc),
                    )?,
                })
            })
            .collect(),
        Table::An5 => TABLE6_ALPHAS
            .iter()
            .enumerate()
            .map(|(i, alphas)| {
                let family = FamilySpec::an5(alphas)?;
                let rmc = row_mc(i)?;
                let label = alphas
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                Ok(TableRow {
                    label: format!("AN5({label})"),
                    marginals: family.marginal_params(),
                    report: survivability(
                        &series(Propensities::Interdependent(family)),
                        Some(&rmc),
                    )?,
                })
            })
            .collect(),
    }
}
