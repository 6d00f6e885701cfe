//! Equality-in-law check for complementation.
//!
//! Draws from the original family are mapped through the complement and
//! their first two moments and correlation compared against independent
//! draws from the family that `complement` reports.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{FamilySpec, Which};
use crate::rng::RngState;
use crate::sampling::{accumulate, PairAccumulator};

/// Largest |z| accepted for any compared statistic.
pub const Z_LIMIT: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentCheck {
    pub statistic: &'static str,
    /// Statistic of the original draws after complementing.
    pub expected: f64,
    /// Statistic of draws from the reported complement family.
    pub observed: f64,
    pub std_error: f64,
    pub z: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosureReport {
    pub family: FamilySpec,
    pub which: Which,
    /// `None` when the family is not closed under this complement.
    pub complement: Option<FamilySpec>,
    /// Complementing twice gives back the original law.
    pub involution: bool,
    pub checks: Vec<MomentCheck>,
}

impl ClosureReport {
    pub fn closed(&self) -> bool {
        self.complement.is_some()
    }

    pub fn pass(&self) -> bool {
        self.closed() && self.involution && self.checks.iter().all(|c| c.pass)
    }
}

struct Summary {
    mean: [f64; 2],
    var: [f64; 2],
    corr: f64,
    se_mean: [f64; 2],
    se_var: [f64; 2],
    se_corr: f64,
}

fn summarize(acc: &PairAccumulator) -> Summary {
    let est = acc.estimate();
    let n = acc.count() as f64;
    let (rx, ry) = acc.raw_moments();
    let var = [est.var_x, est.var_y];
    let se_var = [rx, ry].map(|r| {
        let m = r[0];
        let mu2 = r[1] - m * m;
        let mu4 = r[3] - 4.0 * m * r[2] + 6.0 * m * m * r[1] - 3.0 * m.powi(4);
        ((mu4 - mu2 * mu2).max(0.0) / n).sqrt()
    });
    Summary {
        mean: [est.mean_x, est.mean_y],
        var,
        corr: est.correlation,
        se_mean: var.map(|v| (v / n).sqrt()),
        se_var,
        se_corr: est.std_error_corr,
    }
}

fn moment_checks(orig: &Summary, comp: &Summary, flip: [bool; 2]) -> Vec<MomentCheck> {
    let mut checks = Vec::new();
    let mut push = |statistic, expected: f64, observed: f64, se_a: f64, se_b: f64| {
        let std_error = (se_a * se_a + se_b * se_b).sqrt();
        let z = if std_error > 0.0 {
            (observed - expected) / std_error
        } else {
            0.0
        };
        checks.push(MomentCheck {
            statistic,
            expected,
            observed,
            std_error,
            z,
            pass: z.abs() <= Z_LIMIT,
        });
    };
    for (k, name) in ["mean_x", "mean_y"].into_iter().enumerate() {
        let m = if flip[k] {
            1.0 - orig.mean[k]
        } else {
            orig.mean[k]
        };
        push(name, m, comp.mean[k], orig.se_mean[k], comp.se_mean[k]);
    }
    for (k, name) in ["var_x", "var_y"].into_iter().enumerate() {
        push(
            name,
            orig.var[k],
            comp.var[k],
            orig.se_var[k],
            comp.se_var[k],
        );
    }
    let sign = if flip[0] != flip[1] { -1.0 } else { 1.0 };
    push(
        "correlation",
        sign * orig.corr,
        comp.corr,
        orig.se_corr,
        comp.se_corr,
    );
    checks
}

/// Compare means, variances and correlation of `n_samples` draws from each
/// of two families that should share a law.
pub fn compare_laws(
    a: &FamilySpec,
    b: &FamilySpec,
    n_samples: u64,
    rng: &RngState,
) -> Result<Vec<MomentCheck>> {
    if n_samples < 2 {
        return Err(Error::InsufficientSamples {
            got: n_samples,
            min: 2,
        });
    }
    let sa = summarize(&accumulate(a, n_samples, &rng.derive(0)));
    let sb = summarize(&accumulate(b, n_samples, &rng.derive(1)));
    Ok(moment_checks(&sa, &sb, [false, false]))
}

fn law_equal(a: &FamilySpec, b: &FamilySpec) -> bool {
    match (a.to_an8(), b.to_an8()) {
        (Ok(x), Ok(y)) => x == y,
        _ => false,
    }
}

/// Complement `family` and verify the result in law with `n_samples`
/// draws per side. AN5 yields a report with no complement.
pub fn closure_check(
    family: &FamilySpec,
    which: Which,
    n_samples: u64,
    rng: &RngState,
) -> Result<ClosureReport> {
    let complement = match family.complement(which) {
        Ok(c) => c,
        Err(Error::NotClosed(_)) => {
            return Ok(ClosureReport {
                family: family.clone(),
                which,
                complement: None,
                involution: false,
                checks: Vec::new(),
            })
        }
        Err(e) => return Err(e),
    };
    if n_samples < 2 {
        return Err(Error::InsufficientSamples {
            got: n_samples,
            min: 2,
        });
    }
    let involution = law_equal(&complement.complement(which)?, family);

    let orig = summarize(&accumulate(family, n_samples, &rng.derive(0)));
    let comp = summarize(&accumulate(&complement, n_samples, &rng.derive(1)));
    let checks = moment_checks(&orig, &comp, [which.x(), which.y()]);

    Ok(ClosureReport {
        family: family.clone(),
        which,
        complement: Some(complement),
        involution,
        checks,
    })
}
