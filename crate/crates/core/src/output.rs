//! CSV and JSON renderings. Numbers use 12 significant digits in the
//! shortest of fixed or exponent form, so output is byte-stable.

use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::closure::ClosureReport;
use crate::density::DensityGrid;
use crate::family::FamilySpec;
use crate::inference::{marginal_posterior, Coord, GridPosterior};
use crate::survivability::{Table, TableRow};

pub const SIG_DIGITS: usize = 12;

/// Format like C's `%.12g`.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if exp < -5 || exp >= SIG_DIGITS as i32 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn join(vals: impl IntoIterator<Item = f64>) -> String {
    vals.into_iter().map(fmt_num).collect::<Vec<_>>().join(",")
}

pub fn family_json(f: &FamilySpec) -> Value {
    json!({ "variant": f.variant().name(), "alphas": f.params() })
}

pub fn samples_csv(pairs: &[(f64, f64)]) -> String {
    let mut out = String::from("x,y\n");
    for (x, y) in pairs {
        let _ = writeln!(out, "{},{}", fmt_num(*x), fmt_num(*y));
    }
    out
}

/// m×m matrix with a header of column (y) midpoints.
fn matrix_csv(m: usize, cells: &[f64]) -> String {
    let mut out = join((0..m).map(|j| (j as f64 + 0.5) / m as f64));
    out.push('\n');
    for row in cells.chunks(m) {
        out.push_str(&join(row.iter().copied()));
        out.push('\n');
    }
    out
}

pub fn density_csv(g: &DensityGrid) -> String {
    matrix_csv(g.m, &g.cells)
}

pub fn density_json(g: &DensityGrid) -> Value {
    json!({
        "variant": g.family.variant().name(),
        "alphas": g.family.params(),
        "m": g.m,
        "n_samples": g.n_samples,
        "seed": g.seed,
        "estimated": g.estimated,
        "cells": g.cells.chunks(g.m).collect::<Vec<_>>(),
    })
}

pub fn posterior_csv(gp: &GridPosterior) -> String {
    matrix_csv(gp.m, &gp.weights)
}

pub fn posterior_json(gp: &GridPosterior) -> Value {
    json!({
        "m": gp.m,
        "eta_axis": gp.eta_axis,
        "theta_axis": gp.theta_axis,
        "data": gp.data,
        "prior": {
            "eta_theta": family_json(&gp.prior.eta_theta),
            "pi": gp.prior.pi,
        },
        "seed": gp.seed,
        "weights": gp.weights.chunks(gp.m).collect::<Vec<_>>(),
    })
}

pub fn marginal_csv(gp: &GridPosterior, coord: Coord) -> String {
    let (name, axis) = match coord {
        Coord::Eta => ("eta", &gp.eta_axis),
        Coord::Theta => ("theta", &gp.theta_axis),
    };
    let mut out = format!("{name},probability\n");
    for (x, p) in axis.iter().zip(marginal_posterior(gp, coord)) {
        let _ = writeln!(out, "{},{}", fmt_num(*x), fmt_num(p));
    }
    out
}

/// Table reproduction in the published column order plus method and
/// standard error. Rows whose components have different marginals are
/// emitted once per component.
pub fn table_csv(table: Table, rows: &[TableRow]) -> String {
    let mut out = String::new();
    match table {
        Table::Exchangeable => {
            out.push_str("alpha_beta,component_survivability,variance,series_survivability,method,std_error\n");
            for r in rows {
                let rep = &r.report;
                let _ = writeln!(
                    out,
                    "\"{}\",{},{},{},{},{}",
                    r.label,
                    fmt_num(rep.component_survivability.0),
                    fmt_num(rep.variances.0),
                    fmt_num(rep.system_survivability),
                    rep.method.name(),
                    fmt_num(rep.std_error)
                );
            }
        }
        Table::OlPlus | Table::An5 => {
            out.push_str(
                "family,marginal,component_survivability,variance,correlation,series_survivability,method,std_error\n",
            );
            for r in rows {
                let rep = &r.report;
                let (p, q) = r.marginals;
                let mut comps = vec![(p, rep.component_survivability.0, rep.variances.0)];
                if p != q {
                    comps.push((q, rep.component_survivability.1, rep.variances.1));
                }
                for (b, e, v) in comps {
                    let _ = writeln!(
                        out,
                        "\"{}\",\"B({}, {})\",{},{},{},{},{},{}",
                        r.label,
                        fmt_num(b.a),
                        fmt_num(b.b),
                        fmt_num(e),
                        fmt_num(v),
                        fmt_num(rep.correlation),
                        fmt_num(rep.system_survivability),
                        rep.method.name(),
                        fmt_num(rep.std_error)
                    );
                }
            }
        }
    }
    out
}

pub fn closure_csv(r: &ClosureReport) -> String {
    let mut out = String::from("statistic,expected,observed,std_error,z,pass\n");
    for c in &r.checks {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            c.statistic,
            fmt_num(c.expected),
            fmt_num(c.observed),
            fmt_num(c.std_error),
            fmt_num(c.z),
            c.pass
        );
    }
    out
}

pub fn closure_json(r: &ClosureReport) -> Value {
    let status = match (&r.complement, r.pass()) {
        (None, _) => "not closed",
        (Some(_), true) => "pass",
        (Some(_), false) => "fail",
    };
    json!({
        "family": family_json(&r.family),
        "which": r.which.name(),
        "closed": r.closed(),
        "complement": r.complement.as_ref().map(family_json),
        "involution": r.involution,
        "checks": r.checks,
        "status": status,
    })
}

pub fn table_json(rows: &[TableRow]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| {
                json!({
                    "label": r.label,
                    "marginals": [r.marginals.0, r.marginals.1],
                    "report": r.report,
                })
            })
            .collect(),
    )
}
