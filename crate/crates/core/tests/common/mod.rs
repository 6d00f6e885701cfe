//! Test oracles kept independent of the library's numerics.

#![allow(dead_code)]

use bivbeta::sampling::{accumulate, PairAccumulator};
use bivbeta::{FamilySpec, RngState};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for k in 0..7 {
        let dx = h * XGK[k];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[k] * s;
        if k % 2 == 1 {
            gauss += WG[k / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Globally adaptive 7/15-point Gauss–Kronrod on `[a, b]`: the interval
/// with the largest error estimate is bisected until the summed estimate
/// drops below `abs_tol` (or below rounding level relative to the value),
/// or 4000 intervals are in play.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, abs_tol: f64) -> f64 {
    let (v, e) = gk15(&mut f, a, b);
    let mut parts = vec![(a, b, v, e)];
    let mut total_err = e;
    let mut total = v;
    while total_err > abs_tol.max(1e-14 * total.abs()) && parts.len() < 4000 {
        let (k, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("nonempty");
        let (lo, hi, value, err) = parts.swap_remove(k);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            parts.push((lo, hi, value, 0.0));
            total_err -= err;
            continue;
        }
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        total_err += e1 + e2 - err;
        total += v1 + v2 - value;
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
    parts.iter().map(|p| p.2).sum()
}

/// Integrate `f(x, 1 − x)` over `(0, 1)`. Each half is mapped from the
/// nearer edge by `x = t⁸/2`, which tames power singularities there, and
/// the upper half hands `f` the exact distance to 1.
pub fn integrate_unit<F: FnMut(f64, f64) -> f64>(mut f: F, abs_tol: f64) -> f64 {
    let lower = integrate(
        |t| {
            let x = 0.5 * t.powi(8);
            if x > 0.0 {
                4.0 * t.powi(7) * f(x, 1.0 - x)
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        0.5 * abs_tol,
    );
    let upper = integrate(
        |t| {
            let u = 0.5 * t.powi(8);
            if u > 0.0 {
                4.0 * t.powi(7) * f(1.0 - u, u)
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        0.5 * abs_tol,
    );
    lower + upper
}

/// Nested integration of `f(x, 1 − x, y, 1 − y)` over the open unit square.
pub fn integrate_square<F: FnMut(f64, f64, f64, f64) -> f64>(mut f: F, abs_tol: f64) -> f64 {
    integrate_unit(
        |x, xc| integrate_unit(|y, yc| f(x, xc, y, yc), abs_tol * 0.01),
        abs_tol,
    )
}

/// Analytic raw moments `E[X^k]`, `k = 1..4`, of `B(a, b)`.
pub fn beta_raw_moments(a: f64, b: f64) -> [f64; 4] {
    let mut m = [0.0; 4];
    let mut acc = 1.0;
    for k in 0..4 {
        let kf = k as f64;
        acc *= (a + kf) / (a + b + kf);
        m[k] = acc;
    }
    m
}

/// Standard errors of the sample raw moments `E[X^k]` from the analytic
/// moments up to order 8.
pub fn beta_raw_moment_se(a: f64, b: f64, n: u64) -> [f64; 4] {
    let mut mom = [0.0; 9];
    mom[0] = 1.0;
    for k in 1..9 {
        let kf = (k - 1) as f64;
        mom[k] = mom[k - 1] * (a + kf) / (a + b + kf);
    }
    let mut se = [0.0; 4];
    for k in 1..=4 {
        se[k - 1] = ((mom[2 * k] - mom[k] * mom[k]) / n as f64).sqrt();
    }
    se
}

pub fn moments(family: &FamilySpec, n: u64, seed: u64) -> PairAccumulator {
    accumulate(family, n, &RngState::from_seed(seed))
}

/// Largest |z| between the first four sample raw moments of each coordinate
/// and the analytic marginal moments.
pub fn marginal_moment_z(family: &FamilySpec, n: u64, seed: u64) -> f64 {
    let acc = moments(family, n, seed);
    let (rx, ry) = acc.raw_moments();
    let (p, q) = family.marginal_params();
    let mut worst: f64 = 0.0;
    for (raw, b) in [(rx, p), (ry, q)] {
        let want = beta_raw_moments(b.a, b.b);
        let se = beta_raw_moment_se(b.a, b.b, n);
        for k in 0..4 {
            worst = worst.max(((raw[k] - want[k]) / se[k]).abs());
        }
    }
    worst
}
