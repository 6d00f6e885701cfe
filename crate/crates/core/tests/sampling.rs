mod common;

use bivbeta::sampling::{sample_pairs, GammaSampler};
use bivbeta::{estimate_moments, gamma_sample, FamilySpec, RngState};
use rand::Rng;

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, v)
}

#[test]
fn gamma_shape_one_mean() {
    let mut rng = RngState::from_seed(11);
    let xs: Vec<f64> = (0..1_000_000)
        .map(|_| gamma_sample(&mut rng, 1.0).unwrap())
        .collect();
    let (m, _) = mean_var(&xs);
    assert!((m - 1.0).abs() <= 0.005, "mean {m}");
}

#[test]
fn gamma_shape_five_variance() {
    let mut rng = RngState::from_seed(12);
    let xs: Vec<f64> = (0..1_000_000)
        .map(|_| gamma_sample(&mut rng, 5.0).unwrap())
        .collect();
    let (m, v) = mean_var(&xs);
    assert!((m - 5.0).abs() <= 0.02, "mean {m}");
    assert!((v - 5.0).abs() <= 0.05, "variance {v}");
}

/// Log of a Gamma(a, 1) draw, a < 1, by the Ahrens–Dieter GS rejection
/// algorithm carried out in log space.
fn ahrens_dieter_ln<R: Rng>(a: f64, rng: &mut R) -> f64 {
    let b = 1.0 + a / std::f64::consts::E;
    loop {
        let p = b * rng.random::<f64>();
        let u: f64 = rng.random();
        if p <= 1.0 {
            let ln_x = p.ln() / a;
            if u <= (-ln_x.exp()).exp() {
                return ln_x;
            }
        } else {
            let x = -((b - p) / a).ln();
            if u.ln() <= (a - 1.0) * x.ln() {
                return x.ln();
            }
        }
    }
}

#[test]
fn tiny_shape_matches_rejection_oracle() {
    let a = 1e-4;
    let n = 200_000;
    let sampler = GammaSampler::new(a).unwrap();
    let mut rng = RngState::from_seed(13);
    let lib: Vec<f64> = (0..n).map(|_| sampler.sample_ln(&mut rng)).collect();
    let mut rng = RngState::from_seed(14);
    let oracle: Vec<f64> = (0..n).map(|_| ahrens_dieter_ln(a, &mut rng)).collect();
    let (m1, v1) = mean_var(&lib);
    let (m2, v2) = mean_var(&oracle);
    let se = (v1 / n as f64 + v2 / n as f64).sqrt();
    assert!((m1 - m2).abs() <= 3.0 * se, "E ln X: {m1} vs {m2}, se {se}");
    // E ln X = ψ(a) = ψ(1 + a) − 1/a
    let digamma = -0.577_215_664_901_532_9 + std::f64::consts::PI.powi(2) / 6.0 * a - 1.0 / a;
    assert!(
        (m1 - digamma).abs() <= 4.0 * (v1 / n as f64).sqrt(),
        "{m1} vs {digamma}"
    );
}

#[test]
fn uniform_ol_plus_mean() {
    let f = FamilySpec::ol_plus(&[1.0, 1.0, 1.0]).unwrap();
    let e = estimate_moments(&f, 1_000_000, &RngState::from_seed(21)).unwrap();
    assert!((e.mean_x - 0.5).abs() <= 0.002, "{}", e.mean_x);
    assert!((e.mean_y - 0.5).abs() <= 0.002, "{}", e.mean_y);
}

#[test]
fn an5_means() {
    let f = FamilySpec::an5(&[5.0, 5.0, 5.0, 5.0, 1e-4]).unwrap();
    let e = estimate_moments(&f, 1_000_000, &RngState::from_seed(22)).unwrap();
    assert!((e.mean_x - 0.667).abs() <= 0.003, "{}", e.mean_x);
    assert!((e.mean_y - 0.667).abs() <= 0.003, "{}", e.mean_y);
}

#[test]
fn ol_minus_marginal_moments() {
    let f = FamilySpec::ol_minus(&[10.0, 2.5, 5.0]).unwrap();
    let z = common::marginal_moment_z(&f, 1_000_000, 23);
    assert!(z <= 4.0, "max |z| = {z}");
}

#[test]
fn same_seed_same_pairs() {
    let f = FamilySpec::an8(&[1.0, 2.0, 3.0, 1.5, 0.5, 2.0, 1.0, 0.7]).unwrap();
    let a = sample_pairs(&f, 10_000, &RngState::from_seed(5));
    let b = sample_pairs(&f, 10_000, &RngState::from_seed(5));
    let c = sample_pairs(&f, 10_000, &RngState::from_seed(6));
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn thread_count_does_not_change_results() {
    let f = FamilySpec::ol_minus(&[10.0, 2.5, 5.0]).unwrap();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                let pairs = sample_pairs(&f, 50_000, &RngState::from_seed(9));
                let est = estimate_moments(&f, 50_000, &RngState::from_seed(9)).unwrap();
                (pairs, est)
            })
    };
    let (p1, e1) = run(1);
    let (p4, e4) = run(4);
    assert_eq!(p1, p4);
    assert_eq!(e1, e4);
}

#[test]
fn correlation_signs() {
    let rng = RngState::from_seed(31);
    let sign = |f: FamilySpec| estimate_moments(&f, 200_000, &rng).unwrap().correlation;
    assert!(sign(FamilySpec::ol_plus(&[3.0, 3.0, 1.0]).unwrap()) > 0.0);
    assert!(sign(FamilySpec::ol_minus(&[10.0, 2.5, 5.0]).unwrap()) < 0.0);
    assert!(sign(FamilySpec::ol_star(&[3.0, 3.0, 1.0]).unwrap()) > 0.0);
    assert!(sign(FamilySpec::an5(&[5.0, 5.0, 5.0, 5.0, 1e-4]).unwrap()) < 0.0);
    assert!(sign(FamilySpec::an5(&[10.0, 10.0, 0.1, 0.1, 10.0]).unwrap()) > 0.0);
}
