use bivbeta::density::density_grid;
use bivbeta::inference::{
    default_pi_star, joint_posterior, joint_posterior_with_samples, log_likelihood,
    marginal_posterior, posterior_summary, predictive_propensity, predictive_values, Coord,
    DiagnosticData, PriorSpec,
};
use bivbeta::synth::{generate, SynthConfig};
use bivbeta::{beta_pdf, BetaParams, FamilySpec, RngState};
use proptest::prelude::*;

fn beta(a: f64, b: f64) -> BetaParams {
    BetaParams::new(a, b).unwrap()
}

fn priors() -> Vec<PriorSpec> {
    let pi = beta(1.0, 1.0);
    vec![
        PriorSpec {
            eta_theta: FamilySpec::independent(beta(10.0, 5.0), beta(5.0, 2.5)).unwrap(),
            pi,
        },
        PriorSpec {
            eta_theta: FamilySpec::ol_minus(&[10.0, 2.5, 5.0]).unwrap(),
            pi,
        },
        PriorSpec {
            eta_theta: FamilySpec::an5(&[5.0, 5.0, 5.0, 5.0, 1e-4]).unwrap(),
            pi,
        },
    ]
}

fn binomial_pmf(k: u64, n: u64, p: f64) -> f64 {
    let mut c = 1.0;
    for i in 0..k {
        c *= (n - i) as f64 / (i + 1) as f64;
    }
    c * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)
}

#[test]
fn likelihood_examples() {
    let d = DiagnosticData::new(1, 1, 1, 0).unwrap();
    assert!((log_likelihood(0.5, 0.5, 0.5, &d).unwrap() - 0.25f64.ln()).abs() < 1e-15);
    let d = DiagnosticData::new(2, 1, 1, 1).unwrap();
    assert!((log_likelihood(0.5, 0.5, 0.5, &d).unwrap() - 0.125f64.ln()).abs() < 1e-15);
}

#[test]
fn likelihood_matches_pmf_product() {
    let d = DiagnosticData::new(100, 35, 27, 39).unwrap();
    let (pi, eta, theta) = (0.35, 0.773, 0.599);
    let direct =
        (binomial_pmf(35, 100, pi) * binomial_pmf(27, 35, eta) * binomial_pmf(39, 65, theta)).ln();
    let got = log_likelihood(pi, eta, theta, &d).unwrap();
    assert!((got - direct).abs() <= 1e-10, "{got} vs {direct}");
    assert!((got + 6.621_085_909_325_565).abs() <= 1e-10, "{got}");
}

#[test]
fn no_data_recovers_prior() {
    let d = DiagnosticData::new(0, 0, 0, 0).unwrap();
    let rng = RngState::from_seed(4);
    let m = 50;
    for prior in priors() {
        let gp = joint_posterior_with_samples(&d, &prior, m, 1_000_000, &rng).unwrap();
        let g = density_grid(&prior.eta_theta, m, 1_000_000, &rng).unwrap();
        let total: f64 = g.cells.iter().sum();
        for (k, (&w, &c)) in gp.weights.iter().zip(&g.cells).enumerate() {
            let want = c / total;
            assert!(
                (w - want).abs() <= 1e-9 * want,
                "{:?} cell {k}: {w} vs {want}",
                prior.eta_theta
            );
        }
    }
}

#[test]
fn no_data_marginals_are_prior_marginals() {
    let d = DiagnosticData::new(0, 0, 0, 0).unwrap();
    let prior = &priors()[0];
    let m = 100;
    let gp = joint_posterior(&d, prior, m, &RngState::from_seed(0)).unwrap();
    for (coord, p) in [
        (Coord::Eta, beta(10.0, 5.0)),
        (Coord::Theta, beta(5.0, 2.5)),
    ] {
        let marg = marginal_posterior(&gp, coord);
        let dens: Vec<f64> = gp
            .eta_axis
            .iter()
            .map(|&x| beta_pdf(x, p).unwrap())
            .collect();
        let total: f64 = dens.iter().sum();
        for (k, (&w, &f)) in marg.iter().zip(&dens).enumerate() {
            let want = f / total;
            assert!(
                (w - want).abs() <= 1e-9 * want.max(1e-300),
                "{coord:?} cell {k}: {w} vs {want}"
            );
        }
    }
}

#[test]
fn an5_prior_correlation() {
    let d = DiagnosticData::new(0, 0, 0, 0).unwrap();
    let gp = joint_posterior(&d, &priors()[2], 100, &RngState::from_seed(7)).unwrap();
    let r = posterior_summary(&gp).correlation;
    assert!((r + 0.65).abs() <= 0.03, "{r}");
}

#[test]
fn replicate_average_posterior_means_near_truth() {
    let reps = 20;
    for prior in priors() {
        let (mut me, mut mt) = (0.0, 0.0);
        for seed in 0..reps {
            let d = generate(&SynthConfig::reference(100, seed)).unwrap();
            let s = posterior_summary(
                &joint_posterior(&d, &prior, 100, &RngState::from_seed(8)).unwrap(),
            );
            me += s.mean_eta / reps as f64;
            mt += s.mean_theta / reps as f64;
        }
        assert!(
            (me - 0.773).abs() <= 0.08,
            "{:?}: eta {me}",
            prior.eta_theta
        );
        assert!(
            (mt - 0.599).abs() <= 0.08,
            "{:?}: theta {mt}",
            prior.eta_theta
        );
    }
}

#[test]
fn propensities_track_predictive_values() {
    let (lambda, psi) = predictive_values(0.35, 0.773, 0.599).unwrap();
    assert!(
        (lambda - 0.509_318_524_096_385_5).abs() <= 1e-12,
        "{lambda}"
    );
    assert!((psi - 0.830_524_744_027_303_8).abs() <= 1e-12, "{psi}");
    let d = generate(&SynthConfig::reference(100, 17)).unwrap();
    let gp = joint_posterior(&d, &priors()[0], 100, &RngState::from_seed(0)).unwrap();
    let (a, c) = predictive_propensity(&gp, default_pi_star(&gp)).unwrap();
    assert!((a - lambda).abs() <= 0.05, "{a} vs {lambda}");
    assert!((c - psi).abs() <= 0.05, "{c} vs {psi}");
}

fn data() -> impl Strategy<Value = DiagnosticData> {
    (0u64..200)
        .prop_flat_map(|n| (Just(n), 0..=n))
        .prop_flat_map(|(n, n1)| (Just(n), Just(n1), 0..=n1, 0..=n - n1))
        .prop_map(|(n, n1, k1, k2)| DiagnosticData::new(n, n1, k1, k2).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn posterior_weights_sum_to_one(d in data()) {
        let prior = &priors()[0];
        let gp = joint_posterior(&d, prior, 20, &RngState::from_seed(0)).unwrap();
        let total: f64 = gp.weights.iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-12, "{total}");
        prop_assert!(gp.weights.iter().all(|&w| w >= 0.0));
    }
}
