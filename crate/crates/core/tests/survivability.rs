use bivbeta::survivability::{
    survivability, MonteCarlo, Propensities, SurvivabilityReport, SurvivabilityScenario, System,
};
use bivbeta::{BetaParams, FamilySpec, RngState};

fn beta(a: f64, b: f64) -> BetaParams {
    BetaParams::new(a, b).unwrap()
}

fn run(p: &Propensities, system: System) -> SurvivabilityReport {
    let mc = MonteCarlo {
        n_samples: 1_000_000,
        rng: RngState::from_seed(61),
    };
    let s = SurvivabilityScenario {
        propensities: p.clone(),
        system,
    };
    survivability(&s, Some(&mc)).unwrap()
}

#[test]
fn uniform_examples() {
    let ex = Propensities::Exchangeable(beta(1.0, 1.0));
    let hi = Propensities::HierIndependent(beta(1.0, 1.0), beta(1.0, 1.0));
    assert!((run(&ex, System::Series).system_survivability - 1.0 / 3.0).abs() < 1e-15);
    assert!((run(&hi, System::Series).system_survivability - 0.25).abs() < 1e-15);
    assert!((run(&ex, System::Parallel).system_survivability - 2.0 / 3.0).abs() < 1e-15);
}

#[test]
fn series_below_components_below_parallel() {
    let scenarios = [
        Propensities::Exchangeable(beta(3.0, 0.3)),
        Propensities::HierIndependent(beta(10.1, 1.0), beta(1.0, 0.1)),
        Propensities::Interdependent(FamilySpec::ol_plus(&[3.0, 3.0, 1.0]).unwrap()),
        Propensities::Interdependent(FamilySpec::ol_minus(&[10.0, 2.5, 5.0]).unwrap()),
        Propensities::Interdependent(FamilySpec::an5(&[10.0, 10.0, 0.1, 0.1, 1.0]).unwrap()),
    ];
    for p in &scenarios {
        let s = run(p, System::Series);
        let par = run(p, System::Parallel);
        let (e1, e2) = s.component_survivability;
        assert!(s.system_survivability <= e1.min(e2), "{p:?}");
        assert!(e1.max(e2) <= par.system_survivability, "{p:?}");
    }
}

#[test]
fn series_increases_with_correlation() {
    // B(2, 2) marginals throughout
    let cases = [
        Propensities::Interdependent(FamilySpec::ol_minus(&[2.0, 2.0, 2.0]).unwrap()),
        Propensities::HierIndependent(beta(2.0, 2.0), beta(2.0, 2.0)),
        Propensities::Interdependent(FamilySpec::ol_plus(&[2.0, 2.0, 2.0]).unwrap()),
        Propensities::Exchangeable(beta(2.0, 2.0)),
    ];
    let reports: Vec<SurvivabilityReport> = cases.iter().map(|p| run(p, System::Series)).collect();
    for r in &reports {
        assert!((r.component_survivability.0 - 0.5).abs() < 1e-12);
        assert!((r.component_survivability.1 - 0.5).abs() < 1e-12);
    }
    let rho = |r: &SurvivabilityReport, p: &Propensities| match p {
        Propensities::Exchangeable(_) => 1.0,
        _ => r.correlation,
    };
    for w in 0..reports.len() - 1 {
        let (a, b) = (&reports[w], &reports[w + 1]);
        assert!(rho(a, &cases[w]) < rho(b, &cases[w + 1]));
        assert!(
            a.system_survivability < b.system_survivability,
            "{:?} vs {:?}",
            cases[w],
            cases[w + 1]
        );
    }
}

#[test]
fn correlation_route_matches_direct_product() {
    for f in [
        FamilySpec::ol_plus(&[3.0, 3.0, 0.3]).unwrap(),
        FamilySpec::an5(&[5.0, 10.0, 0.1, 0.1, 0.5]).unwrap(),
        FamilySpec::ol_minus(&[10.0, 2.5, 5.0]).unwrap(),
    ] {
        let r = run(&Propensities::Interdependent(f.clone()), System::Series);
        let direct = r.direct_product_mean.unwrap();
        // θ₁θ₂ lies in [0, 1], so its variance is at most μ(1 − μ)
        let se = (direct * (1.0 - direct) / 1e6).sqrt();
        assert!(
            (r.system_survivability - direct).abs() <= 4.0 * se,
            "{f:?}: {} vs {direct} (se {se})",
            r.system_survivability
        );
    }
}
