use corrgsa::campaign::{coffee_cup_config, Campaign};
use corrgsa::dist::{CorrelationMatrix, JointGaussian, Marginal};
use corrgsa::models::{LinearModel, ProductModel};
use corrgsa::sensitivity::{
    correlated_analysis, correlated_sweep, fit_permuted, moments, permuted_analysis,
    uncorrelated_analysis, IndexKind, PceConfig, Provenance,
};
use corrgsa::surrogate::{DerivativeSpace, Surrogate};
use corrgsa::transform::{circular_family, Permutation};

fn names(d: usize) -> Vec<String> {
    (1..=d).map(|i| format!("x{i}")).collect()
}

fn standard(corr: CorrelationMatrix) -> JointGaussian {
    JointGaussian::new(vec![Marginal::standard(); corr.dim()], corr).unwrap()
}

#[test]
fn coffee_surrogate_matches_model_at_means() {
    let c = Campaign::new(coffee_cup_config(None)).unwrap();
    let a = c.analyze(3).unwrap();
    let s = &a.surrogates[0].1;
    let at_mean = s.eval(&[0.0, 0.0]).unwrap();
    let model = c.model.evaluate(&[0.05, 20.0]).unwrap();
    for (u, y) in at_mean.iter().zip(&model) {
        assert!((u - y).abs() < 0.5);
    }
    let d = s.partial(0, &[0.0, 0.0]).unwrap();
    assert!(d[1..].iter().all(|v| *v < 0.0));
}

#[test]
fn moments_track_monte_carlo_scale() {
    let c = Campaign::new(coffee_cup_config(None)).unwrap();
    let s = &c.analyze(4).unwrap().surrogates[0].1;
    let m = moments(s);
    // ridge shrinkage of the intercept is O(lambda)
    assert!((m[0].0 - 95.0).abs() < 1e-5);
    assert!(m[0].1 < 1e-6);
    // at equilibrium the spread is the ambient one: Var ~ 1.5^2
    assert!((m[150].1 - 2.25).abs() < 0.01);
}

#[test]
fn sobol_bounds_hold_for_uncorrelated_runs() {
    let c = Campaign::new(coffee_cup_config(None)).unwrap();
    let r = c.analyze(3).unwrap().report;
    for p in 0..2 {
        let first = r.series(p, IndexKind::SobolFirst, Provenance::Uncorrelated);
        let total = r.series(p, IndexKind::SobolTotal, Provenance::Uncorrelated);
        for ((_, f), (_, t)) in first.iter().zip(&total) {
            assert!(-0.02 <= *f && f <= t && *t <= 1.02);
        }
    }
}

#[test]
fn additive_closure() {
    let model = LinearModel::new(vec![2.0, -1.0, 0.5], 1);
    let joint = standard(CorrelationMatrix::identity(3));
    let r = uncorrelated_analysis(&model, &joint, 2, &PceConfig::default(), &names(3))
        .unwrap()
        .report;
    let sum: f64 = (0..3)
        .map(|p| {
            r.value(0, p, IndexKind::SobolFirst, Provenance::Uncorrelated)
                .unwrap()
        })
        .sum();
    assert!((sum - 1.0).abs() < 0.01);
    let s1 = r
        .value(0, 0, IndexKind::SobolFirst, Provenance::Uncorrelated)
        .unwrap();
    assert!((s1 - 4.0 / 5.25).abs() < 1e-8);
}

#[test]
fn two_parameter_complement_for_additive_model() {
    // exact for an additive model whatever the correlation
    let model = LinearModel::new(vec![1.0, 3.0], 1);
    for rho in [-0.5, 0.3, 0.9] {
        let r = correlated_sweep(
            &model,
            &standard(CorrelationMatrix::bivariate(rho).unwrap()),
            3,
            &PceConfig::default(),
            &names(2),
        )
        .unwrap();
        for (full, indep) in [(0, 1), (1, 0)] {
            let f = r
                .value(0, full, IndexKind::SobolFirst, Provenance::Full)
                .unwrap();
            let i = r
                .value(0, indep, IndexKind::SobolFirst, Provenance::Independent)
                .unwrap();
            assert!(((1.0 - f) - i).abs() < 1e-8);
        }
    }
}

#[test]
fn three_parameter_sweep_labels() {
    let model = LinearModel::new(vec![1.0, 1.0, 1.0], 2);
    let corr = CorrelationMatrix::from_rows(&[
        vec![1.0, 0.5, 0.2],
        vec![0.5, 1.0, 0.1],
        vec![0.2, 0.1, 1.0],
    ])
    .unwrap();
    let r = correlated_sweep(&model, &standard(corr), 2, &PceConfig::default(), &names(3)).unwrap();
    for p in 0..3 {
        for prov in [
            Provenance::Full,
            Provenance::Marginal,
            Provenance::Independent,
        ] {
            let recs: Vec<_> = r
                .select(Some(p), Some(IndexKind::SobolFirst), Some(prov))
                .collect();
            assert_eq!(recs.len(), 2, "param {p} {prov:?}");
        }
        // full >= marginal >= independent for positively correlated sums
        let f = r
            .value(0, p, IndexKind::SobolFirst, Provenance::Full)
            .unwrap();
        let m = r
            .value(0, p, IndexKind::SobolFirst, Provenance::Marginal)
            .unwrap();
        let i = r
            .value(0, p, IndexKind::SobolFirst, Provenance::Independent)
            .unwrap();
        assert!(f >= m && m >= i, "{f} {m} {i}");
    }
    // Full of x1 from P1: Var(E[Y | x1]) / Var(Y) = (1 + 0.5 + 0.2)^2 / (3 + 2 * 0.8)
    let f1 = r
        .value(0, 0, IndexKind::SobolFirst, Provenance::Full)
        .unwrap();
    assert!((f1 - 1.7f64.powi(2) / 4.6).abs() < 1e-8);
}

#[test]
fn single_parameter_sweep() {
    let model = LinearModel::new(vec![2.0], 1);
    let joint = standard(CorrelationMatrix::identity(1));
    let r = correlated_sweep(&model, &joint, 2, &PceConfig::default(), &names(1)).unwrap();
    for prov in [Provenance::Full, Provenance::Independent] {
        assert!((r.value(0, 0, IndexKind::SobolFirst, prov).unwrap() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn sweeps_are_deterministic() {
    let c = Campaign::new(coffee_cup_config(Some(0.6))).unwrap();
    let a = c.analyze(3).unwrap().report.to_csv();
    let b = c.analyze(3).unwrap().report.to_csv();
    assert_eq!(a, b);
}

#[test]
fn surrogate_documents_round_trip_through_files() {
    let model = ProductModel::new(2.0, 3);
    let joint = standard(CorrelationMatrix::bivariate(0.3).unwrap());
    let perm = &circular_family(2)[1];
    let s = fit_permuted(&model, &joint, perm, 3, &PceConfig::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    std::fs::write(&path, s.to_json().unwrap()).unwrap();
    let back = Surrogate::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(
        back.eval(&[0.3, -1.2]).unwrap(),
        s.eval(&[0.3, -1.2]).unwrap()
    );
}

#[test]
fn custom_orderings() {
    let model = LinearModel::new(vec![1.0, 1.0], 1);
    let joint = standard(CorrelationMatrix::bivariate(0.4).unwrap());
    let perms = [Permutation::new(vec![1, 0], 7).unwrap()];
    let a = permuted_analysis(&model, &joint, &perms, 2, &PceConfig::default(), &names(2)).unwrap();
    let rec = a
        .report
        .select(Some(1), Some(IndexKind::SobolFirst), Some(Provenance::Full))
        .next()
        .unwrap();
    assert_eq!(rec.permutation_id, 7);
    assert!((rec.value - 0.7).abs() < 1e-8);
}

#[test]
fn derivative_space_switch() {
    let c = Campaign::new(coffee_cup_config(Some(0.4))).unwrap();
    let phys = correlated_analysis(
        c.model.as_ref(),
        &c.joint,
        3,
        &c.config.pce_config(),
        &c.names,
    )
    .unwrap();
    let cfg = PceConfig {
        derivative_space: DerivativeSpace::Standard,
        ..c.config.pce_config()
    };
    let std = correlated_analysis(c.model.as_ref(), &c.joint, 3, &cfg, &c.names).unwrap();
    let p = phys
        .report
        .value(100, 0, IndexKind::Derivative, Provenance::Full)
        .unwrap();
    let s = std
        .report
        .value(100, 0, IndexKind::Derivative, Provenance::Full)
        .unwrap();
    assert!((p * 0.008 - s).abs() < 1e-9 * s.abs().max(1.0));
}
