//! Polynomial order against the Saltelli Monte-Carlo reference.

use corrgsa::campaign::{coffee_cup_config, Campaign};
use corrgsa::sampling::QmcScheme;
use corrgsa::sensitivity::{
    max_abs_difference, qmc_sobol, IndexKind, Provenance, SensitivityReport,
};

fn worst(a: &SensitivityReport, b: &SensitivityReport) -> f64 {
    let mut m = 0.0f64;
    for p in 0..2 {
        for kind in [IndexKind::SobolFirst, IndexKind::SobolTotal] {
            for prov in [Provenance::Full, Provenance::Independent] {
                m = m.max(max_abs_difference(a, b, kind, p, prov).unwrap_or(0.0));
            }
        }
    }
    m
}

fn main() -> corrgsa::Result<()> {
    let c = Campaign::new(coffee_cup_config(Some(0.417)))?;
    let mut qcfg = c.config.qmc_config();
    let reference = qmc_sobol(c.model.as_ref(), &c.joint, &qcfg, &c.names)?;

    for order in 2..=7 {
        let r = c.analyze(order)?.report;
        println!(
            "P = {order}: max |S_PCE - S_QMC| = {:.4}",
            worst(&r, &reference)
        );
    }

    for scheme in [QmcScheme::Halton, QmcScheme::Random] {
        qcfg.scheme = scheme;
        qcfg.seed = 0;
        let a = qmc_sobol(c.model.as_ref(), &c.joint, &qcfg, &c.names)?;
        qcfg.seed = 1;
        let b = qmc_sobol(c.model.as_ref(), &c.joint, &qcfg, &c.names)?;
        println!("{scheme:?}: seeds 0 vs 1 differ by {:.4}", worst(&a, &b));
    }
    Ok(())
}
