//! How Full and Independent indices move as the correlation grows. The
//! permutation sweep runs at every rho, including zero.

use corrgsa::campaign::{coffee_cup_config, effective_rho, Campaign};
use corrgsa::sensitivity::{correlated_sweep, IndexKind, Provenance};

fn main() -> corrgsa::Result<()> {
    println!(
        "{:>12} {:>14} {:>14} {:>14}",
        "rho", "Full(k) 200", "Indep(Tenv) 200", "Indep(Tenv) 30"
    );
    for k in 0..=5 {
        let rho = effective_rho(k as f64 * 0.2);
        let c = Campaign::new(coffee_cup_config(Some(rho)))?;
        let r = correlated_sweep(
            c.model.as_ref(),
            &c.joint,
            3,
            &c.config.pce_config(),
            &c.names,
        )?;
        let at = |t, p, prov| r.value(t, p, IndexKind::SobolFirst, prov).unwrap();
        println!(
            "{rho:>12.10} {:>14.6} {:>14.6} {:>14.6}",
            at(150, 0, Provenance::Full),
            at(150, 1, Provenance::Independent),
            at(22, 1, Provenance::Independent)
        );
    }
    Ok(())
}
