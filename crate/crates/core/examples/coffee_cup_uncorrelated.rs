//! Sobol and derivative indices of the cooling coffee cup with independent
//! inputs.

use corrgsa::campaign::{coffee_cup_config, Campaign};
use corrgsa::sensitivity::{IndexKind, Provenance};

fn main() -> corrgsa::Result<()> {
    let c = Campaign::new(coffee_cup_config(None))?;
    let r = c.analyze(4)?.report;
    let grid = c.model.output_grid();
    let get = |t, p, kind| r.value(t, p, kind, Provenance::Uncorrelated);

    println!(
        "{:>7} {:>9} {:>9} {:>12} {:>10}",
        "t_min", "S_kappa", "S_Tenv", "dT/dkappa", "dT/dTenv"
    );
    for t in (0..grid.len()).step_by(10) {
        let s = |p| get(t, p, IndexKind::SobolFirst).map_or("-".to_string(), |v| format!("{v:.4}"));
        println!(
            "{:>7.1} {:>9} {:>9} {:>12.2} {:>10.4}",
            grid[t],
            s(0),
            s(1),
            get(t, 0, IndexKind::Derivative).unwrap(),
            get(t, 1, IndexKind::Derivative).unwrap()
        );
    }
    Ok(())
}
