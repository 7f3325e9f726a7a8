//! Full and Independent indices of the coffee cup with correlated inputs.

use corrgsa::campaign::{coffee_cup_config, Campaign};
use corrgsa::sensitivity::{IndexKind, Provenance};

fn main() -> corrgsa::Result<()> {
    let rho = std::env::args()
        .nth(1)
        .map_or(0.4, |s| s.parse().expect("rho"));
    let c = Campaign::new(coffee_cup_config(Some(rho)))?;
    let r = c.analyze(3)?.report;
    let grid = c.model.output_grid();
    let s = |t, p, prov| {
        r.value(t, p, IndexKind::SobolFirst, prov)
            .map_or("-".to_string(), |v| format!("{v:.4}"))
    };

    println!("rho = {rho}");
    println!(
        "{:>7} {:>11} {:>11} {:>11} {:>11}",
        "t_min", "Full(k)", "Indep(k)", "Full(Tenv)", "Indep(Tenv)"
    );
    for t in (0..grid.len()).step_by(10) {
        println!(
            "{:>7.1} {:>11} {:>11} {:>11} {:>11}",
            grid[t],
            s(t, 0, Provenance::Full),
            s(t, 0, Provenance::Independent),
            s(t, 1, Provenance::Full),
            s(t, 1, Provenance::Independent)
        );
    }
    Ok(())
}
