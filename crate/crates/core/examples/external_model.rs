//! A black-box model in a separate process. The example re-executes itself
//! with `--serve` to play the model: it reads `{"params": {...}}` from stdin
//! and answers `{"outputs": [...]}` with the coffee-cup temperatures.

use std::io::BufRead;
use std::time::Duration;

use corrgsa::dist::{CorrelationMatrix, JointGaussian, Marginal};
use corrgsa::models::{coffee_cup, uniform_grid, ExternalModel};
use corrgsa::sensitivity::{correlated_sweep, IndexKind, PceConfig, Provenance};

fn serve() {
    let mut line = String::new();
    std::io::stdin()
        .lock()
        .read_line(&mut line)
        .expect("request line");
    let request: serde_json::Value = serde_json::from_str(&line).expect("request JSON");
    let kappa = request["params"]["kappa"].as_f64().expect("kappa");
    let t_env = request["params"]["t_env"].as_f64().expect("t_env");
    let grid = uniform_grid(200.0, 150).unwrap();
    let outputs = coffee_cup(&grid, kappa, t_env, 95.0);
    println!("{}", serde_json::json!({ "outputs": outputs }));
}

fn main() -> corrgsa::Result<()> {
    if std::env::args().any(|a| a == "--serve") {
        serve();
        return Ok(());
    }
    let exe = std::env::current_exe().expect("own path");
    let names = vec!["kappa".to_string(), "t_env".to_string()];
    let model = ExternalModel::new(
        vec![exe.display().to_string(), "--serve".into()],
        names.clone(),
        uniform_grid(200.0, 150)?,
        Duration::from_secs(30),
        8,
    );
    let joint = JointGaussian::new(
        vec![Marginal::new(0.05, 0.008)?, Marginal::new(20.0, 1.5)?],
        CorrelationMatrix::bivariate(0.4)?,
    )?;
    let r = correlated_sweep(&model, &joint, 3, &PceConfig::default(), &names)?;
    for t in [15, 55, 150] {
        println!(
            "t index {t}: Full(kappa) {:.4}  Independent(t_env) {:.4}",
            r.value(t, 0, IndexKind::SobolFirst, Provenance::Full)
                .unwrap(),
            r.value(t, 1, IndexKind::SobolFirst, Provenance::Independent)
                .unwrap()
        );
    }
    Ok(())
}
