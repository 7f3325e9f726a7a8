//! Correlated against uncorrelated surrogates over the input square, and a
//! surrogate saved to and reloaded from JSON.

use corrgsa::campaign::{coffee_cup_config, nearest_index, Campaign};
use corrgsa::dist::JointGaussian;
use corrgsa::sensitivity::fit_permuted;
use corrgsa::surrogate::Surrogate;
use corrgsa::transform::Permutation;

fn main() -> corrgsa::Result<()> {
    let c = Campaign::new(coffee_cup_config(Some(0.8)))?;
    let cfg = c.config.pce_config();
    let perm = Permutation::identity(2);
    let independent = JointGaussian::independent(c.joint.marginals().to_vec());
    let correlated = fit_permuted(c.model.as_ref(), &c.joint, &perm, 3, &cfg)?;
    let uncorrelated = fit_permuted(c.model.as_ref(), &independent, &perm, 3, &cfg)?;

    let axis: Vec<f64> = (0..41).map(|k| -3.0 + 0.15 * k as f64).collect();
    for t in [5.0, 50.0, 150.0] {
        let ti = nearest_index(c.model.output_grid(), t);
        let mut max_diff = 0.0f64;
        for &z1 in &axis {
            for &z2 in &axis {
                let d = correlated.eval(&[z1, z2])?[ti] - uncorrelated.eval(&[z1, z2])?[ti];
                max_diff = max_diff.max(d.abs());
            }
        }
        println!("t = {t:>5} min: max |U_rho - U_0| = {max_diff:.3} C");
    }

    let text = correlated.to_json()?;
    let back = Surrogate::from_json(&text)?;
    println!(
        "JSON document: {} bytes, reloaded value at origin t=200: {:.6}",
        text.len(),
        back.eval(&[0.0, 0.0])?[150]
    );
    Ok(())
}
