//! Hammersley collocation nodes on the unit square and in normal space.

use corrgsa::sampling::{hammersley, to_standard_normal};

fn main() -> corrgsa::Result<()> {
    let u = hammersley(8, 3)?;
    let z = to_standard_normal(&u)?;
    println!(
        "{:>8} {:>8} {:>8}   {:>8} {:>8} {:>8}",
        "u1", "u2", "u3", "z1", "z2", "z3"
    );
    for i in 0..u.nrows() {
        let (a, b) = (u.row(i), z.row(i));
        println!(
            "{:>8.4} {:>8.4} {:>8.4}   {:>8.4} {:>8.4} {:>8.4}",
            a[0], a[1], a[2], b[0], b[1], b[2]
        );
    }

    let big = to_standard_normal(&hammersley(10_000, 2)?)?;
    for j in 0..2 {
        let col = big.column(j);
        let mean = col.iter().sum::<f64>() / col.len() as f64;
        let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / col.len() as f64;
        println!("column {j}: mean {mean:+.5}, std {:.5}", var.sqrt());
    }
    Ok(())
}
