//! Orthonormal Hermite polynomials and the total-degree tensor basis.

use corrgsa::orthopoly::{build_basis, hermite_derivative, hermite_value};

fn main() -> corrgsa::Result<()> {
    println!("n   He_n(0.7)/sqrt(n!)   d/dx");
    for n in 0..6 {
        println!(
            "{n}   {:>18.12} {:>12.6}",
            hermite_value(n, 0.7),
            hermite_derivative(n, 0.7)
        );
    }

    let basis = build_basis(2, 3);
    let z = [0.4, -1.1];
    let row = basis.eval_row(&z)?;
    let d0 = basis.eval_partial(&z, 0)?;
    println!("\nD = 2, P = 3: {} terms at z = {z:?}", basis.len());
    for ((term, v), d) in basis.terms().iter().zip(&row).zip(&d0) {
        println!(
            "{:?}  psi = {v:>10.6}  dpsi/dz1 = {d:>10.6}",
            term.degrees()
        );
    }
    Ok(())
}
