use crate::error::{Error, Result};
use crate::surrogate::{DerivativeSpace, Surrogate};

/// Standard deviation, relative to `max(|mean|, 1)`, below which an output
/// is treated as constant. Ridge shrinkage leaks about `lambda` relative
/// noise into the coefficients of a constant output.
pub const ZERO_VARIANCE_RTOL: f64 = 1e-6;

/// `V = sum_{alpha != 0} a_alpha^2` for output `t`.
pub fn pce_variance(s: &Surrogate, t: usize) -> f64 {
    let c = s.coeffs();
    s.basis()
        .terms()
        .iter()
        .enumerate()
        .filter(|(_, m)| !m.is_zero())
        .map(|(j, _)| c[(t, j)] * c[(t, j)])
        .sum()
}

/// True when the variance at `t` is indistinguishable from round-off.
pub fn is_zero_variance(s: &Surrogate, t: usize) -> bool {
    let scale = ZERO_VARIANCE_RTOL * s.mean(t).abs().max(1.0);
    pce_variance(s, t) <= scale * scale
}

fn partial_variance(
    s: &Surrogate,
    t: usize,
    keep: impl Fn(&crate::orthopoly::MultiIndex) -> bool,
) -> Result<f64> {
    if is_zero_variance(s, t) {
        return Err(Error::ZeroVariance(t));
    }
    let c = s.coeffs();
    let part: f64 = s
        .basis()
        .terms()
        .iter()
        .enumerate()
        .filter(|(_, m)| keep(m))
        .map(|(j, _)| c[(t, j)] * c[(t, j)])
        .sum();
    Ok(part / pce_variance(s, t))
}

/// First-order Sobol index of coordinate `i` at output `t`.
pub fn sobol_first(s: &Surrogate, i: usize, t: usize) -> Result<f64> {
    check_index(s, i)?;
    partial_variance(s, t, |m| m.is_pure_in(i))
}

/// Total Sobol index of coordinate `i` at output `t`.
pub fn sobol_total(s: &Surrogate, i: usize, t: usize) -> Result<f64> {
    check_index(s, i)?;
    partial_variance(s, t, |m| m.involves(i))
}

/// `dU/dz_i` at `z0` for every output, optionally rescaled by `1/sigma`.
pub fn derivative_index(
    s: &Surrogate,
    i: usize,
    z0: &[f64],
    space: DerivativeSpace,
    sigma: f64,
) -> Result<Vec<f64>> {
    s.partial_in(i, z0, space, sigma)
}

fn check_index(s: &Surrogate, i: usize) -> Result<()> {
    if i >= s.dim() {
        return Err(Error::IndexOutOfRange {
            index: i,
            dim: s.dim(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orthopoly::build_basis;
    use crate::sampling::{hammersley, to_standard_normal};
    use crate::surrogate::fit;
    use nalgebra::DMatrix;

    fn surrogate(order: u32, f: impl Fn(&[f64]) -> f64) -> Surrogate {
        let basis = build_basis(2, order);
        let nodes = to_standard_normal(&hammersley(40, 2).unwrap()).unwrap();
        let y = DMatrix::from_fn(nodes.nrows(), 1, |r, _| f(&nodes.row(r)));
        fit(&basis, &nodes, &y, 0.0).unwrap()
    }

    #[test]
    fn variance_examples() {
        assert!(pce_variance(&surrogate(2, |_| 3.0), 0) < 1e-20);
        assert!((pce_variance(&surrogate(2, |z| z[0]), 0) - 1.0).abs() < 1e-10);
        assert!((pce_variance(&surrogate(2, |z| z[0] + z[1]), 0) - 2.0).abs() < 1e-10);
    }

    #[test]
    fn sobol_examples() {
        let s = surrogate(2, |z| z[0] + z[1]);
        assert!((sobol_first(&s, 0, 0).unwrap() - 0.5).abs() < 1e-10);
        assert!((sobol_total(&s, 0, 0).unwrap() - 0.5).abs() < 1e-10);
        for i in 0..2 {
            assert!(sobol_total(&s, i, 0).unwrap() - sobol_first(&s, i, 0).unwrap() < 1e-10);
        }

        let s = surrogate(2, |z| z[0]);
        assert!((sobol_first(&s, 0, 0).unwrap() - 1.0).abs() < 1e-10);
        assert!(sobol_first(&s, 1, 0).unwrap().abs() < 1e-10);

        // V = 2 with the z1*z2 term counted only in the totals
        let s = surrogate(2, |z| z[0] + z[0] * z[1]);
        assert!((pce_variance(&s, 0) - 2.0).abs() < 1e-10);
        assert!((sobol_first(&s, 0, 0).unwrap() - 0.5).abs() < 1e-10);
        assert!(sobol_first(&s, 1, 0).unwrap().abs() < 1e-10);
        assert!((sobol_total(&s, 0, 0).unwrap() - 1.0).abs() < 1e-10);
        assert!((sobol_total(&s, 1, 0).unwrap() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn zero_variance_is_an_error() {
        let s = surrogate(3, |_| 95.0);
        assert!(matches!(sobol_first(&s, 0, 0), Err(Error::ZeroVariance(0))));
        assert!(matches!(sobol_total(&s, 1, 0), Err(Error::ZeroVariance(0))));
        let s = surrogate(1, |z| z[0]);
        assert!(matches!(
            sobol_first(&s, 2, 0),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn derivative_examples() {
        let s = surrogate(2, |z| 3.0 * z[0]);
        for z0 in [[0.0, 0.0], [1.3, -0.4]] {
            let d = derivative_index(&s, 0, &z0, DerivativeSpace::Standard, 1.0).unwrap();
            assert!((d[0] - 3.0).abs() < 1e-9);
        }
        let s = surrogate(2, |z| z[0] * z[0]);
        let d = derivative_index(&s, 0, &[0.0, 0.0], DerivativeSpace::Standard, 1.0).unwrap();
        assert!(d[0].abs() < 1e-9);
        let s = surrogate(2, |z| 3.0 * z[0]);
        let d = derivative_index(&s, 0, &[0.0, 0.0], DerivativeSpace::Physical, 0.5).unwrap();
        assert!((d[0] - 6.0).abs() < 1e-9);
    }
}
