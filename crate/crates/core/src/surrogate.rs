//! Polynomial chaos surrogate fitted by point collocation.
//!
//! One surrogate holds every output component (time step) of a model: the
//! design matrix is shared and each output gets its own coefficient row.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orthopoly::{MultiIndex, MultiIndexBasis};
use crate::sampling::{SampleMatrix, SampleSpace};

/// Ridge parameter used when a campaign does not set one.
pub const DEFAULT_LAMBDA: f64 = 1e-8;

/// Coordinates a derivative is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeSpace {
    /// Per unit of the physical parameter (divided by its sigma).
    #[default]
    Physical,
    /// Per unit of the standard-normal coordinate.
    Standard,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Surrogate {
    basis: MultiIndexBasis,
    /// `T x N`, one row per output component.
    coeffs: DMatrix<f64>,
    lambda: f64,
    node_count: usize,
    residual_rms: Vec<f64>,
}

/// Solves `min ||Phi a - Y||^2 + lambda ||a||^2` for every column of `Y`
/// through a QR factorization of `[Phi; sqrt(lambda) I]`. Returns `N x T`.
fn solve_ridge_qr(phi: &DMatrix<f64>, y: &DMatrix<f64>, lambda: f64) -> Result<DMatrix<f64>> {
    let (n, terms) = phi.shape();
    let t = y.ncols();
    let mut a = DMatrix::zeros(n + terms, terms);
    a.view_mut((0, 0), (n, terms)).copy_from(phi);
    let mut b = DMatrix::zeros(n + terms, t);
    b.view_mut((0, 0), (n, t)).copy_from(y);
    let s = lambda.sqrt();
    for k in 0..terms {
        a[(n + k, k)] = s;
    }
    let qr = a.qr();
    let rhs = qr.q().transpose() * b;
    qr.r()
        .solve_upper_triangular(&rhs)
        .ok_or(Error::Underdetermined { nodes: n, terms })
}

/// Normal-equation route `(Phi^T Phi + lambda I) a = Phi^T Y` with a
/// Cholesky solve. Kept public as an independent check of [`fit`].
pub fn solve_normal_equations(
    phi: &DMatrix<f64>,
    y: &DMatrix<f64>,
    lambda: f64,
) -> Result<DMatrix<f64>> {
    let (n, terms) = phi.shape();
    let mut gram = phi.transpose() * phi;
    for k in 0..terms {
        gram[(k, k)] += lambda;
    }
    let chol = gram
        .cholesky()
        .ok_or(Error::Underdetermined { nodes: n, terms })?;
    Ok(chol.solve(&(phi.transpose() * y)))
}

/// Fits a surrogate: `nodes` are the independent standard-normal collocation
/// points and row `j` of `outputs` is the model response for node `j`.
///
/// For correlated inputs the model is evaluated at the transformed nodes
/// while the fit still uses the untransformed ones.
pub fn fit(
    basis: &MultiIndexBasis,
    nodes: &SampleMatrix,
    outputs: &DMatrix<f64>,
    lambda: f64,
) -> Result<Surrogate> {
    nodes.expect_space(SampleSpace::StandardNormal)?;
    if outputs.nrows() != nodes.nrows() {
        return Err(Error::DimensionMismatch {
            expected: nodes.nrows(),
            found: outputs.nrows(),
        });
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::config(
            "lambda",
            format!("must be a finite non-negative number, got {lambda}"),
        ));
    }
    if nodes.nrows() < basis.len() && lambda == 0.0 {
        return Err(Error::Underdetermined {
            nodes: nodes.nrows(),
            terms: basis.len(),
        });
    }
    for (idx, v) in outputs.iter().enumerate() {
        if !v.is_finite() {
            // column-major storage
            return Err(Error::NonFiniteOutput {
                sample: idx % outputs.nrows(),
                output: idx / outputs.nrows(),
            });
        }
    }
    let phi = basis.design_matrix(nodes)?;
    let a = solve_ridge_qr(&phi, outputs, lambda)?;
    let residual = &phi * &a - outputs;
    let n = outputs.nrows() as f64;
    let residual_rms = residual
        .column_iter()
        .map(|c| (c.norm_squared() / n).sqrt())
        .collect();
    Ok(Surrogate {
        basis: basis.clone(),
        coeffs: a.transpose(),
        lambda,
        node_count: nodes.nrows(),
        residual_rms,
    })
}

impl Surrogate {
    pub fn basis(&self) -> &MultiIndexBasis {
        &self.basis
    }

    pub fn coeffs(&self) -> &DMatrix<f64> {
        &self.coeffs
    }

    /// Coefficients of output `t`, in basis order.
    pub fn coeff_row(&self, t: usize) -> Vec<f64> {
        self.coeffs.row(t).iter().copied().collect()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn residual_rms(&self) -> &[f64] {
        &self.residual_rms
    }

    pub fn output_len(&self) -> usize {
        self.coeffs.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn eval(&self, z: &[f64]) -> Result<Vec<f64>> {
        let row = self.basis.eval_row(z)?;
        Ok(self.dot_rows(&row))
    }

    /// `dU/dz_i` at `z`, in standard-normal coordinates.
    pub fn partial(&self, i: usize, z: &[f64]) -> Result<Vec<f64>> {
        let row = self.basis.eval_partial(z, i)?;
        Ok(self.dot_rows(&row))
    }

    /// Derivative in the requested space; `sigma` is the standard deviation
    /// of the physical parameter behind coordinate `i`.
    pub fn partial_in(
        &self,
        i: usize,
        z: &[f64],
        space: DerivativeSpace,
        sigma: f64,
    ) -> Result<Vec<f64>> {
        let mut d = self.partial(i, z)?;
        if space == DerivativeSpace::Physical {
            d.iter_mut().for_each(|v| *v /= sigma);
        }
        Ok(d)
    }

    fn dot_rows(&self, row: &[f64]) -> Vec<f64> {
        self.coeffs
            .row_iter()
            .map(|c| c.iter().zip(row).map(|(a, p)| a * p).sum())
            .collect()
    }

    /// Surrogate mean of output `t` (the zero-index coefficient).
    pub fn mean(&self, t: usize) -> f64 {
        self.coeffs[(t, 0)]
    }

    pub fn to_document(&self) -> SurrogateDocument {
        SurrogateDocument {
            dim: self.basis.dim(),
            order: self.basis.order(),
            term_list: self.basis.terms().iter().map(|t| t.0.clone()).collect(),
            lambda: self.lambda,
            coeffs: self
                .coeffs
                .row_iter()
                .map(|r| r.iter().copied().collect())
                .collect(),
            node_count: Some(self.node_count),
            residual_rms: Some(self.residual_rms.clone()),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SurrogateDocument = serde_json::from_str(text)?;
        Self::from_document(doc)
    }

    pub fn from_document(doc: SurrogateDocument) -> Result<Self> {
        let terms = doc.term_list.into_iter().map(MultiIndex).collect();
        let basis = MultiIndexBasis::from_terms(doc.dim, doc.order, terms)?;
        let t = doc.coeffs.len();
        for row in &doc.coeffs {
            if row.len() != basis.len() {
                return Err(Error::DimensionMismatch {
                    expected: basis.len(),
                    found: row.len(),
                });
            }
        }
        let coeffs = DMatrix::from_fn(t, basis.len(), |r, c| doc.coeffs[r][c]);
        Ok(Self {
            basis,
            coeffs,
            lambda: doc.lambda,
            node_count: doc.node_count.unwrap_or(0),
            residual_rms: doc.residual_rms.unwrap_or_else(|| vec![0.0; t]),
        })
    }
}

/// On-disk form of a [`Surrogate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurrogateDocument {
    pub dim: usize,
    pub order: u32,
    pub term_list: Vec<Vec<u32>>,
    pub lambda: f64,
    pub coeffs: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual_rms: Option<Vec<f64>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orthopoly::build_basis;
    use crate::sampling::{hammersley, normal_matrix, to_standard_normal};

    fn nodes(n: usize, d: usize) -> SampleMatrix {
        to_standard_normal(&hammersley(n, d).unwrap()).unwrap()
    }

    fn outputs_from(nodes: &SampleMatrix, f: impl Fn(&[f64]) -> Vec<f64>) -> DMatrix<f64> {
        let rows: Vec<Vec<f64>> = (0..nodes.nrows()).map(|i| f(&nodes.row(i))).collect();
        DMatrix::from_fn(rows.len(), rows[0].len(), |r, c| rows[r][c])
    }

    fn index_of(b: &MultiIndexBasis, degrees: &[u32]) -> usize {
        b.terms().iter().position(|t| t.0 == degrees).unwrap()
    }

    #[test]
    fn constant_fit() {
        let b = build_basis(2, 3);
        let z = nodes(20, 2);
        let s = fit(&b, &z, &outputs_from(&z, |_| vec![4.5]), 0.0).unwrap();
        let c = s.coeff_row(0);
        assert!((c[0] - 4.5).abs() < 1e-10);
        assert!(c[1..].iter().all(|v| v.abs() < 1e-10));
        assert!((s.eval(&[0.3, -2.0]).unwrap()[0] - 4.5).abs() < 1e-10);
        assert!(s.partial(0, &[0.3, -2.0]).unwrap()[0].abs() < 1e-10);
    }

    #[test]
    fn passthrough_fit() {
        let b = build_basis(2, 2);
        let z = nodes(12, 2);
        let s = fit(&b, &z, &outputs_from(&z, |q| vec![q[0]]), 0.0).unwrap();
        let c = s.coeff_row(0);
        for (j, v) in c.iter().enumerate() {
            let expected = if j == index_of(&b, &[1, 0]) { 1.0 } else { 0.0 };
            assert!((v - expected).abs() < 1e-10);
        }
        assert!((s.eval(&[1.7, 0.0]).unwrap()[0] - 1.7).abs() < 1e-10);
        assert!((s.partial(0, &[0.4, 2.2]).unwrap()[0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn product_fit() {
        let b = build_basis(2, 2);
        let z = nodes(12, 2);
        let s = fit(&b, &z, &outputs_from(&z, |q| vec![q[0] * q[1]]), 0.0).unwrap();
        let c = s.coeff_row(0);
        assert!((c[index_of(&b, &[1, 1])] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn exact_polynomials_recovered() {
        // 0.5 + 2 psi_(2,1) - psi_(0,3) written out in z
        let f = |q: &[f64]| {
            let p21 = (q[0] * q[0] - 1.0) / 2f64.sqrt() * q[1];
            let p03 = (q[1].powi(3) - 3.0 * q[1]) / 6f64.sqrt();
            vec![0.5 + 2.0 * p21 - p03, q[0] - q[1]]
        };
        let b = build_basis(2, 3);
        let z = nodes(20, 2);
        let s = fit(&b, &z, &outputs_from(&z, f), 0.0).unwrap();
        assert_eq!(s.output_len(), 2);
        let c = s.coeff_row(0);
        assert!((c[0] - 0.5).abs() < 1e-8);
        assert!((c[index_of(&b, &[2, 1])] - 2.0).abs() < 1e-8);
        assert!((c[index_of(&b, &[0, 3])] + 1.0).abs() < 1e-8);
        assert!(s.residual_rms().iter().all(|r| *r < 1e-8));
    }

    #[test]
    fn qr_matches_normal_equations() {
        let b = build_basis(2, 5);
        let z = nodes(2 * b.len(), 2);
        let y = outputs_from(&z, |q| {
            vec![(0.3 * q[0]).exp() * (1.0 + q[1]).sin(), q[0] * q[1].powi(2)]
        });
        let phi = b.design_matrix(&z).unwrap();
        for lambda in [0.0, 1e-8, 1e-3, 1.0] {
            let qr = solve_ridge_qr(&phi, &y, lambda).unwrap();
            let ne = solve_normal_equations(&phi, &y, lambda).unwrap();
            assert!((qr - ne).abs().max() < 1e-8, "lambda {lambda}");
        }
    }

    #[test]
    fn shrinkage_never_grows_norm() {
        let b = build_basis(2, 3);
        let z = nodes(20, 2);
        let y = outputs_from(&z, |q| vec![(q[0] + 0.5 * q[1]).tanh() * 3.0, q[0].powi(4)]);
        let mut prev: Option<Vec<f64>> = None;
        for k in 0..=20 {
            let lambda = if k == 0 {
                0.0
            } else {
                10f64.powf(-6.0 + 0.3 * k as f64).min(1.0)
            };
            let s = fit(&b, &z, &y, lambda).unwrap();
            let norms: Vec<f64> = s.coeffs().row_iter().map(|r| r.norm()).collect();
            if let Some(p) = &prev {
                for (a, b) in norms.iter().zip(p) {
                    assert!(*a <= b + 1e-12);
                }
            }
            prev = Some(norms);
        }
    }

    #[test]
    fn partial_matches_finite_differences_of_eval() {
        let b = build_basis(2, 4);
        let z = nodes(30, 2);
        let s = fit(
            &b,
            &z,
            &outputs_from(&z, |q| vec![(0.4 * q[0] - 0.2 * q[1]).exp()]),
            1e-8,
        )
        .unwrap();
        let pts = normal_matrix(50, 2, 4);
        let h = 1e-5;
        for r in 0..pts.nrows() {
            let p = pts.row(r);
            for i in 0..2 {
                let mut pp = p.clone();
                let mut pm = p.clone();
                pp[i] += h;
                pm[i] -= h;
                let fd = (s.eval(&pp).unwrap()[0] - s.eval(&pm).unwrap()[0]) / (2.0 * h);
                let an = s.partial(i, &p).unwrap()[0];
                assert!((an - fd).abs() <= 1e-5 * fd.abs().max(1.0));
            }
        }
    }

    #[test]
    fn physical_derivative_scales_by_sigma() {
        let b = build_basis(1, 1);
        let z = nodes(4, 1);
        let s = fit(&b, &z, &outputs_from(&z, |q| vec![3.0 * q[0]]), 0.0).unwrap();
        let std = s
            .partial_in(0, &[0.0], DerivativeSpace::Standard, 0.5)
            .unwrap()[0];
        let phys = s
            .partial_in(0, &[0.0], DerivativeSpace::Physical, 0.5)
            .unwrap()[0];
        assert!((std - 3.0).abs() < 1e-12);
        assert!((phys - 6.0).abs() < 1e-12);
    }

    #[test]
    fn error_paths() {
        let b = build_basis(2, 3);
        let z = nodes(5, 2);
        let y = outputs_from(&z, |_| vec![1.0]);
        assert!(matches!(
            fit(&b, &z, &y, 0.0),
            Err(Error::Underdetermined { .. })
        ));
        assert!(fit(&b, &z, &y, 1e-3).is_ok());

        let z = nodes(20, 2);
        let mut y = outputs_from(&z, |_| vec![1.0, 2.0]);
        y[(7, 1)] = f64::NAN;
        assert!(matches!(
            fit(&b, &z, &y, 0.0),
            Err(Error::NonFiniteOutput {
                sample: 7,
                output: 1
            })
        ));
        let s = fit(&b, &z, &outputs_from(&z, |_| vec![1.0]), 0.0).unwrap();
        assert!(matches!(
            s.eval(&[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn json_round_trip() {
        let b = build_basis(2, 3);
        let z = nodes(20, 2);
        let s = fit(
            &b,
            &z,
            &outputs_from(&z, |q| vec![q[0] + q[1].powi(2), 1.0]),
            1e-8,
        )
        .unwrap();
        let text = s.to_json().unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        for key in ["dim", "order", "term_list", "lambda", "coeffs"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        let back = Surrogate::from_json(&text).unwrap();
        assert_eq!(back, s);
    }
}
