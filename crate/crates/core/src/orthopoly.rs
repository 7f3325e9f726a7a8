//! Orthonormal probabilists' Hermite polynomials and the total-degree
//! tensor basis built from them.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::SampleMatrix;

/// `He_n(x) / sqrt(n!)`, evaluated with the normalized three-term recurrence
/// `psi_{k+1} = (x psi_k - sqrt(k) psi_{k-1}) / sqrt(k + 1)`.
pub fn hermite_value(n: u32, x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = 1.0;
    for k in 0..n {
        let kf = f64::from(k);
        let next = (x * cur - kf.sqrt() * prev) / (kf + 1.0).sqrt();
        prev = cur;
        cur = next;
    }
    cur
}

/// Derivative of [`hermite_value`]: `psi_n' = sqrt(n) psi_{n-1}`.
pub fn hermite_derivative(n: u32, x: f64) -> f64 {
    if n == 0 {
        0.0
    } else {
        f64::from(n).sqrt() * hermite_value(n - 1, x)
    }
}

/// `psi_0(x) ..= psi_order(x)` in one pass.
fn hermite_table(order: u32, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(order as usize + 1);
    out.push(1.0);
    let mut prev = 0.0;
    for k in 0..order {
        let kf = f64::from(k);
        let next = (x * out[k as usize] - kf.sqrt() * prev) / (kf + 1.0).sqrt();
        prev = out[k as usize];
        out.push(next);
    }
    out
}

/// Per-parameter degrees of one tensor-product basis term.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn degrees(&self) -> &[u32] {
        &self.0
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    /// Nonzero only in parameter `i`.
    pub fn is_pure_in(&self, i: usize) -> bool {
        self.0[i] > 0 && self.0.iter().enumerate().all(|(k, &a)| k == i || a == 0)
    }

    pub fn involves(&self, i: usize) -> bool {
        self.0[i] > 0
    }
}

/// All multi-indices of total degree `<= order`, graded-lexicographic with
/// the zero index first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiIndexBasis {
    dim: usize,
    order: u32,
    terms: Vec<MultiIndex>,
}

fn compositions(total: u32, parts: usize, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    if parts == 1 {
        prefix.push(total);
        out.push(MultiIndex(prefix.clone()));
        prefix.pop();
        return;
    }
    for first in (0..=total).rev() {
        prefix.push(first);
        compositions(total - first, parts - 1, prefix, out);
        prefix.pop();
    }
}

/// `C(n, k)` without overflow for the sizes used here.
pub fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

pub fn build_basis(dim: usize, order: u32) -> MultiIndexBasis {
    assert!(dim >= 1, "basis needs at least one dimension");
    let mut terms =
        Vec::with_capacity(binomial((dim as u64) + u64::from(order), u64::from(order)) as usize);
    let mut prefix = Vec::with_capacity(dim);
    for total in 0..=order {
        compositions(total, dim, &mut prefix, &mut terms);
    }
    MultiIndexBasis { dim, order, terms }
}

impl MultiIndexBasis {
    /// Rebuilds a basis from an explicit term list, e.g. a cached surrogate.
    pub fn from_terms(dim: usize, order: u32, terms: Vec<MultiIndex>) -> Result<Self> {
        for t in &terms {
            if t.0.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: t.0.len(),
                });
            }
        }
        Ok(Self { dim, order, terms })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[MultiIndex] {
        &self.terms
    }

    fn check_point(&self, z: &[f64]) -> Result<()> {
        if z.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: z.len(),
            });
        }
        Ok(())
    }

    fn tables(&self, z: &[f64]) -> Vec<Vec<f64>> {
        z.iter().map(|&x| hermite_table(self.order, x)).collect()
    }

    /// `Psi_j(z)` for every term.
    pub fn eval_row(&self, z: &[f64]) -> Result<Vec<f64>> {
        self.check_point(z)?;
        let tables = self.tables(z);
        Ok(self
            .terms
            .iter()
            .map(|t| {
                t.0.iter()
                    .zip(&tables)
                    .map(|(&a, tab)| tab[a as usize])
                    .product()
            })
            .collect())
    }

    /// `d Psi_j / d z_i` for every term.
    pub fn eval_partial(&self, z: &[f64], i: usize) -> Result<Vec<f64>> {
        self.check_point(z)?;
        if i >= self.dim {
            return Err(Error::IndexOutOfRange {
                index: i,
                dim: self.dim,
            });
        }
        let tables = self.tables(z);
        Ok(self
            .terms
            .iter()
            .map(|t| {
                t.0.iter()
                    .enumerate()
                    .map(|(k, &a)| {
                        if k == i {
                            if a == 0 {
                                0.0
                            } else {
                                f64::from(a).sqrt() * tables[k][a as usize - 1]
                            }
                        } else {
                            tables[k][a as usize]
                        }
                    })
                    .product()
            })
            .collect())
    }

    /// `n x N` matrix of basis values at the rows of `nodes`.
    pub fn design_matrix(&self, nodes: &SampleMatrix) -> Result<DMatrix<f64>> {
        if nodes.ncols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: nodes.ncols(),
            });
        }
        let mut phi = DMatrix::zeros(nodes.nrows(), self.len());
        for r in 0..nodes.nrows() {
            let row = self.eval_row(&nodes.row(r))?;
            for (c, v) in row.into_iter().enumerate() {
                phi[(r, c)] = v;
            }
        }
        Ok(phi)
    }
}

/// Free-function forms matching the rest of the API.
pub fn eval_basis_row(basis: &MultiIndexBasis, z: &[f64]) -> Result<Vec<f64>> {
    basis.eval_row(z)
}

pub fn eval_basis_partial(basis: &MultiIndexBasis, z: &[f64], i: usize) -> Result<Vec<f64>> {
    basis.eval_partial(z, i)
}
