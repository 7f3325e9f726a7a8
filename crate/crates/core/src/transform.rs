//! Maps from independent standard normals to correlated ones.
//!
//! Two routes are provided and they agree exactly for Gaussian inputs:
//! the Cholesky map `q* = L q` and the forward Rosenblatt map, which builds
//! each component from its Gaussian conditional on the components before it
//! in a chosen parameter ordering.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dist::{CorrelationMatrix, JointGaussian};
use crate::error::{Error, Result};
use crate::sampling::{SampleMatrix, SampleSpace};

/// An ordering of the parameters. `order[k]` is the original parameter that
/// sits at position `k`; `id` is the 1-based index within its family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Permutation {
    order: Vec<usize>,
    id: usize,
}

impl Permutation {
    pub fn new(order: Vec<usize>, id: usize) -> Result<Self> {
        let mut seen = vec![false; order.len()];
        for &p in &order {
            if p >= order.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidPermutation(order));
            }
        }
        Ok(Self { order, id })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            order: (0..dim).collect(),
            id: 1,
        }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.order.iter().enumerate().all(|(k, &p)| k == p)
    }

    /// Position of original parameter `param` in this ordering.
    pub fn position_of(&self, param: usize) -> usize {
        self.order
            .iter()
            .position(|&p| p == param)
            .expect("parameter in permutation")
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.order.len()];
        for (k, &p) in self.order.iter().enumerate() {
            inv[p] = k;
        }
        Self {
            order: inv,
            id: self.id,
        }
    }
}

/// `P_1 = (1..D)`, `P_2 = (2..D, 1)`, ..., `P_D = (D, 1..D-1)`.
pub fn circular_family(dim: usize) -> Vec<Permutation> {
    (0..dim)
        .map(|shift| Permutation {
            order: (0..dim).map(|k| (k + shift) % dim).collect(),
            id: shift + 1,
        })
        .collect()
}

fn check_perm(perm: &Permutation, dim: usize) -> Result<()> {
    if perm.len() != dim {
        return Err(Error::InvalidPermutation(perm.order.clone()));
    }
    Ok(())
}

/// Reorders marginals and correlation rows/columns so that position `k`
/// holds original parameter `perm.order()[k]`.
pub fn apply_permutation(joint: &JointGaussian, perm: &Permutation) -> Result<JointGaussian> {
    check_perm(perm, joint.dim())?;
    let order = perm.order();
    let marginals = order.iter().map(|&p| joint.marginals()[p]).collect();
    let c = joint.correlation();
    let entries = DMatrix::from_fn(order.len(), order.len(), |a, b| c.get(order[a], order[b]));
    JointGaussian::new(marginals, CorrelationMatrix::new(entries)?)
}

/// Row-wise `q* = L q`, i.e. the sample matrix times `L^T`.
pub fn cholesky_transform(m: &SampleMatrix, corr: &CorrelationMatrix) -> Result<SampleMatrix> {
    m.expect_space(SampleSpace::StandardNormal)?;
    if m.ncols() != corr.dim() {
        return Err(Error::DimensionMismatch {
            expected: corr.dim(),
            found: m.ncols(),
        });
    }
    let out = m.values() * corr.chol().transpose();
    Ok(SampleMatrix::new(out, SampleSpace::CorrelatedNormal))
}

/// Conditional structure for one position of the sequential construction:
/// `x_k = sum_j beta_j x_j + sd * z_k` over the earlier positions `j`.
#[derive(Debug, Clone)]
struct Conditional {
    beta: DVector<f64>,
    sd: f64,
}

fn gaussian_conditionals(corr: &DMatrix<f64>) -> Result<Vec<Conditional>> {
    let d = corr.nrows();
    let mut out = Vec::with_capacity(d);
    for k in 0..d {
        if k == 0 {
            out.push(Conditional {
                beta: DVector::zeros(0),
                sd: corr[(0, 0)].sqrt(),
            });
            continue;
        }
        let prior = corr.view((0, 0), (k, k)).into_owned();
        let cross = corr.view((0, k), (k, 1)).column(0).into_owned();
        let beta = prior
            .lu()
            .solve(&cross)
            .ok_or(Error::NotPositiveDefinite { pivot: k })?;
        let var = corr[(k, k)] - cross.dot(&beta);
        if !(var > 0.0) {
            return Err(Error::NotPositiveDefinite { pivot: k });
        }
        out.push(Conditional {
            beta,
            sd: var.sqrt(),
        });
    }
    Ok(out)
}

/// Forward Rosenblatt map for a Gaussian joint under ordering `perm`.
///
/// Input column `k` is the independent normal driving position `k`; the
/// output is in the ORIGINAL parameter column order, so output column
/// `perm.order()[0]` equals input column 0.
pub fn rosenblatt_forward(
    m: &SampleMatrix,
    joint: &JointGaussian,
    perm: &Permutation,
) -> Result<SampleMatrix> {
    m.expect_space(SampleSpace::StandardNormal)?;
    if m.ncols() != joint.dim() {
        return Err(Error::DimensionMismatch {
            expected: joint.dim(),
            found: m.ncols(),
        });
    }
    let permuted = apply_permutation(joint, perm)?;
    let conds = gaussian_conditionals(permuted.correlation().entries())?;
    let (n, d) = (m.nrows(), m.ncols());
    let z = m.values();
    let mut out = DMatrix::zeros(n, d);
    let mut x = vec![0.0; d];
    for i in 0..n {
        for (k, c) in conds.iter().enumerate() {
            let mean: f64 = c.beta.iter().zip(&x[..k]).map(|(b, xj)| b * xj).sum();
            x[k] = mean + c.sd * z[(i, k)];
        }
        for (k, &p) in perm.order().iter().enumerate() {
            out[(i, p)] = x[k];
        }
    }
    Ok(SampleMatrix::new(out, SampleSpace::CorrelatedNormal))
}

/// Which decorrelation route a campaign uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformKind {
    #[default]
    Rosenblatt,
    Cholesky,
}

/// Correlates independent normals under ordering `perm`, returning columns in
/// the original parameter order for either route.
pub fn correlate(
    m: &SampleMatrix,
    joint: &JointGaussian,
    perm: &Permutation,
    kind: TransformKind,
) -> Result<SampleMatrix> {
    match kind {
        TransformKind::Rosenblatt => rosenblatt_forward(m, joint, perm),
        TransformKind::Cholesky => {
            let permuted = apply_permutation(joint, perm)?;
            let y = cholesky_transform(m, permuted.correlation())?;
            let mut out = DMatrix::zeros(y.nrows(), y.ncols());
            for (k, &p) in perm.order().iter().enumerate() {
                out.set_column(p, &y.values().column(k));
            }
            Ok(SampleMatrix::new(out, SampleSpace::CorrelatedNormal))
        }
    }
}

/// Sample Pearson correlation matrix of the columns of `m`.
pub fn empirical_correlation(m: &SampleMatrix) -> DMatrix<f64> {
    let (n, d) = (m.nrows() as f64, m.ncols());
    let v = m.values();
    let means: Vec<f64> = (0..d).map(|j| v.column(j).sum() / n).collect();
    let mut cov = DMatrix::zeros(d, d);
    for a in 0..d {
        for b in a..d {
            let s: f64 = v
                .column(a)
                .iter()
                .zip(v.column(b).iter())
                .map(|(x, y)| (x - means[a]) * (y - means[b]))
                .sum();
            cov[(a, b)] = s;
            cov[(b, a)] = s;
        }
    }
    DMatrix::from_fn(d, d, |a, b| {
        cov[(a, b)] / (cov[(a, a)] * cov[(b, b)]).sqrt()
    })
}
