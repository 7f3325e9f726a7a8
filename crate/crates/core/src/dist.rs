//! Gaussian marginals, correlation structure and the standard-normal
//! distribution functions used by sampling and the Rosenblatt map.
//!
//! All analysis happens in standard-normal coordinates `z ~ N(0, I)`; the
//! physical parameters `q = mu + sigma * z` only appear when a model is
//! evaluated (see [`JointGaussian::to_physical`]).

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;

/// Standard normal density.
pub fn std_normal_pdf(x: f64) -> f64 {
    const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal CDF, `Phi(x) = erfc(-x / sqrt 2) / 2`.
///
/// Going through `erfc` keeps full relative precision in the lower tail.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * std::f64::consts::FRAC_1_SQRT_2)
}

/// Inverse of [`std_normal_cdf`] (Wichura's AS241, ~1e-16 relative accuracy).
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(p));
    }
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        let num = ((((((2.509_080_928_730_122_7e3 * r + 3.343_057_558_358_813e4) * r
            + 6.726_577_092_700_87e4)
            * r
            + 4.592_195_393_154_987e4)
            * r
            + 1.373_169_376_550_946e4)
            * r
            + 1.971_590_950_306_551_3e3)
            * r
            + 1.331_416_678_917_843_7e2)
            * r
            + 3.387_132_872_796_366_5;
        let den = ((((((5.226_495_278_852_854e3 * r + 2.872_908_573_572_194_3e4) * r
            + 3.930_789_580_009_271e4)
            * r
            + 2.121_379_430_158_659_7e4)
            * r
            + 5.394_196_021_424_751e3)
            * r
            + 6.871_870_074_920_579e2)
            * r
            + 4.231_333_070_160_091e1)
            * r
            + 1.0;
        return Ok(q * num / den);
    }

    let tail = if q < 0.0 { p } else { 1.0 - p };
    let mut r = (-tail.ln()).sqrt();
    let value = if r <= 5.0 {
        r -= 1.6;
        let num = ((((((7.745_450_142_783_414e-4 * r + 2.272_384_498_926_918_4e-2) * r
            + 2.417_807_251_774_506e-1)
            * r
            + 1.270_458_252_452_368_4)
            * r
            + 3.647_848_324_763_204_5)
            * r
            + 5.769_497_221_460_691)
            * r
            + 4.630_337_846_156_546)
            * r
            + 1.423_437_110_749_683_5;
        let den = ((((((1.050_750_071_644_416_9e-9 * r + 5.475_938_084_995_345e-4) * r
            + 1.519_866_656_361_645_7e-2)
            * r
            + 1.481_039_764_274_800_8e-1)
            * r
            + 6.897_673_349_851e-1)
            * r
            + 1.676_384_830_183_803_8)
            * r
            + 2.053_191_626_637_759)
            * r
            + 1.0;
        num / den
    } else {
        r -= 5.0;
        let num = ((((((2.010_334_399_292_288e-7 * r + 2.711_555_568_743_487_6e-5) * r
            + 1.242_660_947_388_078_4e-3)
            * r
            + 2.653_218_952_657_612_4e-2)
            * r
            + 2.965_605_718_285_049e-1)
            * r
            + 1.784_826_539_917_291_3)
            * r
            + 5.463_784_911_164_114)
            * r
            + 6.657_904_643_501_103;
        let den = ((((((2.044_263_103_389_939_8e-15 * r + 1.421_511_758_316_446e-7) * r
            + 1.846_318_317_510_054_8e-5)
            * r
            + 7.868_691_311_456_133e-4)
            * r
            + 1.487_536_129_085_061_5e-2)
            * r
            + 1.369_298_809_227_358e-1)
            * r
            + 5.998_322_065_558_88e-1)
            * r
            + 1.0;
        num / den
    };
    Ok(if q < 0.0 { -value } else { value })
}

/// Normal marginal of one physical parameter, in model units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Marginal {
    mean: f64,
    std: f64,
}

impl Marginal {
    pub fn new(mean: f64, std: f64) -> Result<Self> {
        if !(std > 0.0 && std.is_finite()) || !mean.is_finite() {
            return Err(Error::InvalidMarginal(std));
        }
        Ok(Self { mean, std })
    }

    /// `N(0, 1)`.
    pub fn standard() -> Self {
        Self {
            mean: 0.0,
            std: 1.0,
        }
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn std(&self) -> f64 {
        self.std
    }
}

/// A validated correlation matrix together with its lower Cholesky factor.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    entries: DMatrix<f64>,
    chol: DMatrix<f64>,
}

impl CorrelationMatrix {
    /// Validates `entries` and factors it. Fails with `NotPositiveDefinite`
    /// carrying the first pivot whose Schur complement is not positive.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let d = entries.nrows();
        if d == 0 {
            return Err(Error::InvalidCorrelation("empty matrix".into()));
        }
        if entries.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: entries.ncols(),
            });
        }
        for i in 0..d {
            for j in 0..d {
                let c = entries[(i, j)];
                if !c.is_finite() {
                    return Err(Error::InvalidCorrelation(format!(
                        "entry ({i}, {j}) is not finite"
                    )));
                }
                if i == j && (c - 1.0).abs() > SYMMETRY_TOL {
                    return Err(Error::InvalidCorrelation(format!(
                        "diagonal entry {i} is {c}, expected 1"
                    )));
                }
                if i != j && !(-1.0..=1.0).contains(&c) {
                    return Err(Error::InvalidCorrelation(format!(
                        "entry ({i}, {j}) = {c} outside [-1, 1]"
                    )));
                }
                if (c - entries[(j, i)]).abs() > SYMMETRY_TOL {
                    return Err(Error::InvalidCorrelation(format!(
                        "not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        let chol = cholesky_lower(&entries)?;
        Ok(Self { entries, chol })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        for row in rows {
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: row.len(),
                });
            }
        }
        Self::new(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
    }

    pub fn identity(dim: usize) -> Self {
        let eye = DMatrix::identity(dim, dim);
        Self {
            entries: eye.clone(),
            chol: eye,
        }
    }

    /// Two-parameter matrix `[[1, rho], [rho, 1]]`.
    pub fn bivariate(rho: f64) -> Result<Self> {
        Self::new(DMatrix::from_row_slice(2, 2, &[1.0, rho, rho, 1.0]))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Lower-triangular `L` with `L L^T = C`.
    pub fn chol(&self) -> &DMatrix<f64> {
        &self.chol
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    pub fn is_identity(&self) -> bool {
        let d = self.dim();
        (0..d).all(|i| (0..d).all(|j| i == j || self.entries[(i, j)] == 0.0))
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        let d = self.dim();
        (0..d)
            .map(|i| (0..d).map(|j| self.entries[(i, j)]).collect())
            .collect()
    }
}

/// Cholesky–Banachiewicz factorization, reporting the failing pivot.
fn cholesky_lower(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let d = a.nrows();
    let mut l = DMatrix::<f64>::zeros(d, d);
    for j in 0..d {
        let mut diag = a[(j, j)];
        for k in 0..j {
            diag -= l[(j, k)] * l[(j, k)];
        }
        if !(diag > 0.0) {
            return Err(Error::NotPositiveDefinite { pivot: j });
        }
        let ljj = diag.sqrt();
        l[(j, j)] = ljj;
        for i in (j + 1)..d {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / ljj;
        }
    }
    Ok(l)
}

/// Joint Gaussian input model: independent marginals tied together by a
/// correlation matrix on the standardized variables.
#[derive(Debug, Clone, PartialEq)]
pub struct JointGaussian {
    marginals: Vec<Marginal>,
    correlation: CorrelationMatrix,
}

impl JointGaussian {
    pub fn new(marginals: Vec<Marginal>, correlation: CorrelationMatrix) -> Result<Self> {
        if marginals.len() != correlation.dim() {
            return Err(Error::DimensionMismatch {
                expected: correlation.dim(),
                found: marginals.len(),
            });
        }
        Ok(Self {
            marginals,
            correlation,
        })
    }

    pub fn independent(marginals: Vec<Marginal>) -> Self {
        let d = marginals.len();
        Self {
            marginals,
            correlation: CorrelationMatrix::identity(d),
        }
    }

    pub fn dim(&self) -> usize {
        self.marginals.len()
    }

    pub fn marginals(&self) -> &[Marginal] {
        &self.marginals
    }

    pub fn correlation(&self) -> &CorrelationMatrix {
        &self.correlation
    }

    /// Same marginals with a different correlation structure.
    pub fn with_correlation(&self, correlation: CorrelationMatrix) -> Result<Self> {
        Self::new(self.marginals.clone(), correlation)
    }

    /// `diag(sigma) C diag(sigma)`.
    pub fn covariance(&self) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |i, j| {
            self.marginals[i].std * self.correlation.get(i, j) * self.marginals[j].std
        })
    }

    /// `q_i = mu_i + sigma_i z_i`.
    pub fn to_physical(&self, z: &[f64]) -> Result<Vec<f64>> {
        self.check_len(z.len())?;
        Ok(z.iter()
            .zip(&self.marginals)
            .map(|(zi, m)| m.mean + m.std * zi)
            .collect())
    }

    /// Inverse of [`to_physical`](Self::to_physical).
    pub fn to_standard(&self, q: &[f64]) -> Result<Vec<f64>> {
        self.check_len(q.len())?;
        Ok(q.iter()
            .zip(&self.marginals)
            .map(|(qi, m)| (qi - m.mean) / m.std)
            .collect())
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: len,
            });
        }
        Ok(())
    }
}

/// Builds a joint model from marginals and a row-major correlation matrix.
pub fn make_joint(
    marginals: Vec<Marginal>,
    correlation_entries: &[Vec<f64>],
) -> Result<JointGaussian> {
    if marginals.len() != correlation_entries.len() {
        return Err(Error::DimensionMismatch {
            expected: marginals.len(),
            found: correlation_entries.len(),
        });
    }
    JointGaussian::new(
        marginals,
        CorrelationMatrix::from_rows(correlation_entries)?,
    )
}
