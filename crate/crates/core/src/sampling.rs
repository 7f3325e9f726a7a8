//! Collocation nodes and Monte-Carlo sample matrices.
//!
//! Pseudo-random draws come from `ChaCha8` (value-stable across platforms
//! and crate versions): each `u64` is mapped to the open unit interval as
//! `((x >> 11) + 0.5) * 2^-53` and then through [`std_normal_quantile`].

use nalgebra::DMatrix;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dist::std_normal_quantile;
use crate::error::{Error, Result};

/// Largest dimension supported by [`hammersley`].
pub const MAX_HAMMERSLEY_DIM: usize = 20;

const PRIMES: [u64; 40] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173,
];

const CLAMP_LO: f64 = 1e-12;
const CLAMP_HI: f64 = 1.0 - 1e-12;

/// Coordinate system a [`SampleMatrix`] lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleSpace {
    UnitCube,
    StandardNormal,
    /// Standard-normal marginals with a correlation structure applied.
    CorrelatedNormal,
    Physical,
}

impl SampleSpace {
    pub fn name(self) -> &'static str {
        match self {
            SampleSpace::UnitCube => "unit_cube",
            SampleSpace::StandardNormal => "standard_normal",
            SampleSpace::CorrelatedNormal => "correlated_normal",
            SampleSpace::Physical => "physical",
        }
    }
}

/// `n x d` sample matrix, one sample per row.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    values: DMatrix<f64>,
    space: SampleSpace,
}

impl SampleMatrix {
    pub fn new(values: DMatrix<f64>, space: SampleSpace) -> Self {
        Self { values, space }
    }

    pub fn from_rows(rows: &[Vec<f64>], space: SampleSpace) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: bad.len(),
            });
        }
        Ok(Self::new(DMatrix::from_fn(n, d, |i, j| rows[i][j]), space))
    }

    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.values.ncols()
    }

    pub fn space(&self) -> SampleSpace {
        self.space
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn into_values(self) -> DMatrix<f64> {
        self.values
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[(row, col)]
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.values.row(i).iter().copied().collect()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.column(j).iter().copied().collect()
    }

    pub(crate) fn expect_space(&self, expected: SampleSpace) -> Result<()> {
        if self.space != expected {
            return Err(Error::WrongSpace {
                expected: expected.name(),
                found: self.space.name(),
            });
        }
        Ok(())
    }
}

/// Radical inverse of `i` in base `b`, exact while `b^digits < 2^53`.
pub fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut reversed: u64 = 0;
    let mut scale: u64 = 1;
    while i > 0 {
        reversed = reversed * base + i % base;
        scale *= base;
        i /= base;
    }
    reversed as f64 / scale as f64
}

/// Hammersley point set on the unit cube.
///
/// Row `i` (1-based) is `((i - 0.5)/n, phi_2(i), phi_3(i), ...)`; coordinates
/// are clamped to `[1e-12, 1 - 1e-12]` so the normal quantile stays finite.
pub fn hammersley(n: usize, d: usize) -> Result<SampleMatrix> {
    if d > MAX_HAMMERSLEY_DIM {
        return Err(Error::DimensionTooLarge {
            dim: d,
            max: MAX_HAMMERSLEY_DIM,
        });
    }
    let values = DMatrix::from_fn(n, d, |r, c| {
        let i = r as u64 + 1;
        let x = if c == 0 {
            (i as f64 - 0.5) / n as f64
        } else {
            radical_inverse(i, PRIMES[c - 1])
        };
        x.clamp(CLAMP_LO, CLAMP_HI)
    });
    Ok(SampleMatrix::new(values, SampleSpace::UnitCube))
}

/// Halton points `phi_{p_j}(i)`, `i = 1..=n`, each dimension rotated by an
/// independent uniform shift drawn from `seed` (Cranley–Patterson).
pub fn shifted_halton(n: usize, d: usize, seed: u64) -> Result<SampleMatrix> {
    if d > PRIMES.len() {
        return Err(Error::DimensionTooLarge {
            dim: d,
            max: PRIMES.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shifts: Vec<f64> = (0..d).map(|_| open_unit(&mut rng)).collect();
    let values = DMatrix::from_fn(n, d, |r, c| {
        let x = radical_inverse(r as u64 + 1, PRIMES[c]) + shifts[c];
        (x - x.floor()).clamp(CLAMP_LO, CLAMP_HI)
    });
    Ok(SampleMatrix::new(values, SampleSpace::UnitCube))
}

fn open_unit(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Deterministic pseudo-random `n x d` uniform matrix (row-major draw order).
pub fn uniform_matrix(n: usize, d: usize, seed: u64) -> SampleMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = DMatrix::zeros(n, d);
    for i in 0..n {
        for j in 0..d {
            values[(i, j)] = open_unit(&mut rng);
        }
    }
    SampleMatrix::new(values, SampleSpace::UnitCube)
}

/// Deterministic pseudo-random standard-normal matrix.
pub fn normal_matrix(n: usize, d: usize, seed: u64) -> SampleMatrix {
    to_standard_normal(&uniform_matrix(n, d, seed)).expect("uniform matrix is in the unit cube")
}

/// Elementwise normal quantile transform of a unit-cube matrix.
pub fn to_standard_normal(m: &SampleMatrix) -> Result<SampleMatrix> {
    m.expect_space(SampleSpace::UnitCube)?;
    let mut values = m.values.clone();
    for v in values.iter_mut() {
        *v = std_normal_quantile(*v)?;
    }
    Ok(SampleMatrix::new(values, SampleSpace::StandardNormal))
}

/// Point-set family used for the Saltelli base matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QmcScheme {
    /// Seeded shifted Halton in `2d` dimensions (A from the first `d`).
    #[default]
    Halton,
    /// Seeded pseudo-random draws.
    Random,
}

/// Base matrices `A`, `B` and the mixed matrices `AB_i` (A with column `i`
/// taken from B). First and total indices need `n (d + 2)` model runs.
#[derive(Debug, Clone)]
pub struct SaltelliMatrices {
    pub a: SampleMatrix,
    pub b: SampleMatrix,
    pub ab: Vec<SampleMatrix>,
}

impl SaltelliMatrices {
    pub fn evaluation_count(&self) -> usize {
        self.a.nrows() * (self.ab.len() + 2)
    }
}

pub fn saltelli_matrices(
    n: usize,
    d: usize,
    seed: u64,
    scheme: QmcScheme,
) -> Result<SaltelliMatrices> {
    let joint = match scheme {
        QmcScheme::Halton => to_standard_normal(&shifted_halton(n, 2 * d, seed)?)?,
        QmcScheme::Random => normal_matrix(n, 2 * d, seed),
    };
    let a = joint.values.columns(0, d).into_owned();
    let b = joint.values.columns(d, d).into_owned();
    let ab = (0..d)
        .map(|i| {
            let mut m = a.clone();
            m.set_column(i, &b.column(i));
            SampleMatrix::new(m, SampleSpace::StandardNormal)
        })
        .collect();
    Ok(SaltelliMatrices {
        a: SampleMatrix::new(a, SampleSpace::StandardNormal),
        b: SampleMatrix::new(b, SampleSpace::StandardNormal),
        ab,
    })
}
