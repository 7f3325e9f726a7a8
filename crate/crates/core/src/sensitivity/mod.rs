//! Variance- and derivative-based indices from surrogates, the permutation
//! sweep for correlated inputs, and the Monte-Carlo reference estimator.
//!
//! With correlated inputs each parameter gets a *Full* index (placed first in
//! the ordering, so it carries everything it shares with the others) and an
//! *Independent* index (placed last, with all shared contributions removed).
//! Total-order indices under correlation are reported as computed and can be
//! smaller than the first-order ones.

mod indices;
mod qmc;
mod report;
mod sweep;

use std::collections::HashMap;

use nalgebra::DMatrix;

use crate::dist::JointGaussian;
use crate::error::Result;
use crate::sampling::{SampleMatrix, SampleSpace};
use crate::surrogate::Surrogate;

pub use indices::{
    derivative_index, is_zero_variance, pce_variance, sobol_first, sobol_total, ZERO_VARIANCE_RTOL,
};
pub use qmc::{
    qmc_sobol, qmc_sobol_with, saltelli_estimate, QmcConfig, SaltelliEstimate, MIN_QMC_N,
};
pub use report::{
    format_number, IndexKind, IndexRecord, Method, Provenance, ReportMeta, SensitivityReport,
    CSV_HEADER,
};
pub use sweep::{
    collocation_nodes, correlated_analysis, correlated_sweep, fit_permuted, node_count,
    permuted_analysis, uncorrelated_analysis, PceAnalysis, PceConfig,
};

/// Maps every row of a (possibly correlated) standard-normal matrix to
/// physical units.
pub fn to_physical_matrix(joint: &JointGaussian, m: &SampleMatrix) -> Result<SampleMatrix> {
    let mut out = DMatrix::zeros(m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        let q = joint.to_physical(&m.row(i))?;
        for (j, v) in q.into_iter().enumerate() {
            out[(i, j)] = v;
        }
    }
    Ok(SampleMatrix::new(out, SampleSpace::Physical))
}

/// `(mean, variance)` of each surrogate output.
pub fn moments(s: &Surrogate) -> Vec<(f64, f64)> {
    (0..s.output_len())
        .map(|t| (s.mean(t), pce_variance(s, t)))
        .collect()
}

/// Largest `|a - b|` over records present in both reports with the same
/// time, parameter, kind and provenance. `None` if nothing overlaps.
pub fn max_abs_difference(
    a: &SensitivityReport,
    b: &SensitivityReport,
    kind: IndexKind,
    parameter: usize,
    provenance: Provenance,
) -> Option<f64> {
    let lookup: HashMap<usize, f64> = b
        .select(Some(parameter), Some(kind), Some(provenance))
        .map(|r| (r.time_index, r.value))
        .collect();
    a.select(Some(parameter), Some(kind), Some(provenance))
        .filter_map(|r| lookup.get(&r.time_index).map(|v| (r.value - v).abs()))
        .reduce(f64::max)
}
