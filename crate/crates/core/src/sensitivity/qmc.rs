use nalgebra::DMatrix;

use crate::dist::JointGaussian;
use crate::error::{Error, Result};
use crate::models::Model;
use crate::sampling::{saltelli_matrices, QmcScheme, SampleMatrix, SampleSpace};
use crate::transform::{circular_family, correlate, Permutation, TransformKind};

use super::indices::ZERO_VARIANCE_RTOL;
use super::report::{IndexKind, IndexRecord, Method, Provenance, ReportMeta, SensitivityReport};
use super::to_physical_matrix;

pub const MIN_QMC_N: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct QmcConfig {
    pub n: usize,
    pub seed: u64,
    pub scheme: QmcScheme,
    pub transform: TransformKind,
}

impl Default for QmcConfig {
    fn default() -> Self {
        Self {
            n: 1 << 14,
            seed: 0,
            scheme: QmcScheme::Halton,
            transform: TransformKind::Rosenblatt,
        }
    }
}

/// First and total indices of each input column, one entry per output.
/// `None` marks outputs with zero variance.
pub struct SaltelliEstimate {
    pub first: Vec<Vec<Option<f64>>>,
    pub total: Vec<Vec<Option<f64>>>,
}

/// Saltelli first-order and Jansen total estimators on outputs centred by
/// the pooled A/B mean.
///
/// `y` stacks the responses to `A`, `B`, `AB_1`, ..., `AB_d` (`n` rows each).
pub fn saltelli_estimate(y: &DMatrix<f64>, n: usize, d: usize) -> SaltelliEstimate {
    let mut first = vec![Vec::with_capacity(y.ncols()); d];
    let mut total = vec![Vec::with_capacity(y.ncols()); d];
    let inv_n = 1.0 / n as f64;
    for t in 0..y.ncols() {
        let col = y.column(t);
        let ya = col.rows(0, n);
        let yb = col.rows(n, n);
        let f0 = (ya.sum() + yb.sum()) * 0.5 * inv_n;
        let var = (ya
            .iter()
            .chain(yb.iter())
            .map(|v| (v - f0) * (v - f0))
            .sum::<f64>())
            * 0.5
            * inv_n;
        let tol = ZERO_VARIANCE_RTOL * f0.abs().max(1.0);
        let defined = var > tol * tol;
        for i in 0..d {
            if !defined {
                first[i].push(None);
                total[i].push(None);
                continue;
            }
            let yab = col.rows((2 + i) * n, n);
            let mut v_first = 0.0;
            let mut v_total = 0.0;
            for j in 0..n {
                let diff = yab[j] - ya[j];
                v_first += (yb[j] - f0) * diff;
                v_total += diff * diff;
            }
            first[i].push(Some(v_first * inv_n / var));
            total[i].push(Some(v_total * 0.5 * inv_n / var));
        }
    }
    SaltelliEstimate { first, total }
}

fn estimate_for(
    model: &dyn Model,
    joint: &JointGaussian,
    perm: &Permutation,
    config: &QmcConfig,
) -> Result<SaltelliEstimate> {
    let d = joint.dim();
    let n = config.n;
    let m = saltelli_matrices(n, d, config.seed, config.scheme)?;
    let mut stacked = DMatrix::zeros(n * (d + 2), d);
    for (k, block) in std::iter::once(&m.a)
        .chain(std::iter::once(&m.b))
        .chain(&m.ab)
        .enumerate()
    {
        stacked
            .view_mut((k * n, 0), (n, d))
            .copy_from(block.values());
    }
    let z = SampleMatrix::new(stacked, SampleSpace::StandardNormal);
    let correlated = correlate(&z, joint, perm, config.transform)?;
    let y = model.evaluate_batch(&to_physical_matrix(joint, &correlated)?)?;
    Ok(saltelli_estimate(&y, n, d))
}

/// Monte-Carlo reference indices for each ordering in `perms`, labelled by
/// position exactly as the PCE sweep labels them. With `uncorrelated` set,
/// `joint`'s correlation is ignored and records are tagged `uncorrelated`.
pub fn qmc_sobol_with(
    model: &dyn Model,
    joint: &JointGaussian,
    perms: &[Permutation],
    uncorrelated: bool,
    config: &QmcConfig,
    names: &[String],
) -> Result<SensitivityReport> {
    if config.n < MIN_QMC_N {
        return Err(Error::config(
            "qmc.n",
            format!("needs at least {MIN_QMC_N} base samples, got {}", config.n),
        ));
    }
    if names.len() != joint.dim() {
        return Err(Error::DimensionMismatch {
            expected: joint.dim(),
            found: names.len(),
        });
    }
    let independent;
    let joint = if uncorrelated {
        independent = JointGaussian::independent(joint.marginals().to_vec());
        &independent
    } else {
        joint
    };
    let d = joint.dim();
    let grid = model.output_grid();
    let mut report = SensitivityReport {
        meta: ReportMeta {
            model: model.name().to_string(),
            method: Method::Qmc,
            parameters: names.to_vec(),
            polynomial_order: None,
            node_count: None,
            lambda: None,
            correlation: joint.correlation().to_rows(),
            transform: config.transform,
            derivative_space: None,
            qmc_n: Some(config.n),
            seed: Some(config.seed),
            undefined_times: Vec::new(),
        },
        records: Vec::new(),
    };
    for perm in perms {
        let est = estimate_for(model, joint, perm, config)?;
        for (k, &param) in perm.order().iter().enumerate() {
            let provenances = if uncorrelated {
                vec![Provenance::Uncorrelated]
            } else {
                Provenance::for_position(k, d)
            };
            for (kind, series) in [
                (IndexKind::SobolFirst, &est.first[k]),
                (IndexKind::SobolTotal, &est.total[k]),
            ] {
                for (t, v) in series.iter().enumerate() {
                    let Some(value) = *v else {
                        report.meta.undefined_times.push(t);
                        continue;
                    };
                    for &provenance in &provenances {
                        report.records.push(IndexRecord {
                            time_index: t,
                            time: grid[t],
                            parameter: param,
                            kind,
                            provenance,
                            permutation_id: perm.id(),
                            value,
                        });
                    }
                }
            }
        }
    }
    report.normalize();
    Ok(report)
}

/// Reference indices: the uncorrelated set when `joint` has identity
/// correlation, otherwise Full / Marginal / Independent over the circular
/// family.
pub fn qmc_sobol(
    model: &dyn Model,
    joint: &JointGaussian,
    config: &QmcConfig,
    names: &[String],
) -> Result<SensitivityReport> {
    if joint.correlation().is_identity() {
        qmc_sobol_with(
            model,
            joint,
            &[Permutation::identity(joint.dim())],
            true,
            config,
            names,
        )
    } else {
        qmc_sobol_with(
            model,
            joint,
            &circular_family(joint.dim()),
            false,
            config,
            names,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{CorrelationMatrix, Marginal};
    use crate::models::LinearModel;

    fn names() -> Vec<String> {
        vec!["x1".into(), "x2".into()]
    }

    fn joint(rho: f64) -> JointGaussian {
        JointGaussian::new(
            vec![Marginal::standard(); 2],
            CorrelationMatrix::bivariate(rho).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn additive_model() {
        let model = LinearModel::new(vec![1.0, 1.0], 1);
        let r = qmc_sobol(&model, &joint(0.0), &QmcConfig::default(), &names()).unwrap();
        let s1 = r
            .value(0, 0, IndexKind::SobolFirst, Provenance::Uncorrelated)
            .unwrap();
        assert!((s1 - 0.5).abs() < 0.03, "{s1}");
    }

    #[test]
    fn single_input_model() {
        let model = LinearModel::new(vec![1.0, 0.0], 1);
        let r = qmc_sobol(&model, &joint(0.0), &QmcConfig::default(), &names()).unwrap();
        let t1 = r
            .value(0, 0, IndexKind::SobolTotal, Provenance::Uncorrelated)
            .unwrap();
        let t2 = r
            .value(0, 1, IndexKind::SobolTotal, Provenance::Uncorrelated)
            .unwrap();
        assert!((0.97..=1.03).contains(&t1));
        assert!((-0.03..=0.03).contains(&t2));
    }

    #[test]
    fn correlated_full_index() {
        let model = LinearModel::new(vec![1.0, 1.0], 1);
        for scheme in [QmcScheme::Halton, QmcScheme::Random] {
            let cfg = QmcConfig {
                scheme,
                ..QmcConfig::default()
            };
            let r = qmc_sobol(&model, &joint(0.4), &cfg, &names()).unwrap();
            let full = r
                .value(0, 0, IndexKind::SobolFirst, Provenance::Full)
                .unwrap();
            assert!((full - 0.7).abs() < 0.03, "{scheme:?}: {full}");
        }
    }

    #[test]
    fn constant_output_is_undefined() {
        let model = LinearModel::new(vec![0.0, 0.0], 1);
        let cfg = QmcConfig {
            n: 64,
            ..QmcConfig::default()
        };
        let r = qmc_sobol(&model, &joint(0.0), &cfg, &names()).unwrap();
        assert!(r.records.is_empty());
        assert_eq!(r.meta.undefined_times, vec![0]);
    }

    #[test]
    fn rejects_small_n() {
        let model = LinearModel::new(vec![1.0, 1.0], 1);
        let cfg = QmcConfig {
            n: 8,
            ..QmcConfig::default()
        };
        assert!(qmc_sobol(&model, &joint(0.0), &cfg, &names()).is_err());
    }
}
