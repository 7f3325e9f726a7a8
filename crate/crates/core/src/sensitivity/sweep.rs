use crate::dist::JointGaussian;
use crate::error::{Error, Result};
use crate::models::Model;
use crate::orthopoly::{build_basis, MultiIndexBasis};
use crate::sampling::{hammersley, to_standard_normal, SampleMatrix};
use crate::surrogate::{fit, DerivativeSpace, Surrogate, DEFAULT_LAMBDA};
use crate::transform::{circular_family, correlate, Permutation, TransformKind};

use super::indices::{derivative_index, is_zero_variance, sobol_first, sobol_total};
use super::report::{IndexKind, IndexRecord, Method, Provenance, ReportMeta, SensitivityReport};
use super::to_physical_matrix;

/// Settings shared by every PCE analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct PceConfig {
    /// Collocation nodes per basis term (rounded up).
    pub node_multiplier: f64,
    pub lambda: f64,
    pub transform: TransformKind,
    pub derivative_space: DerivativeSpace,
    /// Standard-normal point for derivative indices; `None` is the origin
    /// (parameter means).
    pub z0: Option<Vec<f64>>,
}

impl Default for PceConfig {
    fn default() -> Self {
        Self {
            node_multiplier: 2.0,
            lambda: DEFAULT_LAMBDA,
            transform: TransformKind::Rosenblatt,
            derivative_space: DerivativeSpace::Physical,
            z0: None,
        }
    }
}

/// A report together with the surrogate fitted for each ordering.
#[derive(Debug, Clone)]
pub struct PceAnalysis {
    pub report: SensitivityReport,
    pub surrogates: Vec<(Permutation, Surrogate)>,
}

pub fn node_count(basis_len: usize, node_multiplier: f64) -> usize {
    (node_multiplier * basis_len as f64).ceil() as usize
}

/// Hammersley collocation nodes mapped to standard-normal space.
pub fn collocation_nodes(basis: &MultiIndexBasis, node_multiplier: f64) -> Result<SampleMatrix> {
    if !(node_multiplier >= 1.0) {
        return Err(Error::config(
            "node_multiplier",
            format!("must be >= 1, got {node_multiplier}"),
        ));
    }
    to_standard_normal(&hammersley(
        node_count(basis.len(), node_multiplier),
        basis.dim(),
    )?)
}

/// Evaluates the model at correlated images of the nodes and fits against the
/// independent nodes. Surrogate coordinate `k` is position `k` of `perm`.
pub fn fit_permuted(
    model: &dyn Model,
    joint: &JointGaussian,
    perm: &Permutation,
    order: u32,
    config: &PceConfig,
) -> Result<Surrogate> {
    let basis = build_basis(joint.dim(), order);
    let nodes = collocation_nodes(&basis, config.node_multiplier)?;
    let correlated = correlate(&nodes, joint, perm, config.transform)?;
    let outputs = model.evaluate_batch(&to_physical_matrix(joint, &correlated)?)?;
    fit(&basis, &nodes, &outputs, config.lambda)
}

/// Sobol and derivative records of one surrogate. `labels(k)` gives the
/// provenances of surrogate coordinate `k`.
fn records_for(
    s: &Surrogate,
    joint: &JointGaussian,
    perm: &Permutation,
    grid: &[f64],
    config: &PceConfig,
    labels: impl Fn(usize) -> Vec<Provenance>,
    report: &mut SensitivityReport,
) -> Result<()> {
    let d = joint.dim();
    let z0 = config.z0.clone().unwrap_or_else(|| vec![0.0; d]);
    for (k, &param) in perm.order().iter().enumerate() {
        let sigma = joint.marginals()[param].std();
        let deriv = derivative_index(s, k, &z0, config.derivative_space, sigma)?;
        let provenances = labels(k);
        let mut push = |t: usize, kind: IndexKind, value: f64| {
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
        };
        for (t, &d) in deriv.iter().enumerate() {
            push(t, IndexKind::Derivative, d);
            if !is_zero_variance(s, t) {
                push(t, IndexKind::SobolFirst, sobol_first(s, k, t)?);
                push(t, IndexKind::SobolTotal, sobol_total(s, k, t)?);
            }
        }
    }
    report
        .meta
        .undefined_times
        .extend((0..s.output_len()).filter(|&t| is_zero_variance(s, t)));
    Ok(())
}

fn meta(
    model: &dyn Model,
    joint: &JointGaussian,
    order: u32,
    config: &PceConfig,
    names: &[String],
) -> ReportMeta {
    let basis_len =
        crate::orthopoly::binomial((joint.dim() as u32 + order) as u64, order as u64) as usize;
    ReportMeta {
        model: model.name().to_string(),
        method: Method::Pce,
        parameters: names.to_vec(),
        polynomial_order: Some(order),
        node_count: Some(node_count(basis_len, config.node_multiplier)),
        lambda: Some(config.lambda),
        correlation: joint.correlation().to_rows(),
        transform: config.transform,
        derivative_space: Some(config.derivative_space),
        qmc_n: None,
        seed: None,
        undefined_times: Vec::new(),
    }
}

fn check_names(joint: &JointGaussian, names: &[String]) -> Result<()> {
    if names.len() != joint.dim() {
        return Err(Error::DimensionMismatch {
            expected: joint.dim(),
            found: names.len(),
        });
    }
    Ok(())
}

/// Classical analysis with the correlation of `joint` ignored.
pub fn uncorrelated_analysis(
    model: &dyn Model,
    joint: &JointGaussian,
    order: u32,
    config: &PceConfig,
    names: &[String],
) -> Result<PceAnalysis> {
    check_names(joint, names)?;
    let independent = JointGaussian::independent(joint.marginals().to_vec());
    let perm = Permutation::identity(joint.dim());
    let s = fit_permuted(model, &independent, &perm, order, config)?;
    let mut report = SensitivityReport {
        meta: meta(model, &independent, order, config, names),
        records: Vec::new(),
    };
    records_for(
        &s,
        &independent,
        &perm,
        model.output_grid(),
        config,
        |_| vec![Provenance::Uncorrelated],
        &mut report,
    )?;
    report.normalize();
    Ok(PceAnalysis {
        report,
        surrogates: vec![(perm, s)],
    })
}

/// One analysis per ordering of `perms`, merged into a single report keyed
/// by original parameter ids.
pub fn permuted_analysis(
    model: &dyn Model,
    joint: &JointGaussian,
    perms: &[Permutation],
    order: u32,
    config: &PceConfig,
    names: &[String],
) -> Result<PceAnalysis> {
    check_names(joint, names)?;
    let d = joint.dim();
    let mut report = SensitivityReport {
        meta: meta(model, joint, order, config, names),
        records: Vec::new(),
    };
    let mut surrogates = Vec::with_capacity(perms.len());
    for perm in perms {
        let s = fit_permuted(model, joint, perm, order, config)?;
        records_for(
            &s,
            joint,
            perm,
            model.output_grid(),
            config,
            |k| Provenance::for_position(k, d),
            &mut report,
        )?;
        surrogates.push((perm.clone(), s));
    }
    report.normalize();
    Ok(PceAnalysis { report, surrogates })
}

/// Full / Marginal / Independent indices over the circular family.
pub fn correlated_analysis(
    model: &dyn Model,
    joint: &JointGaussian,
    order: u32,
    config: &PceConfig,
    names: &[String],
) -> Result<PceAnalysis> {
    permuted_analysis(
        model,
        joint,
        &circular_family(joint.dim()),
        order,
        config,
        names,
    )
}

pub fn correlated_sweep(
    model: &dyn Model,
    joint: &JointGaussian,
    order: u32,
    config: &PceConfig,
    names: &[String],
) -> Result<SensitivityReport> {
    Ok(correlated_analysis(model, joint, order, config, names)?.report)
}
