use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::dist::{CorrelationMatrix, JointGaussian};
use crate::error::{Error, Result};
use crate::models::Model;
use crate::sensitivity::{
    correlated_analysis, fit_permuted, format_number, max_abs_difference, moments, qmc_sobol,
    uncorrelated_analysis, IndexKind, PceAnalysis, Provenance, SensitivityReport,
};
use crate::transform::Permutation;

use super::config::{check_rhos, CampaignConfig, Format};

/// Largest correlation used in place of 1, which has no Cholesky factor.
pub const RHO_ONE_SUBSTITUTE: f64 = 1.0 - 1e-10;

/// A loaded campaign: validated config, joint input law and model.
pub struct Campaign {
    pub config: CampaignConfig,
    pub joint: JointGaussian,
    pub names: Vec<String>,
    pub model: Box<dyn Model>,
}

impl Campaign {
    pub fn new(config: CampaignConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            joint: config.joint()?,
            names: config.names(),
            model: config.build_model()?,
            config,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::new(CampaignConfig::load(path)?)
    }

    /// Uncorrelated analysis for identity correlation, the permutation sweep
    /// otherwise.
    pub fn analyze(&self, order: u32) -> Result<PceAnalysis> {
        self.analyze_joint(&self.joint, order)
    }

    fn analyze_joint(&self, joint: &JointGaussian, order: u32) -> Result<PceAnalysis> {
        let cfg = self.config.pce_config();
        if joint.correlation().is_identity() {
            uncorrelated_analysis(self.model.as_ref(), joint, order, &cfg, &self.names)
        } else {
            correlated_analysis(self.model.as_ref(), joint, order, &cfg, &self.names)
        }
    }
}

fn write_file(path: PathBuf, contents: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(())
}

fn prepare(out: &Path) -> Result<()> {
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))
}

fn write_report(
    c: &Campaign,
    out: &Path,
    stem: &str,
    report: &SensitivityReport,
    written: &mut Vec<PathBuf>,
) -> Result<()> {
    if c.config.wants(Format::Csv) {
        write_file(out.join(format!("{stem}.csv")), &report.to_csv(), written)?;
    }
    if c.config.wants(Format::Json) {
        write_file(
            out.join(format!("{stem}.json")),
            &report.to_json()?,
            written,
        )?;
    }
    Ok(())
}

/// Indices at the configured order plus moments and fitted surrogates.
///
/// Writes `report.csv`, `report.json`, `moments.csv` and one
/// `surrogate_perm<k>.json` per ordering.
pub fn cmd_run(c: &Campaign, out: &Path) -> Result<Vec<PathBuf>> {
    prepare(out)?;
    let mut written = Vec::new();
    let analysis = c.analyze(c.config.polynomial_order)?;
    write_report(c, out, "report", &analysis.report, &mut written)?;

    let grid = c.model.output_grid();
    let mut csv = String::from("t_min,mean,variance\n");
    for (t, (mean, var)) in moments(&analysis.surrogates[0].1).into_iter().enumerate() {
        let _ = writeln!(
            csv,
            "{},{},{}",
            format_number(grid[t]),
            format_number(mean),
            format_number(var)
        );
    }
    write_file(out.join("moments.csv"), &csv, &mut written)?;

    for (perm, s) in &analysis.surrogates {
        write_file(
            out.join(format!("surrogate_perm{}.json", perm.id())),
            &s.to_json()?,
            &mut written,
        )?;
    }
    Ok(written)
}

const SOBOL_KINDS: [IndexKind; 2] = [IndexKind::SobolFirst, IndexKind::SobolTotal];

fn provenances(joint: &JointGaussian) -> Vec<Provenance> {
    let d = joint.dim();
    if joint.correlation().is_identity() {
        vec![Provenance::Uncorrelated]
    } else if d > 2 {
        vec![
            Provenance::Full,
            Provenance::Marginal,
            Provenance::Independent,
        ]
    } else {
        vec![Provenance::Full, Provenance::Independent]
    }
}

/// PCE at each order against one Monte-Carlo reference.
///
/// `convergence.csv` holds, per (order, parameter, kind, provenance), the
/// largest difference to the reference (`qmc`) and to the next lower order
/// (`previous_order`) over times with defined indices. `qmc_seed_check.csv`
/// compares the reference with a second seed.
pub fn cmd_convergence(
    c: &Campaign,
    out: &Path,
    orders: &[u32],
    qmc_n: Option<usize>,
) -> Result<Vec<PathBuf>> {
    if orders.is_empty() || orders.contains(&0) {
        return Err(Error::config(
            "convergence.orders",
            "must be a non-empty list of orders >= 1",
        ));
    }
    prepare(out)?;
    let mut written = Vec::new();
    let mut qcfg = c.config.qmc_config();
    if let Some(n) = qmc_n {
        qcfg.n = n;
    }
    let reference = qmc_sobol(c.model.as_ref(), &c.joint, &qcfg, &c.names)?;
    write_report(c, out, "qmc_reference", &reference, &mut written)?;
    let second = qmc_sobol(
        c.model.as_ref(),
        &c.joint,
        &crate::sensitivity::QmcConfig {
            seed: qcfg.seed.wrapping_add(1),
            ..qcfg.clone()
        },
        &c.names,
    )?;

    let provs = provenances(&c.joint);
    let d = c.joint.dim();
    let mut csv = String::from("order,parameter,kind,provenance,reference,max_abs_diff\n");
    let mut previous: Option<SensitivityReport> = None;
    for &order in orders {
        let report = c.analyze(order)?.report;
        for p in 0..d {
            for kind in SOBOL_KINDS {
                for &prov in &provs {
                    let refs = [
                        ("qmc", Some(&reference)),
                        ("previous_order", previous.as_ref()),
                    ];
                    for (label, other) in refs {
                        let Some(diff) =
                            other.and_then(|o| max_abs_difference(&report, o, kind, p, prov))
                        else {
                            continue;
                        };
                        let _ = writeln!(
                            csv,
                            "{order},{},{},{},{label},{}",
                            c.names[p],
                            kind.name(),
                            prov.name(),
                            format_number(diff)
                        );
                    }
                }
            }
        }
        previous = Some(report);
    }
    write_file(out.join("convergence.csv"), &csv, &mut written)?;

    let mut seeds = String::from("parameter,kind,provenance,seed_a,seed_b,max_abs_diff\n");
    for p in 0..d {
        for kind in SOBOL_KINDS {
            for &prov in &provs {
                if let Some(diff) = max_abs_difference(&reference, &second, kind, p, prov) {
                    let _ = writeln!(
                        seeds,
                        "{},{},{},{},{},{}",
                        c.names[p],
                        kind.name(),
                        prov.name(),
                        qcfg.seed,
                        qcfg.seed.wrapping_add(1),
                        format_number(diff)
                    );
                }
            }
        }
    }
    write_file(out.join("qmc_seed_check.csv"), &seeds, &mut written)?;
    Ok(written)
}

/// Replaces a correlation of exactly one by [`RHO_ONE_SUBSTITUTE`].
pub fn effective_rho(rho: f64) -> f64 {
    if rho == 1.0 {
        RHO_ONE_SUBSTITUTE
    } else {
        rho
    }
}

/// Permutation sweep for each two-parameter correlation in `rhos`.
///
/// Writes `report_rho_<rho>.{csv,json}` per value and the stacked
/// `rho_sweep.csv` with a leading `rho` column.
pub fn cmd_sweep_rho(c: &Campaign, out: &Path, rhos: &[f64]) -> Result<Vec<PathBuf>> {
    if c.joint.dim() != 2 {
        return Err(Error::config(
            "marginals",
            "sweep-rho needs exactly 2 parameters",
        ));
    }
    check_rhos(rhos, "sweep.rhos")?;
    prepare(out)?;
    let mut written = Vec::new();
    let mut stacked = format!("rho,{}\n", crate::sensitivity::CSV_HEADER);
    for &rho in rhos {
        let rho = effective_rho(rho);
        let joint = c
            .joint
            .with_correlation(CorrelationMatrix::bivariate(rho)?)?;
        let cfg = c.config.pce_config();
        let report = correlated_analysis(
            c.model.as_ref(),
            &joint,
            c.config.polynomial_order,
            &cfg,
            &c.names,
        )?
        .report;
        let label = format_number(rho);
        write_report(
            c,
            out,
            &format!("report_rho_{label}"),
            &report,
            &mut written,
        )?;
        for line in report.to_csv().lines().skip(1) {
            let _ = writeln!(stacked, "{label},{line}");
        }
    }
    write_file(out.join("rho_sweep.csv"), &stacked, &mut written)?;
    Ok(written)
}

/// Index of the grid point closest to `t` (earliest on ties).
pub fn nearest_index(grid: &[f64], t: f64) -> usize {
    let mut best = 0;
    for (k, g) in grid.iter().enumerate() {
        if (g - t).abs() < (grid[best] - t).abs() {
            best = k;
        }
    }
    best
}

/// Surrogate values on a square grid in the first two standard-normal
/// coordinates (others held at zero), for the correlated fit under the
/// identity ordering and for the uncorrelated fit.
///
/// Writes `surface.csv` and `surface_summary.csv` (largest absolute
/// difference per time).
pub fn cmd_surface(c: &Campaign, out: &Path, times: &[f64]) -> Result<Vec<PathBuf>> {
    let d = c.joint.dim();
    if d < 2 {
        return Err(Error::config(
            "marginals",
            "surface needs at least 2 parameters",
        ));
    }
    if times.is_empty() {
        return Err(Error::config("surface.times", "empty list"));
    }
    let grid = c.model.output_grid();
    let (lo, hi) = (grid[0], grid[grid.len() - 1]);
    if let Some(t) = times.iter().find(|t| !(**t >= lo && **t <= hi)) {
        return Err(Error::config(
            "surface.times",
            format!("{t} is outside the output grid [{lo}, {hi}]"),
        ));
    }
    prepare(out)?;
    let mut written = Vec::new();
    let cfg = c.config.pce_config();
    let order = c.config.polynomial_order;
    let perm = Permutation::identity(d);
    let independent = JointGaussian::independent(c.joint.marginals().to_vec());
    let correlated = fit_permuted(c.model.as_ref(), &c.joint, &perm, order, &cfg)?;
    let uncorrelated = fit_permuted(c.model.as_ref(), &independent, &perm, order, &cfg)?;

    let points = c.config.surface.points;
    let hw = c.config.surface.half_width;
    let axis: Vec<f64> = (0..points)
        .map(|k| -hw + 2.0 * hw * k as f64 / (points - 1) as f64)
        .collect();
    let marg = c.joint.marginals();
    let mut csv = format!(
        "t_min,z_{a},z_{b},{a},{b},correlated,uncorrelated,difference\n",
        a = c.names[0],
        b = c.names[1]
    );
    let mut summary = String::from("t_min,max_abs_difference\n");
    for &t in times {
        let ti = nearest_index(grid, t);
        let mut max_diff = 0.0f64;
        for &z1 in &axis {
            for &z2 in &axis {
                let mut z = vec![0.0; d];
                z[0] = z1;
                z[1] = z2;
                let yc = correlated.eval(&z)?[ti];
                let yu = uncorrelated.eval(&z)?[ti];
                max_diff = max_diff.max((yc - yu).abs());
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{},{},{}",
                    format_number(grid[ti]),
                    format_number(z1),
                    format_number(z2),
                    format_number(marg[0].mean() + marg[0].std() * z1),
                    format_number(marg[1].mean() + marg[1].std() * z2),
                    format_number(yc),
                    format_number(yu),
                    format_number(yc - yu)
                );
            }
        }
        let _ = writeln!(
            summary,
            "{},{}",
            format_number(grid[ti]),
            format_number(max_diff)
        );
    }
    write_file(out.join("surface.csv"), &csv, &mut written)?;
    write_file(out.join("surface_summary.csv"), &summary, &mut written)?;
    Ok(written)
}
