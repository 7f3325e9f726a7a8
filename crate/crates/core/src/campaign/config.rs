use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dist::{CorrelationMatrix, JointGaussian, Marginal};
use crate::error::{Error, Result};
use crate::models::{Model, ModelSpec};
use crate::sampling::QmcScheme;
use crate::sensitivity::{PceConfig, QmcConfig};
use crate::surrogate::{DerivativeSpace, DEFAULT_LAMBDA};
use crate::transform::TransformKind;

/// Overrides `output.dir` (the `--out` flag still wins).
pub const OUT_DIR_ENV: &str = "CORRGSA_OUT_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarginalSpec {
    pub name: String,
    pub mean: f64,
    pub std: f64,
}

/// A single coefficient (two parameters only) or a full matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CorrelationSpec {
    Rho(f64),
    Matrix(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QmcSection {
    #[serde(default = "default_qmc_n")]
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub scheme: QmcScheme,
}

impl Default for QmcSection {
    fn default() -> Self {
        Self {
            n: default_qmc_n(),
            seed: 0,
            scheme: QmcScheme::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default)]
    pub dir: Option<PathBuf>,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: None,
            formats: default_formats(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceSection {
    #[serde(default = "default_orders")]
    pub orders: Vec<u32>,
}

impl Default for ConvergenceSection {
    fn default() -> Self {
        Self {
            orders: default_orders(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default = "default_rhos")]
    pub rhos: Vec<f64>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            rhos: default_rhos(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSection {
    /// Requested times; each snaps to the nearest grid point.
    #[serde(default = "default_times")]
    pub times: Vec<f64>,
    #[serde(default = "default_points")]
    pub points: usize,
    /// Half-width of the square in standard deviations.
    #[serde(default = "default_half_width")]
    pub half_width: f64,
}

impl Default for SurfaceSection {
    fn default() -> Self {
        Self {
            times: default_times(),
            points: default_points(),
            half_width: default_half_width(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub model: ModelSpec,
    pub marginals: Vec<MarginalSpec>,
    /// Absent means independent inputs.
    #[serde(default)]
    pub correlation: Option<CorrelationSpec>,
    #[serde(default = "default_order")]
    pub polynomial_order: u32,
    #[serde(default = "default_node_multiplier")]
    pub node_multiplier: f64,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default)]
    pub transform: TransformKind,
    #[serde(default)]
    pub derivative_space: DerivativeSpace,
    #[serde(default)]
    pub qmc: QmcSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub convergence: ConvergenceSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub surface: SurfaceSection,
}

fn default_qmc_n() -> usize {
    1 << 14
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json]
}

fn default_orders() -> Vec<u32> {
    (2..=7).collect()
}

fn default_rhos() -> Vec<f64> {
    (0..=5).map(|k| k as f64 * 0.2).collect()
}

fn default_times() -> Vec<f64> {
    vec![5.0, 50.0, 150.0]
}

fn default_points() -> usize {
    41
}

fn default_half_width() -> f64 {
    3.0
}

fn default_order() -> u32 {
    3
}

fn default_node_multiplier() -> f64 {
    2.0
}

fn default_lambda() -> f64 {
    DEFAULT_LAMBDA
}

impl CampaignConfig {
    /// Parses and validates; errors carry the offending field path.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let config: CampaignConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(
                if path == "." {
                    "<root>".to_string()
                } else {
                    path
                },
                e.into_inner().to_string(),
            )
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::config("--config", format!("cannot read {}: {e}", path.display()))
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.marginals.is_empty() {
            return Err(Error::config(
                "marginals",
                "at least one parameter is required",
            ));
        }
        for (i, m) in self.marginals.iter().enumerate() {
            if !(m.std > 0.0 && m.std.is_finite()) {
                return Err(Error::config(
                    format!("marginals[{i}].std"),
                    format!("must be positive, got {}", m.std),
                ));
            }
            if !m.mean.is_finite() {
                return Err(Error::config(
                    format!("marginals[{i}].mean"),
                    "must be finite",
                ));
            }
            if self.marginals[..i].iter().any(|o| o.name == m.name) {
                return Err(Error::config(
                    format!("marginals[{i}].name"),
                    format!("duplicate name {:?}", m.name),
                ));
            }
        }
        if self.polynomial_order < 1 {
            return Err(Error::config("polynomial_order", "must be >= 1"));
        }
        if !(self.node_multiplier >= 1.0 && self.node_multiplier.is_finite()) {
            return Err(Error::config("node_multiplier", "must be >= 1"));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::config("lambda", "must be finite and >= 0"));
        }
        if self.qmc.n < crate::sensitivity::MIN_QMC_N {
            return Err(Error::config(
                "qmc.n",
                format!("must be >= {}", crate::sensitivity::MIN_QMC_N),
            ));
        }
        if self.output.formats.is_empty() {
            return Err(Error::config(
                "output.formats",
                "at least one format is required",
            ));
        }
        if self.convergence.orders.is_empty() || self.convergence.orders.contains(&0) {
            return Err(Error::config(
                "convergence.orders",
                "must be a non-empty list of orders >= 1",
            ));
        }
        check_rhos(&self.sweep.rhos, "sweep.rhos")?;
        if self.surface.points < 2 || !(self.surface.half_width > 0.0) {
            return Err(Error::config(
                "surface",
                "needs points >= 2 and half_width > 0",
            ));
        }
        self.correlation_matrix()?;
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.marginals.len()
    }

    pub fn names(&self) -> Vec<String> {
        self.marginals.iter().map(|m| m.name.clone()).collect()
    }

    pub fn correlation_matrix(&self) -> Result<CorrelationMatrix> {
        let d = self.dim();
        match &self.correlation {
            None => Ok(CorrelationMatrix::identity(d)),
            Some(CorrelationSpec::Rho(rho)) => {
                if d != 2 {
                    return Err(Error::config(
                        "correlation",
                        format!("a single rho needs 2 parameters, got {d}"),
                    ));
                }
                CorrelationMatrix::bivariate(*rho)
            }
            Some(CorrelationSpec::Matrix(rows)) => {
                if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                    return Err(Error::config(
                        "correlation",
                        format!("expected a {d}x{d} matrix"),
                    ));
                }
                CorrelationMatrix::from_rows(rows)
            }
        }
    }

    pub fn joint(&self) -> Result<JointGaussian> {
        let marginals = self
            .marginals
            .iter()
            .map(|m| Marginal::new(m.mean, m.std))
            .collect::<Result<Vec<_>>>()?;
        JointGaussian::new(marginals, self.correlation_matrix()?)
    }

    pub fn build_model(&self) -> Result<Box<dyn Model>> {
        self.model.build(&self.names())
    }

    pub fn pce_config(&self) -> PceConfig {
        PceConfig {
            node_multiplier: self.node_multiplier,
            lambda: self.lambda,
            transform: self.transform,
            derivative_space: self.derivative_space,
            z0: None,
        }
    }

    pub fn qmc_config(&self) -> QmcConfig {
        QmcConfig {
            n: self.qmc.n,
            seed: self.qmc.seed,
            scheme: self.qmc.scheme,
            transform: self.transform,
        }
    }

    pub fn wants(&self, format: Format) -> bool {
        self.output.formats.contains(&format)
    }

    /// `--out` flag, then the environment override, then `output.dir`.
    pub fn resolve_out_dir(&self, flag: Option<&Path>) -> Result<PathBuf> {
        if let Some(p) = flag {
            return Ok(p.to_path_buf());
        }
        if let Some(p) = std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()) {
            return Ok(PathBuf::from(p));
        }
        self.output.dir.clone().ok_or_else(|| {
            Error::config(
                "output.dir",
                format!("no output directory (pass --out, set {OUT_DIR_ENV} or output.dir)"),
            )
        })
    }
}

pub(crate) fn check_rhos(rhos: &[f64], path: &str) -> Result<()> {
    if rhos.is_empty() {
        return Err(Error::config(path, "empty list"));
    }
    if let Some(r) = rhos.iter().find(|r| !(**r > -1.0 && **r <= 1.0)) {
        return Err(Error::config(path, format!("{r} is outside (-1, 1]")));
    }
    Ok(())
}

/// The coffee-cup study: `kappa ~ N(0.05, 0.008)` 1/min, `T_env ~ N(20, 1.5)` C.
pub fn coffee_cup_config(rho: Option<f64>) -> CampaignConfig {
    CampaignConfig {
        model: ModelSpec::coffee_cup(),
        marginals: vec![
            MarginalSpec {
                name: "kappa".into(),
                mean: 0.05,
                std: 0.008,
            },
            MarginalSpec {
                name: "t_env".into(),
                mean: 20.0,
                std: 1.5,
            },
        ],
        correlation: rho.map(CorrelationSpec::Rho),
        polynomial_order: default_order(),
        node_multiplier: default_node_multiplier(),
        lambda: default_lambda(),
        transform: TransformKind::default(),
        derivative_space: DerivativeSpace::default(),
        qmc: QmcSection::default(),
        output: OutputSection::default(),
        convergence: ConvergenceSection::default(),
        sweep: SweepSection::default(),
        surface: SurfaceSection::default(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "model": {"kind": "coffee_cup"},
        "marginals": [
            {"name": "kappa", "mean": 0.05, "std": 0.008},
            {"name": "t_env", "mean": 20, "std": 1.5}
        ],
        "correlation": 0.4
    }"#;

    #[test]
    fn defaults() {
        let c = CampaignConfig::from_json(MINIMAL).unwrap();
        assert_eq!(c.polynomial_order, 3);
        assert_eq!(c.node_multiplier, 2.0);
        assert_eq!(c.lambda, 1e-8);
        assert_eq!(c.transform, TransformKind::Rosenblatt);
        assert_eq!(c.derivative_space, DerivativeSpace::Physical);
        assert_eq!(c.qmc.n, 16384);
        assert_eq!(c.sweep.rhos.len(), 6);
        assert_eq!(c.correlation_matrix().unwrap().get(0, 1), 0.4);
        assert_eq!(c, {
            let mut e = coffee_cup_config(Some(0.4));
            e.output = OutputSection::default();
            e
        });
    }

    #[test]
    fn missing_marginals_names_the_field() {
        let err = CampaignConfig::from_json(r#"{"model": {"kind": "coffee_cup"}}"#).unwrap_err();
        assert!(err.is_validation());
        assert!(err.to_string().contains("marginals"), "{err}");
    }

    #[test]
    fn field_paths() {
        let bad = MINIMAL.replace("\"std\": 1.5", "\"std\": -1.5");
        let err = CampaignConfig::from_json(&bad).unwrap_err();
        assert!(err.to_string().contains("marginals[1].std"), "{err}");

        let bad = MINIMAL.replace(
            "\"kind\": \"coffee_cup\"",
            "\"kind\": \"coffee_cup\", \"t0\": \"hot\"",
        );
        let err = CampaignConfig::from_json(&bad).unwrap_err();
        assert!(err.to_string().contains("model"), "{err}");

        let bad = MINIMAL.replace("0.4\n", "0.4, \"polynomial_order\": 0\n");
        let err = CampaignConfig::from_json(&bad).unwrap_err();
        assert!(err.to_string().contains("polynomial_order"), "{err}");
    }

    #[test]
    fn correlation_forms() {
        let m = MINIMAL.replace("0.4\n", "[[1, 0.3], [0.3, 1]]\n");
        assert_eq!(
            CampaignConfig::from_json(&m)
                .unwrap()
                .correlation_matrix()
                .unwrap()
                .get(1, 0),
            0.3
        );
        let singular = MINIMAL.replace("0.4\n", "1.0\n");
        assert!(matches!(
            CampaignConfig::from_json(&singular),
            Err(Error::NotPositiveDefinite { .. })
        ));
        let wrong = MINIMAL.replace("0.4\n", "[[1]]\n");
        assert!(CampaignConfig::from_json(&wrong).is_err());
    }

    #[test]
    fn unknown_fields_rejected() {
        let bad = MINIMAL.replace("0.4\n", "0.4, \"polynomial_ordr\": 4\n");
        assert!(CampaignConfig::from_json(&bad).is_err());
    }
}
