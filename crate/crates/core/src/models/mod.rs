//! Models under analysis.
//!
//! A model maps one physical parameter vector to a vector of outputs
//! (usually a time series). Batches are evaluated row-parallel with results
//! slotted by sample index, so output order never depends on scheduling.

mod analytic;
mod coffee;
mod external;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::SampleMatrix;

pub use analytic::{linear_model, LinearModel, ProductModel};
pub use coffee::{coffee_cup, CoffeeCup, DEFAULT_STEPS, DEFAULT_T0, DEFAULT_T_END};
pub use external::{external_eval, ExternalModel, DEFAULT_TIMEOUT_SECS};

pub trait Model: Sync {
    fn name(&self) -> &str;

    /// Abscissa of each output component (minutes for time series, plain
    /// indices otherwise).
    fn output_grid(&self) -> &[f64];

    fn output_len(&self) -> usize {
        self.output_grid().len()
    }

    /// Evaluates one physical parameter vector.
    fn evaluate(&self, q: &[f64]) -> Result<Vec<f64>>;

    /// Evaluates every row of `samples`; fails on the first error.
    fn evaluate_batch(&self, samples: &SampleMatrix) -> Result<DMatrix<f64>> {
        let rows: Vec<Vec<f64>> = (0..samples.nrows())
            .into_par_iter()
            .map(|i| self.evaluate(&samples.row(i)))
            .collect::<Result<_>>()?;
        stack_rows(rows, self.output_len())
    }
}

pub(crate) fn stack_rows(rows: Vec<Vec<f64>>, width: usize) -> Result<DMatrix<f64>> {
    let mut out = DMatrix::zeros(rows.len(), width);
    for (i, r) in rows.iter().enumerate() {
        if r.len() != width {
            return Err(Error::MalformedOutput(format!(
                "sample {i} produced {} outputs, expected {width}",
                r.len()
            )));
        }
        for (j, v) in r.iter().enumerate() {
            out[(i, j)] = *v;
        }
    }
    Ok(out)
}

fn default_t0() -> f64 {
    DEFAULT_T0
}

fn default_t_end() -> f64 {
    DEFAULT_T_END
}

fn default_steps() -> usize {
    DEFAULT_STEPS
}

fn default_outputs() -> usize {
    1
}

fn default_scale() -> f64 {
    1.0
}

fn default_timeout() -> f64 {
    DEFAULT_TIMEOUT_SECS
}

fn default_workers() -> usize {
    4
}

/// Declarative description of a model, as found in campaign configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    /// Newton cooling `dT/dt = -kappa (T - T_env)`; parameters `(kappa, T_env)`.
    CoffeeCup {
        #[serde(default = "default_t0")]
        t0: f64,
        #[serde(default = "default_t_end")]
        t_end: f64,
        #[serde(default = "default_steps")]
        steps: usize,
        /// Explicit grid in minutes; overrides `t_end`/`steps`.
        #[serde(default)]
        time_grid: Option<Vec<f64>>,
    },
    /// `Y = sum_i c_i x_i`, replicated over `outputs` components.
    Linear {
        #[serde(default)]
        coefficients: Option<Vec<f64>>,
        #[serde(default = "default_outputs")]
        outputs: usize,
    },
    /// `Y = scale * prod_i x_i`.
    Product {
        #[serde(default = "default_scale")]
        scale: f64,
        #[serde(default = "default_outputs")]
        outputs: usize,
    },
    /// Process-per-evaluation black box speaking the JSON-lines protocol.
    External {
        /// Program followed by its arguments.
        command: Vec<String>,
        #[serde(default)]
        time_grid: Option<Vec<f64>>,
        #[serde(default)]
        outputs: Option<usize>,
        #[serde(default = "default_timeout")]
        timeout_s: f64,
        #[serde(default = "default_workers")]
        workers: usize,
    },
}

impl ModelSpec {
    pub fn coffee_cup() -> Self {
        ModelSpec::CoffeeCup {
            t0: DEFAULT_T0,
            t_end: DEFAULT_T_END,
            steps: DEFAULT_STEPS,
            time_grid: None,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ModelSpec::CoffeeCup { .. } => "coffee_cup",
            ModelSpec::Linear { .. } => "linear",
            ModelSpec::Product { .. } => "product",
            ModelSpec::External { .. } => "external",
        }
    }

    /// Instantiates the model for `param_names` (one per input dimension).
    pub fn build(&self, param_names: &[String]) -> Result<Box<dyn Model>> {
        let dim = param_names.len();
        Ok(match self {
            ModelSpec::CoffeeCup {
                t0,
                t_end,
                steps,
                time_grid,
            } => {
                if dim != 2 {
                    return Err(Error::config(
                        "marginals",
                        format!("coffee_cup takes 2 parameters (kappa, T_env), got {dim}"),
                    ));
                }
                let grid = match time_grid {
                    Some(g) => g.clone(),
                    None => uniform_grid(*t_end, *steps)?,
                };
                Box::new(CoffeeCup::new(grid, *t0)?)
            }
            ModelSpec::Linear {
                coefficients,
                outputs,
            } => {
                let c = coefficients.clone().unwrap_or_else(|| vec![1.0; dim]);
                if c.len() != dim {
                    return Err(Error::config(
                        "model.coefficients",
                        format!("{} coefficients for {dim} parameters", c.len()),
                    ));
                }
                Box::new(LinearModel::new(c, *outputs))
            }
            ModelSpec::Product { scale, outputs } => Box::new(ProductModel::new(*scale, *outputs)),
            ModelSpec::External {
                command,
                time_grid,
                outputs,
                timeout_s,
                workers,
            } => {
                let grid = match (time_grid, outputs) {
                    (Some(g), _) => g.clone(),
                    (None, Some(t)) => (0..*t).map(|k| k as f64).collect(),
                    (None, None) => {
                        return Err(Error::config(
                            "model",
                            "external models need `time_grid` or `outputs`",
                        ));
                    }
                };
                check_grid(&grid, "model.time_grid")?;
                if command.is_empty() {
                    return Err(Error::config("model.command", "empty command"));
                }
                if !(*timeout_s > 0.0) {
                    return Err(Error::config("model.timeout_s", "must be positive"));
                }
                Box::new(ExternalModel::new(
                    command.clone(),
                    param_names.to_vec(),
                    grid,
                    std::time::Duration::from_secs_f64(*timeout_s),
                    (*workers).max(1),
                ))
            }
        })
    }
}

/// `steps + 1` points from 0 to `t_end` inclusive.
pub fn uniform_grid(t_end: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 || !(t_end > 0.0) {
        return Err(Error::config(
            "model",
            "time grid needs steps >= 1 and t_end > 0",
        ));
    }
    Ok((0..=steps)
        .map(|k| t_end * k as f64 / steps as f64)
        .collect())
}

pub(crate) fn check_grid(grid: &[f64], path: &str) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::config(path, "empty grid"));
    }
    if grid.iter().any(|t| !t.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::config(
            path,
            "grid must be finite and strictly increasing",
        ));
    }
    Ok(())
}
