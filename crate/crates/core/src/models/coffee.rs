use crate::error::Result;

use super::{check_grid, Model};

/// Initial liquid temperature in degrees Celsius.
pub const DEFAULT_T0: f64 = 95.0;
/// Simulated horizon in minutes.
pub const DEFAULT_T_END: f64 = 200.0;
/// Number of 80 s steps over the horizon.
pub const DEFAULT_STEPS: usize = 150;

/// Closed-form solution of `dT/dt = -kappa (T - T_env)`, `T(0) = t0`.
///
/// `kappa` is in 1/min and the grid in minutes. Negative `kappa` is
/// evaluated as-is (exponential growth) rather than clipped.
pub fn coffee_cup(t_grid: &[f64], kappa: f64, t_env: f64, t0: f64) -> Vec<f64> {
    t_grid
        .iter()
        .map(|&t| t_env + (t0 - t_env) * (-kappa * t).exp())
        .collect()
}

/// Coffee-cup model over a fixed grid; parameters are `(kappa, T_env)`.
#[derive(Debug, Clone)]
pub struct CoffeeCup {
    grid: Vec<f64>,
    t0: f64,
}

impl CoffeeCup {
    pub fn new(grid: Vec<f64>, t0: f64) -> Result<Self> {
        check_grid(&grid, "model.time_grid")?;
        Ok(Self { grid, t0 })
    }

    /// 150 steps of 80 s over 200 minutes, starting at 95 C.
    pub fn reference_setup() -> Self {
        Self {
            grid: super::uniform_grid(DEFAULT_T_END, DEFAULT_STEPS).expect("valid default grid"),
            t0: DEFAULT_T0,
        }
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }
}

impl Model for CoffeeCup {
    fn name(&self) -> &str {
        "coffee_cup"
    }

    fn output_grid(&self) -> &[f64] {
        &self.grid
    }

    fn evaluate(&self, q: &[f64]) -> Result<Vec<f64>> {
        if q.len() != 2 {
            return Err(crate::Error::DimensionMismatch {
                expected: 2,
                found: q.len(),
            });
        }
        Ok(coffee_cup(&self.grid, q[0], q[1], self.t0))
    }
}
