//! Closed-form test models with known Sobol indices.

use crate::error::{Error, Result};

use super::Model;

/// `sum_i c_i x_i`.
pub fn linear_model(coefficients: &[f64], x: &[f64]) -> f64 {
    coefficients.iter().zip(x).map(|(c, v)| c * v).sum()
}

#[derive(Debug, Clone)]
pub struct LinearModel {
    coefficients: Vec<f64>,
    grid: Vec<f64>,
}

impl LinearModel {
    pub fn new(coefficients: Vec<f64>, outputs: usize) -> Self {
        Self {
            coefficients,
            grid: (0..outputs.max(1)).map(|k| k as f64).collect(),
        }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }
}

impl Model for LinearModel {
    fn name(&self) -> &str {
        "linear"
    }

    fn output_grid(&self) -> &[f64] {
        &self.grid
    }

    fn evaluate(&self, q: &[f64]) -> Result<Vec<f64>> {
        if q.len() != self.coefficients.len() {
            return Err(Error::DimensionMismatch {
                expected: self.coefficients.len(),
                found: q.len(),
            });
        }
        Ok(vec![linear_model(&self.coefficients, q); self.grid.len()])
    }
}

/// `scale * prod_i x_i`, a pure interaction model.
#[derive(Debug, Clone)]
pub struct ProductModel {
    scale: f64,
    grid: Vec<f64>,
}

impl ProductModel {
    pub fn new(scale: f64, outputs: usize) -> Self {
        Self {
            scale,
            grid: (0..outputs.max(1)).map(|k| k as f64).collect(),
        }
    }
}

impl Model for ProductModel {
    fn name(&self) -> &str {
        "product"
    }

    fn output_grid(&self) -> &[f64] {
        &self.grid
    }

    fn evaluate(&self, q: &[f64]) -> Result<Vec<f64>> {
        Ok(vec![
            self.scale * q.iter().product::<f64>();
            self.grid.len()
        ])
    }
}
