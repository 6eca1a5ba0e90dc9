//! The observed-sample container shared by every estimator.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// One analysis sample: outcome, binary treatment, binary mediator, binary
/// instrument, and a covariate matrix whose first column is the constant 1.
#[derive(Debug, Clone)]
pub struct Dataset {
    /// Outcome; may be continuous, binary, or a count.
    pub y: Vec<f64>,
    /// Treatment indicator, 0/1.
    pub d: Vec<f64>,
    /// Mediator indicator, 0/1.
    pub m: Vec<f64>,
    /// Instrument indicator, 0/1.
    pub z: Vec<f64>,
    /// Covariates, n × k, first column identically 1.
    pub x: Matrix,
    /// Sample size.
    pub n: usize,
}

impl Dataset {
    /// Validates lengths, binariness of d/m/z, finiteness, and the intercept
    /// column, then assembles the sample.
    pub fn new(y: Vec<f64>, d: Vec<f64>, m: Vec<f64>, z: Vec<f64>, x: Matrix) -> Result<Self> {
        let n = x.rows();
        if y.len() != n || d.len() != n || m.len() != n || z.len() != n {
            return Err(Error::DimensionMismatch("column lengths must all equal x rows"));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("outcome must be finite"));
        }
        for (name, col) in [("treatment", &d), ("mediator", &m), ("instrument", &z)] {
            if col.iter().any(|&v| v != 0.0 && v != 1.0) {
                let _ = name;
                return Err(Error::Validation("treatment/mediator/instrument must be 0 or 1"));
            }
        }
        if (0..n).any(|i| x.get(i, 0) != 1.0) {
            return Err(Error::Validation("first covariate column must be the constant 1"));
        }
        Ok(Self { y, d, m, z, x, n })
    }
}
