//! Regressor/instrument matrix construction for the two outcome equations.
//!
//! Both equations interact a per-unit basis with treatment, instrument, and
//! mediator indicators. The basis is either the raw covariate row Xᵢ or the
//! power row (1, sᵢ, …, sᵢ^J) of the fitted instrument-score index
//! sᵢ = Xᵢ′θ̂. Block order is fixed and documented on [`DesignSet`].

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::matrix::{dot, Matrix};

/// Design matrices and the effect contrast for one estimator family.
///
/// Column blocks, in order, with `b` the basis row:
/// `q1` = (b, b·D, b·Z, b·D·Z), `q2` = (b, b·D, b·M, b·D·Z), `p` = `q1`.
/// The contrast `g` zeros the first and third blocks and places the sample
/// means of `b` and `b·Z` on the second and fourth, so `g·coefficients` is the
/// treatment contrast averaged over the sample.
#[derive(Debug, Clone)]
pub struct DesignSet {
    /// Total-effect regressors.
    pub q1: Matrix,
    /// Direct-effect regressors (mediator in the third block).
    pub q2: Matrix,
    /// Instruments; identical to `q1`.
    pub p: Matrix,
    /// Effect contrast row, length = 4 × basis width.
    pub g: Vec<f64>,
    /// Per-column names; the third block is labelled `*m` after `q2`,
    /// where `q1`/`p` carry the instrument instead.
    pub labels: Vec<String>,
}

/// Verifies every (D,Z) cell is occupied; a missing cell means the
/// interaction columns cannot be identified.
fn check_cells(data: &Dataset) -> Result<()> {
    let mut counts = [[0usize; 2]; 2];
    for i in 0..data.n {
        counts[data.d[i] as usize][data.z[i] as usize] += 1;
    }
    for d in 0..2 {
        for z in 0..2 {
            if counts[d][z] == 0 {
                return Err(Error::EmptyCell {
                    d: d as u8,
                    z: z as u8,
                });
            }
        }
    }
    Ok(())
}

/// Interacts a basis matrix (one row per unit) with D, Z, M to produce the
/// full design set.
fn assemble(basis: &Matrix, data: &Dataset, labels: Vec<String>) -> DesignSet {
    let n = data.n;
    let k = basis.cols();
    let cols = 4 * k;
    let mut q1 = Matrix::zeros(n, cols);
    let mut q2 = Matrix::zeros(n, cols);
    let mut g = vec![0.0; cols];

    for i in 0..n {
        let (d, z, m) = (data.d[i], data.z[i], data.m[i]);
        let b = basis.row(i);
        let dz = d * z;
        {
            let r1 = q1.row_mut(i);
            for (j, &bj) in b.iter().enumerate() {
                r1[j] = bj;
                r1[k + j] = bj * d;
                r1[2 * k + j] = bj * z;
                r1[3 * k + j] = bj * dz;
            }
        }
        let r2 = q2.row_mut(i);
        for (j, &bj) in b.iter().enumerate() {
            r2[j] = bj;
            r2[k + j] = bj * d;
            r2[2 * k + j] = bj * m;
            r2[3 * k + j] = bj * dz;
        }
        for (j, &bj) in b.iter().enumerate() {
            g[k + j] += bj;
            g[3 * k + j] += bj * z;
        }
    }
    let nf = n as f64;
    for j in 0..k {
        g[k + j] /= nf;
        g[3 * k + j] /= nf;
    }

    let p = q1.clone();
    DesignSet { q1, q2, p, g, labels }
}

/// Covariate-interacted designs: basis = the raw covariate row Xᵢ.
pub fn build_covariate_designs(data: &Dataset) -> Result<DesignSet> {
    check_cells(data)?;
    let k = data.x.cols();
    let mut labels = Vec::with_capacity(4 * k);
    for suffix in ["", "*d", "*m", "*d*z"] {
        for j in 0..k {
            labels.push(format!("x{j}{suffix}"));
        }
    }
    Ok(assemble(&data.x, data, labels))
}

/// Mediator-as-regressor design for the baseline that treats the mediator as
/// exogenous: blocks (X, X·D, X·M, X·D·M) and a direct-effect contrast.
#[derive(Debug, Clone)]
pub struct ExogenousDesign {
    /// Regressors (X, X·D, X·M, X·D·M).
    pub q: Matrix,
    /// Contrast (0, X̄, 0, treated-group mean of X·M). The interaction block
    /// is weighted by the mediator exposure among treated units, which — with
    /// randomized treatment — estimates the mediator level under treatment.
    pub g: Vec<f64>,
    /// Per-column names.
    pub labels: Vec<String>,
}

/// Builds the exogenous-mediator baseline design and its contrast.
///
/// Requires a non-empty treated group for the contrast; rank problems in the
/// mediator columns surface at the fitting stage instead.
pub fn build_exogenous_design(data: &Dataset) -> Result<ExogenousDesign> {
    let n = data.n;
    let k = data.x.cols();
    let cols = 4 * k;
    let mut q = Matrix::zeros(n, cols);
    let mut g = vec![0.0; cols];
    let mut treated = 0.0;

    for i in 0..n {
        let (d, m) = (data.d[i], data.m[i]);
        let b = data.x.row(i);
        let row = q.row_mut(i);
        for (j, &bj) in b.iter().enumerate() {
            row[j] = bj;
            row[k + j] = bj * d;
            row[2 * k + j] = bj * m;
            row[3 * k + j] = bj * d * m;
        }
        for (j, &bj) in b.iter().enumerate() {
            g[k + j] += bj;
            if d == 1.0 {
                g[3 * k + j] += bj * m;
            }
        }
        treated += d;
    }
    if treated == 0.0 {
        return Err(Error::EmptyGroup);
    }
    for j in 0..k {
        g[k + j] /= n as f64;
        g[3 * k + j] /= treated;
    }

    let mut labels = Vec::with_capacity(cols);
    for suffix in ["", "*d", "*m", "*d*m"] {
        for j in 0..k {
            labels.push(format!("x{j}{suffix}"));
        }
    }
    Ok(ExogenousDesign { q, g, labels })
}

/// Instrument-score designs: basis = (1, sᵢ, sᵢ², …, sᵢ^J) with sᵢ = Xᵢ′θ.
///
/// A constant score (e.g. θ with only an intercept) makes the power basis
/// rank deficient; the builder still emits the matrices and leaves the
/// singularity to the fitting stage.
pub fn build_score_designs(data: &Dataset, theta: &[f64], j: usize) -> Result<DesignSet> {
    if !(1..=3).contains(&j) {
        return Err(Error::Validation("score polynomial order must be 1, 2, or 3"));
    }
    if theta.len() != data.x.cols() {
        return Err(Error::DimensionMismatch("theta length must equal covariate count"));
    }
    check_cells(data)?;

    let width = j + 1;
    let mut basis = Matrix::zeros(data.n, width);
    for i in 0..data.n {
        let s = dot(data.x.row(i), theta);
        let row = basis.row_mut(i);
        let mut pow = 1.0;
        for cell in row.iter_mut() {
            *cell = pow;
            pow *= s;
        }
    }

    let mut labels = Vec::with_capacity(4 * width);
    for suffix in ["", "*d", "*m", "*d*z"] {
        for t in 0..width {
            labels.push(format!("s^{t}{suffix}"));
        }
    }
    Ok(assemble(&basis, data, labels))
}
