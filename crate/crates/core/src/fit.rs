//! Ordinary least squares and exactly identified instrumental-variable
//! estimation, plus the influence values that carry their sampling variance.
//!
//! Both estimators solve a k×k cross-moment system. Writing the IVE slope as
//! b = (N⁻¹ Σ Pᵢ Qᵢ′)⁻¹ · N⁻¹ Σ Pᵢ yᵢ keeps one code path for standard
//! errors: OLS is the special case P = Q.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::{back_substitute, dot, gram_from_r, invert_checked, qr_reduce, Matrix};

/// Output of [`ols_fit`] / [`ive_fit`].
#[derive(Debug, Clone)]
pub struct FitResult {
    /// Slope vector b, one entry per design column.
    pub coefficients: Vec<f64>,
    /// ûᵢ = yᵢ − Qᵢ′b.
    pub residuals: Vec<f64>,
    /// (N⁻¹ Σ Pᵢ Qᵢ′)⁻¹, the inverse average cross moment of instruments and
    /// regressors (P = Q for OLS). Feeds influence-value construction.
    pub cross_moment_inverse: Matrix,
}

/// Least squares of `y` on the columns of `design`, via Householder QR.
///
/// The Gram matrix is rebuilt from the triangular factor and inverted with an
/// explicit condition check, so a design that is numerically rank deficient
/// surfaces as `SingularDesign` instead of an arbitrarily amplified solve.
pub fn ols_fit(design: &Matrix, y: &[f64]) -> Result<FitResult> {
    let (r, qty) = qr_reduce(design, y)?;
    let gram = gram_from_r(&r, design.rows());
    let cross_moment_inverse = invert_checked(&gram)?;
    let coefficients = back_substitute(&r, &qty)?;
    let fitted = design.matvec(&coefficients)?;
    let residuals = y.iter().zip(&fitted).map(|(yi, fi)| yi - fi).collect();
    Ok(FitResult {
        coefficients,
        residuals,
        cross_moment_inverse,
    })
}

/// Exactly identified instrumental-variable estimator: regressors `design`,
/// one instrument column per regressor column.
///
/// b = (N⁻¹ Σ Pᵢ Qᵢ′)⁻¹ (N⁻¹ Σ Pᵢ yᵢ); residuals are formed against the
/// regressors, not the instruments.
pub fn ive_fit(design: &Matrix, instruments: &Matrix, y: &[f64]) -> Result<FitResult> {
    if design.cols() != instruments.cols() {
        return Err(Error::DimensionMismatch(
            "instrument count must equal regressor count",
        ));
    }
    if design.rows() != instruments.rows() {
        return Err(Error::DimensionMismatch("design and instrument row counts"));
    }
    if y.len() != design.rows() {
        return Err(Error::DimensionMismatch("response length"));
    }
    let a = instruments.cross_moment(design)?;
    let cross_moment_inverse = invert_checked(&a)?;
    let moment = instruments.mean_weighted_rows(y)?;
    let coefficients = cross_moment_inverse.matvec(&moment)?;
    let fitted = design.matvec(&coefficients)?;
    let residuals = y.iter().zip(&fitted).map(|(yi, fi)| yi - fi).collect();
    Ok(FitResult {
        coefficients,
        residuals,
        cross_moment_inverse,
    })
}

/// Per-observation influence values λᵢ = g′ (N⁻¹ Σ Pᵢ Qᵢ′)⁻¹ Pᵢ ûᵢ of the
/// linear contrast g′b.
///
/// √N (g′b̂ − g′b) is asymptotically normal with variance E[λ²], so the plug-in
/// standard error of the contrast is [`influence_standard_error`].
pub fn influence_values(
    contrast: &[f64],
    cross_moment_inverse: &Matrix,
    instruments: &Matrix,
    residuals: &[f64],
) -> Result<Vec<f64>> {
    let k = cross_moment_inverse.cols();
    if contrast.len() != k || instruments.cols() != k {
        return Err(Error::DimensionMismatch("contrast length"));
    }
    if residuals.len() != instruments.rows() {
        return Err(Error::DimensionMismatch("residual count"));
    }
    // w′ = g′ A⁻¹, folded once so each observation costs one dot product.
    let mut w = Vec::with_capacity(k);
    for j in 0..k {
        let mut acc = 0.0;
        for (i, gi) in contrast.iter().enumerate() {
            acc += gi * cross_moment_inverse.get(i, j);
        }
        w.push(acc);
    }
    Ok(residuals
        .iter()
        .enumerate()
        .map(|(i, u)| dot(&w, instruments.row(i)) * u)
        .collect())
}

/// √(Σᵢ λᵢ²) / N: standard error of a contrast from its influence values.
pub fn influence_standard_error(lambda: &[f64]) -> f64 {
    let n = lambda.len() as f64;
    libm::sqrt(lambda.iter().map(|l| l * l).sum::<f64>()) / n
}

/// Standard error of the difference of two contrasts sharing the same sample,
/// from the elementwise difference of their influence values.
pub fn difference_standard_error(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch("influence vector lengths"));
    }
    let n = a.len() as f64;
    let ss: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok(libm::sqrt(ss) / n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn toy_design() -> (Matrix, Vec<f64>) {
        // y = 2 + 3*x with noise pattern chosen to be orthogonal to nothing.
        let design = Matrix::new(
            5,
            2,
            vec![1.0, 0.0, 1.0, 1.0, 1.0, 2.0, 1.0, 3.0, 1.0, 4.0],
        )
        .unwrap();
        let y = vec![2.1, 4.9, 8.2, 10.8, 14.0];
        (design, y)
    }

    #[test]
    fn ols_normal_equations_hold() {
        let (design, y) = toy_design();
        let fit = ols_fit(&design, &y).unwrap();
        // Q'u = 0 for each column.
        for j in 0..design.cols() {
            let mut acc = 0.0;
            for i in 0..design.rows() {
                acc += design.get(i, j) * fit.residuals[i];
            }
            assert!(acc.abs() < 1e-12, "column {j} not orthogonal: {acc}");
        }
    }

    #[test]
    fn ive_with_self_instruments_is_ols() {
        let (design, y) = toy_design();
        let ols = ols_fit(&design, &y).unwrap();
        let ive = ive_fit(&design, &design, &y).unwrap();
        for (a, b) in ols.coefficients.iter().zip(&ive.coefficients) {
            assert!((a - b).abs() < 1e-12);
        }
        for i in 0..design.cols() {
            for j in 0..design.cols() {
                assert!(
                    (ols.cross_moment_inverse.get(i, j) - ive.cross_moment_inverse.get(i, j))
                        .abs()
                        < 1e-9
                );
            }
        }
    }

    #[test]
    fn influence_se_matches_direct_sandwich() {
        let (design, y) = toy_design();
        let fit = ols_fit(&design, &y).unwrap();
        let g = vec![0.0, 1.0]; // slope coefficient
        let lambda =
            influence_values(&g, &fit.cross_moment_inverse, &design, &fit.residuals).unwrap();
        let se = influence_standard_error(&lambda);

        // Direct heteroskedasticity-robust variance of the slope:
        // N⁻¹ g' A⁻¹ (N⁻¹ Σ u² q q') A⁻¹ g with A = N⁻¹ Σ q q'.
        let n = design.rows();
        let mut meat = Matrix::zeros(2, 2);
        for i in 0..n {
            let u2 = fit.residuals[i] * fit.residuals[i];
            for a in 0..2 {
                for b in 0..2 {
                    let v = meat.get(a, b) + u2 * design.get(i, a) * design.get(i, b);
                    meat.set(a, b, v);
                }
            }
        }
        for a in 0..2 {
            for b in 0..2 {
                let v = meat.get(a, b) / n as f64;
                meat.set(a, b, v);
            }
        }
        let ainv = &fit.cross_moment_inverse;
        // v = A⁻¹ g  (A is symmetric here)
        let v = ainv.matvec(&g).unwrap();
        let mut var = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                var += v[a] * meat.get(a, b) * v[b];
            }
        }
        let direct = libm::sqrt(var / n as f64);
        assert!((se - direct).abs() < 1e-12, "{se} vs {direct}");
    }

    #[test]
    fn collinear_design_is_rejected() {
        let design = Matrix::new(4, 2, vec![1.0, 2.0, 1.0, 2.0, 1.0, 2.0, 1.0, 2.0]).unwrap();
        let y = vec![1.0, 2.0, 3.0, 4.0];
        assert!(matches!(
            ols_fit(&design, &y),
            Err(Error::SingularDesign { .. })
        ));
    }
}
