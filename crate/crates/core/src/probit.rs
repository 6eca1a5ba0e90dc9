//! Probit regression by Fisher-scoring Newton steps with step halving.
//!
//! Fits θ maximizing Σᵢ zᵢ ln Φ(Xᵢ′θ) + (1−zᵢ) ln Φ(−Xᵢ′θ). The score and
//! expected information are assembled from inverse Mills ratios, which stay
//! finite deep in the tails where Φ itself underflows.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::{dot, invert_checked, Matrix};
use crate::normal::{log_normal_cdf, mills_ratio};

/// Convergence tolerance on the score ∞-norm.
const GRADIENT_TOL: f64 = 1e-8;
/// Newton iteration cap.
const MAX_ITERATIONS: usize = 100;
/// Halvings attempted before declaring the line search stuck.
const MAX_HALVINGS: usize = 60;
/// ‖θ‖₂ beyond this is taken as a diverging index, i.e. (quasi-)separation.
const SEPARATION_NORM: f64 = 1e4;

/// Converged probit estimate.
#[derive(Debug, Clone)]
pub struct ProbitFit {
    /// Index coefficients, intercept first.
    pub theta: Vec<f64>,
    pub converged: bool,
    /// Newton updates taken.
    pub iterations: usize,
    /// Score ∞-norm at the returned θ.
    pub final_gradient_norm: f64,
}

/// Maximum-likelihood probit of a binary `z` on the columns of `x`
/// (intercept column included by the caller).
pub fn probit_fit(x: &Matrix, z: &[f64]) -> Result<ProbitFit> {
    probit_fit_traced(x, z, &mut Vec::new())
}

/// Same as [`probit_fit`] but records the log-likelihood after each accepted
/// step, so tests can assert the ascent property directly.
pub(crate) fn probit_fit_traced(
    x: &Matrix,
    z: &[f64],
    ll_trace: &mut Vec<f64>,
) -> Result<ProbitFit> {
    let n = x.rows();
    let k = x.cols();
    if z.len() != n {
        return Err(Error::DimensionMismatch("response length"));
    }
    if n <= k {
        return Err(Error::Validation("probit needs more rows than coefficients"));
    }
    if z.iter().any(|&v| v != 0.0 && v != 1.0) {
        return Err(Error::Validation("probit response must be 0/1"));
    }
    if z.iter().all(|&v| v == z[0]) {
        return Err(Error::DegenerateResponse);
    }

    let mut theta = vec![0.0; k];
    let mut ll = log_likelihood(x, z, &theta);
    ll_trace.push(ll);

    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        let (grad, info) = score_and_information(x, z, &theta);
        let gnorm = inf_norm(&grad);
        if gnorm <= GRADIENT_TOL {
            return Ok(ProbitFit {
                theta,
                converged: true,
                iterations,
                final_gradient_norm: gnorm,
            });
        }

        let info_inv = invert_checked(&info)?;
        let step = info_inv.matvec(&grad)?;

        // Near the optimum the true likelihood gain (~g²/2I) drops below one
        // ulp of ll, so demand nondecrease only up to float noise; otherwise
        // rounding can reject the final Newton step forever.
        let slack = (1.0 + ll.abs()) * 1e-13;
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let candidate: Vec<f64> = theta
                .iter()
                .zip(&step)
                .map(|(t, s)| t + scale * s)
                .collect();
            let cand_ll = log_likelihood(x, z, &candidate);
            if cand_ll.is_finite() && cand_ll >= ll - slack {
                theta = candidate;
                ll = cand_ll;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        iterations += 1;
        if !accepted {
            return Err(Error::NotConverged {
                iterations,
                gradient_norm: gnorm,
            });
        }
        ll_trace.push(ll);

        let theta_norm = libm::sqrt(theta.iter().map(|t| t * t).sum::<f64>());
        if theta_norm > SEPARATION_NORM {
            return Err(Error::SeparationDetected);
        }
    }

    let (grad, _) = score_and_information(x, z, &theta);
    let gnorm = inf_norm(&grad);
    if gnorm <= GRADIENT_TOL {
        return Ok(ProbitFit {
            theta,
            converged: true,
            iterations,
            final_gradient_norm: gnorm,
        });
    }
    Err(Error::NotConverged {
        iterations,
        gradient_norm: gnorm,
    })
}

/// Σᵢ zᵢ ln Φ(sᵢ) + (1−zᵢ) ln Φ(−sᵢ) at the given θ.
pub fn log_likelihood(x: &Matrix, z: &[f64], theta: &[f64]) -> f64 {
    let mut ll = 0.0;
    for (i, &zi) in z.iter().enumerate() {
        let s = dot(x.row(i), theta);
        ll += if zi == 1.0 {
            log_normal_cdf(s)
        } else {
            log_normal_cdf(-s)
        };
    }
    ll
}

/// Score vector and Fisher information at θ.
///
/// Per observation the score is [z·m(s) − (1−z)·m(−s)]·X with m the inverse
/// Mills ratio, and the information weight is m(s)·m(−s) = φ²/(Φ(1−Φ)).
pub fn score_and_information(x: &Matrix, z: &[f64], theta: &[f64]) -> (Vec<f64>, Matrix) {
    let k = x.cols();
    let mut grad = vec![0.0; k];
    let mut info = Matrix::zeros(k, k);
    for (i, &zi) in z.iter().enumerate() {
        let row = x.row(i);
        let s = dot(row, theta);
        let score_i = if zi == 1.0 {
            mills_ratio(s)
        } else {
            -mills_ratio(-s)
        };
        let weight = mills_ratio(s) * mills_ratio(-s);
        for (a, &xa) in row.iter().enumerate() {
            grad[a] += score_i * xa;
            for (b, &xb) in row.iter().enumerate() {
                let v = info.get(a, b) + weight * xa * xb;
                info.set(a, b, v);
            }
        }
    }
    (grad, info)
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}
