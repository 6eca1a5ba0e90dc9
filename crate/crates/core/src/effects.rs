//! Total/direct/indirect effect decomposition.
//!
//! The total effect comes from OLS of y on the first design (instrument in
//! the third block). The direct effect applies the same contrast to an
//! exactly identified IVE of y on the second design (mediator in the third
//! block), except for the baseline that treats the mediator as exogenous,
//! which fits the mediator-as-regressor design by OLS with its own contrast.
//! The indirect effect is the difference, and its variance comes from the
//! difference of the two influence-value vectors.

use alloc::vec::Vec;

use crate::data::Dataset;
use crate::design::{
    build_covariate_designs, build_exogenous_design, build_score_designs, DesignSet,
};
use crate::error::{Error, Result};
use crate::fit::{
    difference_standard_error, influence_standard_error, influence_values, ive_fit, ols_fit,
};
use crate::matrix::dot;
use crate::probit::probit_fit;

/// Estimator family for the direct-effect equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    /// Mediator treated as exogenous: OLS with the mediator as a regressor.
    OlsExog,
    /// Covariate-interacted IVE, instrumenting the mediator block with the
    /// instrument block.
    Ive1,
    /// Instrument-score IVE with quadratic score basis (order configurable).
    Ive2,
    /// Instrument-score IVE with cubic score basis (order configurable).
    Ive3,
}

impl Estimator {
    pub const ALL: [Estimator; 4] = [
        Estimator::OlsExog,
        Estimator::Ive1,
        Estimator::Ive2,
        Estimator::Ive3,
    ];

    /// Score-basis polynomial order used when none is supplied.
    pub fn default_order(self) -> Option<usize> {
        match self {
            Estimator::OlsExog | Estimator::Ive1 => None,
            Estimator::Ive2 => Some(2),
            Estimator::Ive3 => Some(3),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Estimator::OlsExog => "OLS",
            Estimator::Ive1 => "IVE1",
            Estimator::Ive2 => "IVE2",
            Estimator::Ive3 => "IVE3",
        }
    }
}

/// Which of the three effects, in reporting order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EffectKind {
    Total,
    Direct,
    Indirect,
}

impl EffectKind {
    pub const ALL: [EffectKind; 3] = [EffectKind::Total, EffectKind::Direct, EffectKind::Indirect];

    pub fn label(self) -> &'static str {
        match self {
            EffectKind::Total => "total",
            EffectKind::Direct => "direct",
            EffectKind::Indirect => "indirect",
        }
    }
}

/// Point estimate with its influence-value standard error.
#[derive(Debug, Clone, Copy)]
pub struct Effect {
    pub estimate: f64,
    pub se: f64,
    /// estimate / se, or 0 when `zero_se` (a perfect fit has no sampling
    /// noise to scale by, so ±∞ is avoided deliberately).
    pub t_value: f64,
    pub zero_se: bool,
}

impl Effect {
    fn new(estimate: f64, se: f64) -> Self {
        let zero_se = se == 0.0;
        let t_value = if zero_se { 0.0 } else { estimate / se };
        Self {
            estimate,
            se,
            t_value,
            zero_se,
        }
    }
}

/// Full decomposition output for one estimator on one sample.
#[derive(Debug, Clone)]
pub struct EffectEstimates {
    pub total: Effect,
    pub direct: Effect,
    pub indirect: Effect,
    pub estimator: Estimator,
    pub n: usize,
    /// Score-basis order; `None` for the covariate-based estimators.
    pub j: Option<usize>,
}

impl EffectEstimates {
    pub fn effect(&self, kind: EffectKind) -> &Effect {
        match kind {
            EffectKind::Total => &self.total,
            EffectKind::Direct => &self.direct,
            EffectKind::Indirect => &self.indirect,
        }
    }
}

/// Per-observation influence values behind the reported standard errors.
#[derive(Debug, Clone)]
pub struct InfluenceBundle {
    /// Total-effect influence values.
    pub lambda1: Vec<f64>,
    /// Direct-effect influence values; the indirect-effect variance is
    /// N⁻¹Σ(λ1ᵢ−λ2ᵢ)².
    pub lambda2: Vec<f64>,
}

fn check_mediator(data: &Dataset) -> Result<()> {
    if data.m.iter().all(|&v| v == data.m[0]) {
        return Err(Error::DegenerateMediator);
    }
    Ok(())
}

/// Core of the decomposition once the design set exists.
fn effects_from_designs(
    set: &DesignSet,
    data: &Dataset,
    estimator: Estimator,
    j: Option<usize>,
) -> Result<(EffectEstimates, InfluenceBundle)> {
    let fit1 = ols_fit(&set.q1, &data.y)?;
    let total_est = dot(&set.g, &fit1.coefficients);
    let lambda1 = influence_values(&set.g, &fit1.cross_moment_inverse, &set.q1, &fit1.residuals)?;

    let (direct_est, lambda2) = if estimator == Estimator::OlsExog {
        let ex = build_exogenous_design(data)?;
        let fit = ols_fit(&ex.q, &data.y)?;
        let lam = influence_values(&ex.g, &fit.cross_moment_inverse, &ex.q, &fit.residuals)?;
        (dot(&ex.g, &fit.coefficients), lam)
    } else {
        let fit = ive_fit(&set.q2, &set.p, &data.y)?;
        let lam = influence_values(&set.g, &fit.cross_moment_inverse, &set.p, &fit.residuals)?;
        (dot(&set.g, &fit.coefficients), lam)
    };

    let total = Effect::new(total_est, influence_standard_error(&lambda1));
    let direct = Effect::new(direct_est, influence_standard_error(&lambda2));
    let indirect = Effect::new(
        total_est - direct_est,
        difference_standard_error(&lambda1, &lambda2)?,
    );

    Ok((
        EffectEstimates {
            total,
            direct,
            indirect,
            estimator,
            n: data.n,
            j,
        },
        InfluenceBundle { lambda1, lambda2 },
    ))
}

/// Runs the decomposition for one estimator.
///
/// `order` overrides the score-basis polynomial order for the score
/// estimators and is ignored for the covariate-based ones.
pub fn decompose(data: &Dataset, estimator: Estimator, order: Option<usize>) -> Result<EffectEstimates> {
    decompose_with_influence(data, estimator, order).map(|(est, _)| est)
}

/// [`decompose`], also returning the influence values for variance auditing.
pub fn decompose_with_influence(
    data: &Dataset,
    estimator: Estimator,
    order: Option<usize>,
) -> Result<(EffectEstimates, InfluenceBundle)> {
    check_mediator(data)?;
    match estimator {
        Estimator::OlsExog | Estimator::Ive1 => {
            let set = build_covariate_designs(data)?;
            effects_from_designs(&set, data, estimator, None)
        }
        Estimator::Ive2 | Estimator::Ive3 => {
            let j = order.or(estimator.default_order()).unwrap_or(2);
            let theta = probit_fit(&data.x, &data.z)?.theta;
            let set = build_score_designs(data, &theta, j)?;
            effects_from_designs(&set, data, estimator, Some(j))
        }
    }
}

/// All four estimators on one sample, sharing the covariate designs and the
/// probit stage. Output order matches [`Estimator::ALL`].
pub fn decompose_all(data: &Dataset) -> Result<[EffectEstimates; 4]> {
    check_mediator(data)?;
    let cov = build_covariate_designs(data)?;
    let (ols_exog, _) = effects_from_designs(&cov, data, Estimator::OlsExog, None)?;
    let (ive1, _) = effects_from_designs(&cov, data, Estimator::Ive1, None)?;

    let theta = probit_fit(&data.x, &data.z)?.theta;
    let s2 = build_score_designs(data, &theta, 2)?;
    let (ive2, _) = effects_from_designs(&s2, data, Estimator::Ive2, Some(2))?;
    let s3 = build_score_designs(data, &theta, 3)?;
    let (ive3, _) = effects_from_designs(&s3, data, Estimator::Ive3, Some(3))?;

    Ok([ols_exog, ive1, ive2, ive3])
}

/// mean(y | d=1) − mean(y | d=0): the unconditional contrast the total
/// effect collapses to when covariates carry no weight.
pub fn group_mean_difference(data: &Dataset) -> Result<f64> {
    let (mut sum1, mut n1, mut sum0, mut n0) = (0.0, 0usize, 0.0, 0usize);
    for (yi, di) in data.y.iter().zip(&data.d) {
        if *di == 1.0 {
            sum1 += yi;
            n1 += 1;
        } else {
            sum0 += yi;
            n0 += 1;
        }
    }
    if n0 == 0 || n1 == 0 {
        return Err(Error::EmptyGroup);
    }
    Ok(sum1 / n1 as f64 - sum0 / n0 as f64)
}
