//! Two-way effect decomposition (total = direct + indirect) for outcomes of
//! any form when the binary mediator may be endogenous.
//!
//! The total effect of a binary treatment comes from OLS of the outcome on
//! covariate blocks interacted with treatment and a binary instrument; the
//! direct effect applies the same contrast to a second equation in which the
//! mediator block is instrumented. Their difference is the indirect
//! (mediated) effect. Two refinements replace raw covariates with powers of a
//! probit instrument-score index. Standard errors come from per-observation
//! influence values.
//!
//! The crate is `no_std` (with `alloc`): estimation, design construction,
//! decomposition, and the Monte Carlo engine have no OS dependencies.
//! File formats, parallel drivers, and the CLI live in the companion `mediv`
//! crate.

#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod data;
pub mod design;
pub mod effects;
pub mod error;
pub mod fit;
pub mod matrix;
pub mod normal;
pub mod probit;
pub mod sim;

pub use data::Dataset;
pub use design::{
    build_covariate_designs, build_exogenous_design, build_score_designs, DesignSet,
    ExogenousDesign,
};
pub use effects::{
    decompose, decompose_all, decompose_with_influence, group_mean_difference, Effect,
    EffectEstimates, EffectKind, Estimator, InfluenceBundle,
};
pub use error::{Error, Result};
pub use fit::{
    difference_standard_error, influence_standard_error, influence_values, ive_fit, ols_fit,
    FitResult,
};
pub use matrix::{Matrix, RCOND_MIN};
pub use normal::{log_normal_cdf, mills_ratio, normal_cdf, normal_pdf};
pub use probit::{probit_fit, ProbitFit};
pub use sim::{
    aggregate_report, draw_unit, generate_replication, replication_rng, run_monte_carlo,
    run_replication, true_effects, unit_potentials, CellStats, DgpCoefficients, EffectTriple,
    EstimateSe, MediatorMode, OutcomeForm, PotentialTables, ReplicationRecord, SimulationDesign,
    SimulationReport, UnitDraw, UnitPotentials,
};
