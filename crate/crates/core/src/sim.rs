//! Synthetic data generation with full potential-outcome bookkeeping, truth
//! computation, and the Monte Carlo driver comparing all four estimators.
//!
//! Every unit carries its complete table of potential mediators M^{dz} and
//! potential outcomes Y^{dm}, generated from shared errors, so true effects
//! are computable exactly per replication. Replications draw from
//! counter-based RNG streams keyed by replication index, making results
//! independent of execution order and worker count.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::data::Dataset;
use crate::effects::{decompose_all, EffectKind};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Whether the observed outcome is the latent index or its thresholding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutcomeForm {
    Continuous,
    Binary,
}

impl OutcomeForm {
    pub fn label(self) -> &'static str {
        match self {
            OutcomeForm::Continuous => "continuous",
            OutcomeForm::Binary => "binary",
        }
    }
}

/// Whether the mediator equation's error enters the outcome error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MediatorMode {
    Exogenous,
    Endogenous,
}

impl MediatorMode {
    pub fn label(self) -> &'static str {
        match self {
            MediatorMode::Exogenous => "exogenous",
            MediatorMode::Endogenous => "endogenous",
        }
    }
}

/// Structural coefficients of the three equations plus the treatment share.
#[derive(Debug, Clone, Copy)]
pub struct DgpCoefficients {
    /// Instrument equation Z = 1[0 < θ₁ + θₓ·X₀ + e].
    pub theta1: f64,
    pub theta_x: f64,
    /// Mediator equation M^{dz} = 1[0.5 < α₁ + α_d·d + α_z·z + αₓ·X₀ + ε].
    pub alpha1: f64,
    pub alpha_d: f64,
    pub alpha_z: f64,
    pub alpha_x: f64,
    /// Outcome index Y^{dm*} = β₀ + β_d·d + β_m·m + β_dm·d·m + βₓ·X₀ + U.
    pub beta0: f64,
    pub beta_d: f64,
    pub beta_m: f64,
    pub beta_dm: f64,
    pub beta_x: f64,
    /// P(D = 1); treatment is randomized independently of everything.
    pub p_treat: f64,
}

impl Default for DgpCoefficients {
    fn default() -> Self {
        Self {
            theta1: 0.0,
            theta_x: 1.0,
            alpha1: 0.0,
            alpha_d: 1.0,
            alpha_z: 1.0,
            alpha_x: 1.0,
            beta0: 0.0,
            beta_d: 0.5,
            beta_m: 1.0,
            beta_dm: 0.5,
            beta_x: 1.0,
            p_treat: 0.5,
        }
    }
}

/// One Monte Carlo configuration.
#[derive(Debug, Clone, Copy)]
pub struct SimulationDesign {
    pub outcome: OutcomeForm,
    pub mediator: MediatorMode,
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    pub coefficients: DgpCoefficients,
}

/// Widest design the estimators build: score order 3 → 4·(3+1) columns.
const MAX_DESIGN_COLS: usize = 16;
/// Redraw budget per replication before giving up.
const MAX_REDRAWS_PER_REP: u32 = 10;

impl SimulationDesign {
    /// Configuration with the default structural coefficients.
    pub fn new(
        outcome: OutcomeForm,
        mediator: MediatorMode,
        n: usize,
        reps: usize,
        seed: u64,
    ) -> Self {
        Self {
            outcome,
            mediator,
            n,
            reps,
            seed,
            coefficients: DgpCoefficients::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 4 * MAX_DESIGN_COLS {
            return Err(Error::Validation("sample size must be at least 4x the widest design"));
        }
        if self.reps == 0 {
            return Err(Error::Validation("replication count must be positive"));
        }
        let c = &self.coefficients;
        if !(c.p_treat > 0.0 && c.p_treat < 1.0) {
            return Err(Error::Validation("treatment probability must lie in (0,1)"));
        }
        let all = [
            c.theta1, c.theta_x, c.alpha1, c.alpha_d, c.alpha_z, c.alpha_x, c.beta0, c.beta_d,
            c.beta_m, c.beta_dm, c.beta_x,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("structural coefficients must be finite"));
        }
        Ok(())
    }
}

/// Raw per-unit randomness, in draw order.
#[derive(Debug, Clone, Copy)]
pub struct UnitDraw {
    /// Covariate.
    pub x0: f64,
    /// Instrument-equation error.
    pub e: f64,
    /// Mediator-equation error.
    pub eps: f64,
    /// Outcome-error component independent of ε.
    pub u0: f64,
    /// Treatment indicator.
    pub d: f64,
}

impl UnitDraw {
    /// Outcome error: u₀ alone, or the standardized sum (u₀+ε)/√2 that ties
    /// the mediator to the outcome equation.
    pub fn outcome_error(&self, mode: MediatorMode) -> f64 {
        match mode {
            MediatorMode::Exogenous => self.u0,
            MediatorMode::Endogenous => (self.u0 + self.eps) / core::f64::consts::SQRT_2,
        }
    }
}

/// Draws one unit's randomness. Order is fixed (x₀, e, ε, u₀, D) and part of
/// the determinism contract.
pub fn draw_unit<R: Rng + ?Sized>(rng: &mut R, p_treat: f64) -> UnitDraw {
    let x0: f64 = rng.sample(StandardNormal);
    let e: f64 = rng.sample(StandardNormal);
    let eps: f64 = rng.sample(StandardNormal);
    let u0: f64 = rng.sample(StandardNormal);
    let d = if rng.random_bool(p_treat) { 1.0 } else { 0.0 };
    UnitDraw { x0, e, eps, u0, d }
}

/// One unit's realized instrument and full potential tables.
#[derive(Debug, Clone, Copy)]
pub struct UnitPotentials {
    pub z: f64,
    /// Potential mediators, indexed `m[d][z]`.
    pub m: [[f64; 2]; 2],
    /// Potential outcomes, indexed `y[d][m]`.
    pub y: [[f64; 2]; 2],
}

/// Evaluates the structural equations at every (d,z) and (d,m) combination
/// with the unit's shared errors.
pub fn unit_potentials(
    draw: &UnitDraw,
    outcome: OutcomeForm,
    mediator: MediatorMode,
    coef: &DgpCoefficients,
) -> UnitPotentials {
    let z = if coef.theta1 + coef.theta_x * draw.x0 + draw.e > 0.0 {
        1.0
    } else {
        0.0
    };

    let mut m = [[0.0; 2]; 2];
    for (di, row) in m.iter_mut().enumerate() {
        for (zi, cell) in row.iter_mut().enumerate() {
            let index = coef.alpha1
                + coef.alpha_d * di as f64
                + coef.alpha_z * zi as f64
                + coef.alpha_x * draw.x0
                + draw.eps;
            *cell = if index > 0.5 { 1.0 } else { 0.0 };
        }
    }

    let u = draw.outcome_error(mediator);
    let mut y = [[0.0; 2]; 2];
    for (di, row) in y.iter_mut().enumerate() {
        for (mi, cell) in row.iter_mut().enumerate() {
            let latent = coef.beta0
                + coef.beta_d * di as f64
                + coef.beta_m * mi as f64
                + coef.beta_dm * (di * mi) as f64
                + coef.beta_x * draw.x0
                + u;
            *cell = match outcome {
                OutcomeForm::Continuous => latent,
                OutcomeForm::Binary => {
                    if latent > 0.5 {
                        1.0
                    } else {
                        0.0
                    }
                }
            };
        }
    }

    UnitPotentials { z, m, y }
}

/// Per-unit potential tables for a whole replication.
#[derive(Debug, Clone)]
pub struct PotentialTables {
    pub m00: Vec<f64>,
    pub m01: Vec<f64>,
    pub m10: Vec<f64>,
    pub m11: Vec<f64>,
    pub y00: Vec<f64>,
    pub y01: Vec<f64>,
    pub y10: Vec<f64>,
    pub y11: Vec<f64>,
}

impl PotentialTables {
    fn with_capacity(n: usize) -> Self {
        Self {
            m00: Vec::with_capacity(n),
            m01: Vec::with_capacity(n),
            m10: Vec::with_capacity(n),
            m11: Vec::with_capacity(n),
            y00: Vec::with_capacity(n),
            y01: Vec::with_capacity(n),
            y10: Vec::with_capacity(n),
            y11: Vec::with_capacity(n),
        }
    }

    pub fn len(&self) -> usize {
        self.m00.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m00.is_empty()
    }

    /// ΔY^± = Y¹¹ − Y⁰¹ − Y¹⁰ + Y⁰⁰ for unit `i`.
    pub fn delta_y_pm(&self, i: usize) -> f64 {
        self.y11[i] - self.y01[i] - self.y10[i] + self.y00[i]
    }

    /// ΔM^± = M¹¹ − M⁰¹ − M¹⁰ + M⁰⁰ for unit `i`.
    pub fn delta_m_pm(&self, i: usize) -> f64 {
        self.m11[i] - self.m01[i] - self.m10[i] + self.m00[i]
    }
}

/// Deterministic per-replication RNG: one seed, one counter-based stream per
/// (replication, attempt) pair.
pub fn replication_rng(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Generates one replication's observed sample and its potential tables.
///
/// Observed M is the potential mediator at the realized (D, Z); observed Y is
/// the potential outcome at the realized (D, M).
pub fn generate_replication(design: &SimulationDesign, stream: u64) -> (Dataset, PotentialTables) {
    let mut rng = replication_rng(design.seed, stream);
    let n = design.n;
    let coef = &design.coefficients;

    let mut y = Vec::with_capacity(n);
    let mut d = Vec::with_capacity(n);
    let mut m = Vec::with_capacity(n);
    let mut z = Vec::with_capacity(n);
    let mut xdata = Vec::with_capacity(2 * n);
    let mut pot = PotentialTables::with_capacity(n);

    for _ in 0..n {
        let draw = draw_unit(&mut rng, coef.p_treat);
        let up = unit_potentials(&draw, design.outcome, design.mediator, coef);

        let di = draw.d as usize;
        let zi = up.z as usize;
        let m_obs = up.m[di][zi];
        let y_obs = up.y[di][m_obs as usize];

        xdata.push(1.0);
        xdata.push(draw.x0);
        d.push(draw.d);
        z.push(up.z);
        m.push(m_obs);
        y.push(y_obs);

        pot.m00.push(up.m[0][0]);
        pot.m01.push(up.m[0][1]);
        pot.m10.push(up.m[1][0]);
        pot.m11.push(up.m[1][1]);
        pot.y00.push(up.y[0][0]);
        pot.y01.push(up.y[0][1]);
        pot.y10.push(up.y[1][0]);
        pot.y11.push(up.y[1][1]);
    }

    let x = Matrix::new(n, 2, xdata).expect("generated covariates are finite");
    let data = Dataset::new(y, d, m, z, x).expect("generated sample satisfies invariants");
    (data, pot)
}

/// Sample-mean total, direct, and indirect effects.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectTriple {
    pub total: f64,
    pub direct: f64,
    pub indirect: f64,
}

impl EffectTriple {
    pub fn get(&self, kind: EffectKind) -> f64 {
        match kind {
            EffectKind::Total => self.total,
            EffectKind::Direct => self.direct,
            EffectKind::Indirect => self.indirect,
        }
    }
}

/// True effects for one replication, from the potential tables and realized
/// instrument.
///
/// Per unit, with ΔY^± and ΔM^± the double differences:
/// total  = Y¹⁰−Y⁰⁰ + (Y⁰¹−Y⁰⁰)(M¹⁰−M⁰⁰) + ΔY^±·M¹⁰
///          + Z·{ΔY^±(M¹¹−M¹⁰) + (Y⁰¹−Y⁰⁰)ΔM^±};
/// direct = (1−Z)(Y¹⁰−Y⁰⁰+ΔY^±·M¹⁰) + Z(Y¹⁰−Y⁰⁰+ΔY^±·M¹¹);
/// indirect = mean(total) − mean(direct).
pub fn true_effects(pot: &PotentialTables, z: &[f64]) -> EffectTriple {
    let n = pot.len();
    debug_assert_eq!(z.len(), n);
    let mut total_sum = 0.0;
    let mut direct_sum = 0.0;
    for i in 0..n {
        let dy = pot.delta_y_pm(i);
        let dm = pot.delta_m_pm(i);
        let base_y = pot.y10[i] - pot.y00[i];
        let gain_m = pot.y01[i] - pot.y00[i];
        let zi = z[i];

        total_sum += base_y
            + gain_m * (pot.m10[i] - pot.m00[i])
            + dy * pot.m10[i]
            + zi * (dy * (pot.m11[i] - pot.m10[i]) + gain_m * dm);
        direct_sum +=
            (1.0 - zi) * (base_y + dy * pot.m10[i]) + zi * (base_y + dy * pot.m11[i]);
    }
    let total = total_sum / n as f64;
    let direct = direct_sum / n as f64;
    EffectTriple {
        total,
        direct,
        indirect: total - direct,
    }
}

/// Point estimate and asymptotic SE for one estimator × effect cell.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EstimateSe {
    pub estimate: f64,
    pub se: f64,
}

/// One finished replication: truth, all estimator results, redraws used.
///
/// `estimates` is indexed `[estimator][effect]` in the orders of
/// [`crate::effects::Estimator::ALL`] and [`EffectKind::ALL`].
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationRecord {
    pub truth: EffectTriple,
    pub estimates: [[EstimateSe; 3]; 4],
    pub redraws: u32,
}

/// Degeneracies specific to one draw get a redraw; anything else is a real
/// failure that must propagate.
fn warrants_redraw(err: &Error) -> bool {
    matches!(
        err,
        Error::SingularDesign { .. }
            | Error::NotConverged { .. }
            | Error::SeparationDetected
            | Error::DegenerateResponse
            | Error::DegenerateMediator
            | Error::EmptyCell { .. }
            | Error::EmptyGroup
    )
}

/// Runs replication `rep`: generate, compute truth, estimate with all four
/// estimators. A degenerate draw is discarded and redrawn from a fresh
/// stream (`rep + attempt·reps`), up to 10 redraws.
pub fn run_replication(design: &SimulationDesign, rep: usize) -> Result<ReplicationRecord> {
    let reps = design.reps as u64;
    let mut redraws = 0u32;
    for attempt in 0..=MAX_REDRAWS_PER_REP {
        let stream = rep as u64 + u64::from(attempt) * reps;
        let (data, pot) = generate_replication(design, stream);
        match decompose_all(&data) {
            Ok(results) => {
                let truth = true_effects(&pot, &data.z);
                let mut estimates = [[EstimateSe::default(); 3]; 4];
                for (ei, res) in results.iter().enumerate() {
                    for (ki, kind) in EffectKind::ALL.iter().enumerate() {
                        let eff = res.effect(*kind);
                        estimates[ei][ki] = EstimateSe {
                            estimate: eff.estimate,
                            se: eff.se,
                        };
                    }
                }
                return Ok(ReplicationRecord {
                    truth,
                    estimates,
                    redraws,
                });
            }
            Err(e) if warrants_redraw(&e) => {
                redraws += 1;
                continue;
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::ExcessiveRedraws { replication: rep })
}

/// Bias, spread, and SE summaries for one estimator × effect cell, each
/// divided by the absolute mean true effect.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CellStats {
    /// |mean estimate − mean truth| / |mean truth|.
    pub abs_bias_ratio: f64,
    /// SD of estimates across replications / |mean truth|.
    pub simsd_ratio: f64,
    /// Root mean squared deviation from mean truth / |mean truth|; satisfies
    /// rmse² = bias² + simSD².
    pub rmse_ratio: f64,
    /// Mean asymptotic SE / |mean truth|.
    pub asysd_ratio: f64,
}

/// Monte Carlo summary across all replications.
///
/// `cells` is indexed `[estimator][effect]` like
/// [`ReplicationRecord::estimates`].
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub outcome: OutcomeForm,
    pub mediator: MediatorMode,
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    /// Mean of per-replication true effects.
    pub truth_means: EffectTriple,
    pub redraw_count: u64,
    pub cells: [[CellStats; 3]; 4],
}

/// Collapses replication records into the standardized report. Pure and
/// order-insensitive given records sorted by replication index.
pub fn aggregate_report(design: &SimulationDesign, records: &[ReplicationRecord]) -> SimulationReport {
    let r = records.len() as f64;
    let truth_means = EffectTriple {
        total: records.iter().map(|rec| rec.truth.total).sum::<f64>() / r,
        direct: records.iter().map(|rec| rec.truth.direct).sum::<f64>() / r,
        indirect: records.iter().map(|rec| rec.truth.indirect).sum::<f64>() / r,
    };
    let redraw_count = records.iter().map(|rec| u64::from(rec.redraws)).sum();

    let mut cells = [[CellStats::default(); 3]; 4];
    for ei in 0..4 {
        for (ki, kind) in EffectKind::ALL.iter().enumerate() {
            let truth = truth_means.get(*kind);
            let scale = truth.abs();

            let mean_est = records
                .iter()
                .map(|rec| rec.estimates[ei][ki].estimate)
                .sum::<f64>()
                / r;
            let bias = (mean_est - truth).abs();
            let var_about_mean = records
                .iter()
                .map(|rec| {
                    let dev = rec.estimates[ei][ki].estimate - mean_est;
                    dev * dev
                })
                .sum::<f64>()
                / r;
            let sim_sd = libm::sqrt(var_about_mean);
            let rmse = libm::sqrt(bias * bias + var_about_mean);
            let asy_sd = records
                .iter()
                .map(|rec| rec.estimates[ei][ki].se)
                .sum::<f64>()
                / r;

            cells[ei][ki] = CellStats {
                abs_bias_ratio: bias / scale,
                simsd_ratio: sim_sd / scale,
                rmse_ratio: rmse / scale,
                asysd_ratio: asy_sd / scale,
            };
        }
    }

    SimulationReport {
        outcome: design.outcome,
        mediator: design.mediator,
        n: design.n,
        reps: design.reps,
        seed: design.seed,
        truth_means,
        redraw_count,
        cells,
    }
}

/// Sequential Monte Carlo over `design.reps` replications.
pub fn run_monte_carlo(design: &SimulationDesign) -> Result<SimulationReport> {
    design.validate()?;
    let mut records = Vec::with_capacity(design.reps);
    for rep in 0..design.reps {
        records.push(run_replication(design, rep)?);
    }
    Ok(aggregate_report(design, &records))
}
