//! Parallel Monte Carlo driver.
//!
//! Replications are embarrassingly parallel: replication `i` always consumes
//! RNG stream `i` (plus redraw substreams derived from `i`), so splitting the
//! index range across workers cannot change any draw. The aggregation step is
//! a fold over records ordered by replication index, which rayon's indexed
//! collect preserves. The net contract: this runner returns a report equal to
//! the sequential one for any worker count.

use mediv_core::{aggregate_report, run_replication, Result, SimulationDesign, SimulationReport};
use rayon::prelude::*;

/// Runs the full study with one rayon task per replication.
pub fn run_monte_carlo_parallel(design: &SimulationDesign) -> Result<SimulationReport> {
    design.validate()?;
    let records = (0..design.reps)
        .into_par_iter()
        .map(|rep| run_replication(design, rep))
        .collect::<Result<Vec<_>>>()?;
    Ok(aggregate_report(design, &records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use mediv_core::{run_monte_carlo, MediatorMode, OutcomeForm};

    #[test]
    fn parallel_report_equals_sequential_report() {
        let design = SimulationDesign::new(
            OutcomeForm::Continuous,
            MediatorMode::Endogenous,
            150,
            12,
            99,
        );
        let parallel = run_monte_carlo_parallel(&design).unwrap();
        let sequential = run_monte_carlo(&design).unwrap();
        assert_eq!(parallel, sequential);
    }

    #[test]
    fn invalid_design_is_rejected_before_spawning_work() {
        let design = SimulationDesign::new(
            OutcomeForm::Continuous,
            MediatorMode::Exogenous,
            10,
            4,
            1,
        );
        assert!(run_monte_carlo_parallel(&design).is_err());
    }
}
