//! Plain-text and CSV rendering for simulation reports and decompositions.

use std::fmt::Write as _;

use mediv_core::{EffectEstimates, EffectKind, Estimator, SimulationReport};

/// Quantile levels the grid subcommand sweeps.
pub const GRID_LEVELS: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

/// Aligned-text rendering of a Monte Carlo report: one row per
/// estimator × effect with the four standardized columns.
pub fn simulation_text(report: &SimulationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "design: {} outcome, {} mediator, n={}, reps={}, seed={}",
        report.outcome.label(),
        report.mediator.label(),
        report.n,
        report.reps,
        report.seed
    );
    let _ = writeln!(
        out,
        "true effect means: total {:.4}  direct {:.4}  indirect {:.4}   redraws: {}",
        report.truth_means.total,
        report.truth_means.direct,
        report.truth_means.indirect,
        report.redraw_count
    );
    let _ = writeln!(
        out,
        "{:<9} {:<8} {:>12} {:>12} {:>12} {:>12}",
        "estimator", "effect", "|bias|/|ef|", "simSD/|ef|", "RMSE/|ef|", "asySD/|ef|"
    );
    for (ei, est) in Estimator::ALL.iter().enumerate() {
        for (ki, kind) in EffectKind::ALL.iter().enumerate() {
            let c = &report.cells[ei][ki];
            let _ = writeln!(
                out,
                "{:<9} {:<8} {:>12.4} {:>12.4} {:>12.4} {:>12.4}",
                est.label(),
                kind.label(),
                c.abs_bias_ratio,
                c.simsd_ratio,
                c.rmse_ratio,
                c.asysd_ratio
            );
        }
    }
    out
}

/// CSV rendering of a Monte Carlo report. Columns:
/// `estimator,effect,abs_bias_ratio,simsd_ratio,rmse_ratio,asysd_ratio,redraws`.
pub fn simulation_csv(report: &SimulationReport) -> String {
    let mut out = String::from(
        "estimator,effect,abs_bias_ratio,simsd_ratio,rmse_ratio,asysd_ratio,redraws\n",
    );
    for (ei, est) in Estimator::ALL.iter().enumerate() {
        for (ki, kind) in EffectKind::ALL.iter().enumerate() {
            let c = &report.cells[ei][ki];
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                est.label(),
                kind.label(),
                c.abs_bias_ratio,
                c.simsd_ratio,
                c.rmse_ratio,
                c.asysd_ratio,
                report.redraw_count
            );
        }
    }
    out
}

/// Aligned-text rendering of one decomposition.
pub fn decomposition_text(result: &EffectEstimates) -> String {
    let mut out = String::new();
    let order = match result.j {
        Some(j) => format!(", score order {j}"),
        None => String::new(),
    };
    let _ = writeln!(out, "method {} (n={}{})", result.estimator.label(), result.n, order);
    let _ = writeln!(
        out,
        "{:<9} {:>12} {:>12} {:>9}",
        "effect", "estimate", "se", "t"
    );
    for kind in EffectKind::ALL {
        let e = result.effect(kind);
        let _ = writeln!(
            out,
            "{:<9} {:>12.4} {:>12.4} {:>9.2}",
            kind.label(),
            e.estimate,
            e.se,
            e.t_value
        );
    }
    out
}

/// CSV rendering of one decomposition. Columns: `effect,estimate,se,t`.
pub fn decomposition_csv(result: &EffectEstimates) -> String {
    let mut out = String::from("effect,estimate,se,t\n");
    for kind in EffectKind::ALL {
        let e = result.effect(kind);
        let _ = writeln!(out, "{},{},{},{}", kind.label(), e.estimate, e.se, e.t_value);
    }
    out
}

/// Aligned-text grid over quantile levels: per level, three effect rows with
/// `estimate (t)` cells for all four methods.
pub fn grid_text(entries: &[(f64, [EffectEstimates; 4])]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<5} {:<9} {:>15} {:>15} {:>15} {:>15}",
        "p", "effect", "OLS", "IVE1", "IVE2", "IVE3"
    );
    for (p, results) in entries {
        for kind in EffectKind::ALL {
            let mut row = format!(
                "{:<5} {:<9}",
                if kind == EffectKind::Total {
                    format!("{p:.1}")
                } else {
                    String::new()
                },
                kind.label()
            );
            for result in results {
                let e = result.effect(kind);
                let cell = format!("{:.3} ({:.2})", e.estimate, e.t_value);
                let _ = write!(row, " {cell:>15}");
            }
            let _ = writeln!(out, "{row}");
        }
    }
    out
}

/// CSV rendering of the grid. Columns: `p,method,effect,estimate,se,t`.
pub fn grid_csv(entries: &[(f64, [EffectEstimates; 4])]) -> String {
    let mut out = String::from("p,method,effect,estimate,se,t\n");
    for (p, results) in entries {
        for result in results {
            for kind in EffectKind::ALL {
                let e = result.effect(kind);
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    p,
                    result.estimator.label(),
                    kind.label(),
                    e.estimate,
                    e.se,
                    e.t_value
                );
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use mediv_core::{run_monte_carlo, MediatorMode, OutcomeForm, SimulationDesign};

    #[test]
    fn simulation_renderings_have_expected_shape() {
        let design = SimulationDesign::new(
            OutcomeForm::Continuous,
            MediatorMode::Exogenous,
            120,
            3,
            5,
        );
        let report = run_monte_carlo(&design).unwrap();
        let text = simulation_text(&report);
        assert_eq!(text.lines().count(), 3 + 12);
        assert!(text.contains("IVE3"));
        let csv = simulation_csv(&report);
        assert_eq!(csv.lines().count(), 1 + 12);
        assert!(csv.starts_with("estimator,effect,"));
    }
}
