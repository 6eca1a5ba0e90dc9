//! Command-line front end: effect decomposition on CSV data and the
//! synthetic-design Monte Carlo study.
//!
//! Exit codes: 0 success, 1 data errors (files, parsing, degenerate
//! constructions), 2 estimation errors (singular designs, non-convergence),
//! 64 usage errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mediv::ingest::{self, ColumnSpec, IngestError};
use mediv::montecarlo::run_monte_carlo_parallel;
use mediv::report;
use mediv_core::{
    decompose, EffectEstimates, Estimator, MediatorMode, OutcomeForm, SimulationDesign,
};

#[derive(Parser)]
#[command(
    name = "mediv",
    version,
    about = "Total/direct/indirect decomposition of a binary treatment's effect \
             with an instrumented binary mediator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the synthetic-design Monte Carlo study and print the
    /// standardized bias/SD/RMSE report.
    Simulate(SimulateArgs),
    /// Decompose the treatment effect on a CSV dataset with one method.
    Decompose(DecomposeArgs),
    /// Run all five quantile cuts x four methods on a CSV dataset and
    /// print the effects grid.
    Table4(Table4Args),
}

#[derive(Clone, Copy, ValueEnum)]
enum OutcomeArg {
    /// Continuous outcome.
    Cont,
    /// Binary outcome.
    Bin,
}

impl From<OutcomeArg> for OutcomeForm {
    fn from(v: OutcomeArg) -> Self {
        match v {
            OutcomeArg::Cont => OutcomeForm::Continuous,
            OutcomeArg::Bin => OutcomeForm::Binary,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MediatorArg {
    /// Mediator independent of the outcome noise.
    Exo,
    /// Mediator correlated with the outcome noise.
    Endo,
}

impl From<MediatorArg> for MediatorMode {
    fn from(v: MediatorArg) -> Self {
        match v {
            MediatorArg::Exo => MediatorMode::Exogenous,
            MediatorArg::Endo => MediatorMode::Endogenous,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    /// OLS treating the mediator as exogenous.
    Ols,
    /// Covariate-interacted IVE.
    Ive1,
    /// Instrument-score IVE, quadratic basis.
    Ive2,
    /// Instrument-score IVE, cubic basis.
    Ive3,
}

impl From<MethodArg> for Estimator {
    fn from(v: MethodArg) -> Self {
        match v {
            MethodArg::Ols => Estimator::OlsExog,
            MethodArg::Ive1 => Estimator::Ive1,
            MethodArg::Ive2 => Estimator::Ive2,
            MethodArg::Ive3 => Estimator::Ive3,
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// Outcome form of the generated data.
    #[arg(long, value_enum)]
    outcome: OutcomeArg,
    /// Mediator mode of the generated data.
    #[arg(long, value_enum)]
    mediator: MediatorArg,
    /// Sample size per replication.
    #[arg(long, default_value_t = 4000)]
    n: usize,
    /// Replication count.
    #[arg(long, default_value_t = 1000)]
    reps: usize,
    /// RNG seed; fixed seed means byte-identical reports.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Run the full-scale study (10000 replications), overriding --reps.
    #[arg(long)]
    full_reps: bool,
    /// Also write the report as CSV to this path.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct DecomposeArgs {
    /// CSV file with a header row.
    #[arg(long)]
    data: PathBuf,
    /// JSON column mapping; defaults to the class-size schema
    /// (y3, d, y2, y1, blk, boy, expi, lunch).
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Quantile level for binarizing the mediator and instrument sources.
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    /// Estimation method.
    #[arg(long, value_enum, default_value_t = MethodArg::Ive1)]
    method: MethodArg,
    /// Score-basis polynomial order; only meaningful for ive2/ive3.
    #[arg(long)]
    j: Option<usize>,
    /// Also write the effects as CSV to this path.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct Table4Args {
    /// CSV file with a header row, class-size schema.
    #[arg(long)]
    data: PathBuf,
    /// Optional JSON column mapping replacing the default schema.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Also write the grid as CSV to this path.
    #[arg(long)]
    csv: Option<PathBuf>,
}

/// Application-level failure with its documented exit code.
#[derive(Debug, thiserror::Error)]
enum AppError {
    #[error(transparent)]
    Data(#[from] IngestError),
    #[error(transparent)]
    Estimation(mediv_core::Error),
    #[error("cannot write {path}: {source}")]
    Output {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl AppError {
    fn exit_code(&self) -> u8 {
        match self {
            AppError::Data(_) | AppError::Output { .. } => 1,
            AppError::Estimation(_) => 2,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let graceful = matches!(
                err.kind(),
                ErrorKind::DisplayHelp
                    | ErrorKind::DisplayVersion
                    | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
            );
            let _ = err.print();
            return if graceful {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(64)
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Decompose(args) => decompose_file(args),
        Command::Table4(args) => effects_grid(args),
    }
}

fn write_output(path: &Path, contents: &str) -> Result<(), AppError> {
    fs::write(path, contents).map_err(|source| AppError::Output {
        path: path.display().to_string(),
        source,
    })
}

fn simulate(args: SimulateArgs) -> Result<(), AppError> {
    let reps = if args.full_reps { 10_000 } else { args.reps };
    let design = SimulationDesign::new(
        args.outcome.into(),
        args.mediator.into(),
        args.n,
        reps,
        args.seed,
    );
    let report = run_monte_carlo_parallel(&design).map_err(AppError::Estimation)?;
    print!("{}", report::simulation_text(&report));
    if let Some(path) = args.csv {
        write_output(&path, &report::simulation_csv(&report))?;
    }
    Ok(())
}

fn load_spec(path: &Option<PathBuf>) -> Result<ColumnSpec, AppError> {
    match path {
        Some(p) => Ok(ColumnSpec::from_json_file(p)?),
        None => Ok(ColumnSpec::star_default()),
    }
}

fn print_build_summary(built: &ingest::BuiltDataset) {
    println!(
        "rows used: {} (dropped {}); mediator cut {:.4} (share {:.3}), \
         instrument cut {:.4} (share {:.3}), cor(m,z) {:.3}",
        built.data.n,
        built.dropped,
        built.mediator_cut,
        built.mediator_share,
        built.instrument_cut,
        built.instrument_share,
        ingest::correlation(&built.data.m, &built.data.z)
    );
}

fn decompose_file(args: DecomposeArgs) -> Result<(), AppError> {
    let spec = load_spec(&args.spec)?;
    let table = ingest::load_csv(&args.data, &spec)?;
    let built = ingest::build_dataset(&table, &spec, args.p)?;
    print_build_summary(&built);
    let result =
        decompose(&built.data, args.method.into(), args.j).map_err(AppError::Estimation)?;
    print!("{}", report::decomposition_text(&result));
    if let Some(path) = args.csv {
        write_output(&path, &report::decomposition_csv(&result))?;
    }
    Ok(())
}

fn effects_grid(args: Table4Args) -> Result<(), AppError> {
    let spec = load_spec(&args.spec)?;
    let table = ingest::load_csv(&args.data, &spec)?;
    let mut entries: Vec<(f64, [EffectEstimates; 4])> = Vec::new();
    for p in report::GRID_LEVELS {
        let built = ingest::build_dataset(&table, &spec, p)?;
        let mut results = Vec::with_capacity(4);
        for est in Estimator::ALL {
            results.push(decompose(&built.data, est, None).map_err(AppError::Estimation)?);
        }
        let results: [EffectEstimates; 4] = results
            .try_into()
            .expect("exactly four estimators were run");
        entries.push((p, results));
    }
    print!("{}", report::grid_text(&entries));
    if let Some(path) = args.csv {
        write_output(&path, &report::grid_csv(&entries))?;
    }
    Ok(())
}
