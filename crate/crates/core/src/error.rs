use core::fmt;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised by estimation, design construction, and simulation.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A regressor/instrument cross-moment matrix is numerically singular
    /// (reciprocal condition number below [`crate::matrix::RCOND_MIN`]).
    /// Signals a redraw inside the Monte Carlo loop and an abort elsewhere.
    SingularDesign { rcond: f64 },
    /// Conformability failure between matrices/vectors.
    DimensionMismatch(&'static str),
    /// Probit iteration hit the cap without meeting the gradient tolerance.
    NotConverged {
        iterations: usize,
        gradient_norm: f64,
    },
    /// Probit coefficients diverged (perfect or quasi-perfect separation).
    SeparationDetected,
    /// The binary response is constant, so the likelihood has no interior maximum.
    DegenerateResponse,
    /// One of the four (D, Z) cells is unoccupied; the design cannot identify
    /// all interaction blocks.
    EmptyCell { d: u8, z: u8 },
    /// The mediator is constant, making the second-stage design rank-deficient.
    DegenerateMediator,
    /// A treatment group required for a group contrast is empty.
    EmptyGroup,
    /// A replication exhausted its redraw budget (10 fresh streams).
    ExcessiveRedraws { replication: usize },
    /// An input violated a documented precondition.
    Validation(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::SingularDesign { rcond } => {
                write!(f, "singular design matrix (rcond = {rcond:.3e})")
            }
            Error::DimensionMismatch(what) => write!(f, "dimension mismatch: {what}"),
            Error::NotConverged {
                iterations,
                gradient_norm,
            } => write!(
                f,
                "probit did not converge after {iterations} iterations \
                 (gradient norm {gradient_norm:.3e})"
            ),
            Error::SeparationDetected => {
                write!(f, "probit separation detected: coefficients diverge")
            }
            Error::DegenerateResponse => write!(f, "binary response is constant"),
            Error::EmptyCell { d, z } => {
                write!(f, "no observations in the (D={d}, Z={z}) cell")
            }
            Error::DegenerateMediator => write!(f, "mediator is constant"),
            Error::EmptyGroup => write!(f, "a treatment group is empty"),
            Error::ExcessiveRedraws { replication } => {
                write!(f, "replication {replication} exhausted its redraw budget")
            }
            Error::Validation(msg) => write!(f, "invalid input: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
