use thiserror::Error;

use crate::bound_family::ParamViolation;
use crate::sdp::SolveStatus;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not symmetric (max asymmetry {asymmetry:.3e})")]
    NonSymmetric { asymmetry: f64 },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("quadrature orderings differ")]
    OrderingMismatch,

    #[error("invalid bipartition: {0}")]
    InvalidBipartition(String),

    #[error("negative thermal occupation {0} on mode {1}")]
    NegativeOccupation(f64, usize),

    #[error("invalid family parameters: {0:?}")]
    InvalidParams(Vec<ParamViolation>),

    #[error("entry ({row}, {col}) = {value:.3e} lies outside the family sparsity pattern")]
    PatternMismatch { row: usize, col: usize, value: f64 },

    #[error("covariance matrix is singular to working precision")]
    SingularGamma,

    #[error("matrix is not positive definite (smallest eigenvalue {0:.3e})")]
    NotPositiveDefinite(f64),

    #[error("matrix is not symplectic (|S sigma S^T - sigma| = {0:.3e})")]
    NotSymplectic(f64),

    #[error("transform is not passive (|O O^T - I| = {0:.3e})")]
    NotPassive(f64),

    #[error("matrix is not unitary (|U^H U - I| = {0:.3e})")]
    NotUnitary(f64),

    #[error("squeezer on mode {0} cannot be composed into a unitary")]
    SqueezerInUnitaryComposition(usize),

    #[error("invalid mode index {mode} for a {n_modes}-mode circuit")]
    InvalidMode { mode: usize, n_modes: usize },

    #[error("kappa must be >= 1, got {0}")]
    InvalidKappa(f64),

    #[error("tau must be > 0, got {0}")]
    InvalidTau(f64),

    #[error("no bracket: {0}")]
    NoBracket(String),

    #[error("not converged: {0}")]
    NotConverged(String),

    #[error(
        "separability inconclusive: slack in [{slack_lower:.3e}, {slack_upper:.3e}] vs tolerance {tol:.1e} (solver status {status:?})"
    )]
    Inconclusive { slack_lower: f64, slack_upper: f64, tol: f64, status: SolveStatus },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("fixture mismatch: {0}")]
    FixtureMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Exit status for invalid data.
pub const EXIT_DATA: i32 = 65;
/// Exit status for numerical failures.
pub const EXIT_NUMERICAL: i32 = 70;
/// Exit status when a decision could not be made within tolerance.
pub const EXIT_INCONCLUSIVE: i32 = 2;

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Inconclusive { .. } => EXIT_INCONCLUSIVE,
            Error::SingularGamma | Error::NoBracket(_) | Error::NotConverged(_) | Error::NumericalFailure(_) => {
                EXIT_NUMERICAL
            }
            _ => EXIT_DATA,
        }
    }
}
