use thiserror::Error;

use crate::lp::LpError;
use crate::problem::NormResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("site {index} duplicates site {first}")]
    DuplicateSite { first: usize, index: usize },

    #[error("{sites} sites but {targets} targets")]
    LengthMismatch { sites: usize, targets: usize },

    #[error("site {index}: {reason}")]
    DomainViolation { index: usize, reason: String },

    #[error("at least one target is required")]
    EmptyTargets,

    #[error("tolerance must be positive and finite, got {0}")]
    NonpositiveTolerance(f64),

    #[error("level t must be positive and finite, got {0}")]
    NonpositiveLevel(f64),

    #[error("unknown backend `{0}`")]
    UnknownBackend(String),

    #[error("Hermitian eigensolve did not converge within {sweeps} sweeps")]
    EigensolveFailure { sweeps: usize },

    #[error("no feasible level found below {limit:e}")]
    BracketFailure { limit: f64 },

    #[error("dual tail cannot be certified: boundary mass {boundary_mass} exceeds the dual bound")]
    TailBoundFailure { boundary_mass: f64 },

    #[error("solver stalled: {reason}")]
    SolverStall {
        reason: String,
        /// Best bracket reached before giving up, when one exists.
        partial: Option<Box<NormResult>>,
    },

    #[error("certificate rejected at {location}: recomputed sup {recomputed_sup} vs claimed {claimed_sup}")]
    CertificateRejected {
        location: String,
        claimed_sup: f64,
        recomputed_sup: f64,
    },

    #[error("closed form is only available on the full coordinate algebra")]
    UnsupportedForSubalgebra,

    #[error("the subalgebra cannot interpolate the targets (residual {residual:e})")]
    InfeasibleCoset { residual: f64 },

    #[error("grid of {grid} points is too coarse (need at least {required})")]
    GridTooCoarse { grid: usize, required: usize },

    #[error("no dual certificate check for backend `{0}`")]
    UnsupportedCertificate(String),

    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("linear program: {0}")]
    Lp(#[from] LpError),
}

impl Error {
    pub(crate) fn domain(index: usize, reason: impl Into<String>) -> Self {
        Error::DomainViolation {
            index,
            reason: reason.into(),
        }
    }

    pub(crate) fn stall(reason: impl Into<String>, partial: Option<NormResult>) -> Self {
        Error::SolverStall {
            reason: reason.into(),
            partial: partial.map(Box::new),
        }
    }

    /// True for errors caused by malformed input rather than numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::DuplicateSite { .. }
                | Error::LengthMismatch { .. }
                | Error::DomainViolation { .. }
                | Error::EmptyTargets
                | Error::NonpositiveTolerance(_)
                | Error::NonpositiveLevel(_)
                | Error::UnknownBackend(_)
                | Error::UnsupportedForSubalgebra
                | Error::InvalidAlgebra(_)
                | Error::UnsupportedCertificate(_)
                | Error::GridTooCoarse { .. }
        )
    }
}
