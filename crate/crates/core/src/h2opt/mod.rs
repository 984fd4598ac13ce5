//! Closed-form optimal performance, its itemized terms, and the optimal controller.

mod bundle;
mod gammas;
mod jstar;
mod problem;
mod synth;

pub use bundle::{build_bundle, FactorizationBundle};
pub use gammas::{antistable_project, compute_gammas, Gammas};
pub use jstar::{
    compute_jstar, compute_jstar_with, compute_residual, compute_upsilon1, solve, upsilon_density,
    upsilon_floor, PerfBreakdown, Solution,
};
pub use problem::{Channel, PowerLimits, Problem, Weights};
pub use synth::{optimal_params, synth_controller, ControllerPair, YoulaParams};

use crate::factor::FactorError;
use crate::oracle::QuadError;
use crate::ratfun::RatError;
use crate::C64;

/// Broad failure classes, used for exit-code mapping.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    /// Invalid problem data.
    Invalid,
    /// Unstabilizable, unbounded or degenerate structure.
    Structural,
    /// Numeric failure (quadrature, root finding, ill-conditioning).
    Numeric,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum H2Error {
    #[error("invalid problem: {0}")]
    Invalid(String),
    #[error("performance unbounded: right half-plane zero {zero} nearly cancels unstable pole {pole}")]
    Unbounded { zero: C64, pole: C64 },
    #[error("{what} {root} lies on the imaginary axis")]
    AxisRoot { what: &'static str, root: C64 },
    #[error("factorization of {stack} failed: {source}")]
    Factor {
        stack: &'static str,
        #[source]
        source: FactorError,
    },
    #[error("declared right half-plane poles {declared:?} differ from actual {actual:?}")]
    PoleMismatch { declared: Vec<C64>, actual: Vec<C64> },
    #[error("synthesis failed for {factor}: {reason}")]
    Synthesis { factor: &'static str, reason: String },
    #[error("controller undefined: X - RN vanishes identically")]
    ControllerUndefined,
    #[error(transparent)]
    Rat(#[from] RatError),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

impl H2Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            H2Error::Invalid(_) => ErrorKind::Invalid,
            H2Error::Unbounded { .. }
            | H2Error::AxisRoot { .. }
            | H2Error::Synthesis { .. }
            | H2Error::ControllerUndefined => ErrorKind::Structural,
            H2Error::Factor { source, .. } => match source {
                FactorError::Rat(_) | FactorError::SingularSylvester { .. } => ErrorKind::Numeric,
                _ => ErrorKind::Structural,
            },
            H2Error::PoleMismatch { .. } | H2Error::Rat(_) | H2Error::Quad(_) => ErrorKind::Numeric,
        }
    }
}
