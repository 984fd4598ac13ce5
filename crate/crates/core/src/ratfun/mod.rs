//! Complex polynomial and rational-function algebra over the Laplace variable.

mod partial;
mod poly;
mod ratfn;
mod roots;

pub use partial::{
    h2_cross_sum, h2_norm_sq_closed, terms_value, PartialFractions, ResidueTerm,
};
pub use poly::Poly;
pub use ratfn::{side, RatFn, Side};
pub use roots::{close, poly_roots, Root, RootSet};

use crate::C64;

/// Errors raised by the algebra layer.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RatError {
    #[error("non-finite polynomial coefficient")]
    NonFinite,
    #[error("zero polynomial has no roots")]
    ZeroPolynomial,
    #[error("denominator is identically zero")]
    ZeroDenominator,
    #[error("eigenvalue solver failed for degree {degree}")]
    RootFinding { degree: usize },
    #[error("evaluation at pole {pole}")]
    PoleHit { pole: C64 },
    #[error("division by the zero function")]
    DivisionByZero,
    #[error("expected a strictly proper function, relative degree is {relative_degree}")]
    NotStrictlyProper { relative_degree: i64 },
    #[error("poles outside the open left half-plane: {poles:?}")]
    Unstable { poles: Vec<C64> },
    #[error("term pole {pole} is not in the open right half-plane")]
    NotAntistable { pole: C64 },
}
