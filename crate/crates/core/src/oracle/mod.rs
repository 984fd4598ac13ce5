//! Independent numerical verification: frequency quadrature and Ritz minimization.

pub mod quad;
pub mod ritz;
pub mod suites;

pub use quad::{
    h2_norm_sq_quad, h2_norm_sq_quad_rows, integrate, integrate_axis, QuadError, QuadOptions,
    QuadResult,
};
pub use ritz::{ritz_min_j, RitzConfig, RitzResult};
