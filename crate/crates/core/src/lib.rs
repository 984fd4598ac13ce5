//! Exact optimal tracking performance of a plant controlled over two noisy,
//! bandwidth-limited channels.
//!
//! The pipeline factors the loop ([`factor`]), evaluates the closed-form optimum
//! and synthesizes the optimal two-parameter controller ([`h2opt`]), derives the
//! channel input-power bounds ([`power`]), and cross-checks everything against
//! independent quadrature and Ritz minimization ([`oracle`]).

pub mod exec;
pub mod factor;
pub mod h2opt;
pub mod oracle;
pub mod power;
pub mod ratfun;

pub use num_complex::Complex64 as C64;

/// Numeric tolerances shared across modules.
pub mod tol {
    /// Relative distance under which roots are treated as one.
    pub const CLUSTER: f64 = 1e-7;
    /// Relative distance under which known roots combine in products.
    pub const MERGE: f64 = 1e-12;
    /// Half-width of the band around the imaginary axis treated as marginal.
    pub const AXIS: f64 = 1e-9;
    /// Relative distance to a pole that counts as a pole hit.
    pub const POLE_HIT: f64 = 1e-12;
    /// Relative pole-zero gap below which performance is reported unbounded.
    pub const CANCELLATION: f64 = 1e-6;
    /// Default relative tolerance of frequency quadrature.
    pub const QUAD: f64 = 1e-9;
}
