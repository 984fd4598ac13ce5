#![allow(dead_code)]

use trackperf::h2opt::{Channel, PowerLimits, Problem, Weights};
use trackperf::ratfun::RatFn;

pub fn rf(num: &[f64], den: &[f64]) -> RatFn {
    RatFn::from_real_coeffs(num, den).unwrap()
}

/// `n` log-spaced frequencies in `[1e-3, 1e3]` mirrored to negative values.
pub fn grid(n: usize) -> Vec<f64> {
    let half = n / 2;
    let pos: Vec<f64> = (0..half)
        .map(|i| 10f64.powf(-3.0 + 6.0 * i as f64 / (half - 1).max(1) as f64))
        .collect();
    pos.iter().map(|w| -w).chain(pos.iter().copied()).collect()
}

pub struct Ex1 {
    pub k: f64,
    pub p: f64,
    pub f2: f64,
    pub h2: f64,
    pub sigma2: f64,
    pub sigma_r: f64,
}

impl Default for Ex1 {
    fn default() -> Self {
        Self { k: 3.0, p: 2.0, f2: 0.5, h2: 0.5, sigma2: 0.1, sigma_r: 0.2 }
    }
}

/// `P = (s−k)/((s+1)(s−p))`, `F₂ = f₂/(s+f₂)`, `H₂ = h₂/(s−h₂)`, `ε₁ = ε₃ = 0.5`, `Γy = 2.5`.
pub fn example1(e: &Ex1) -> Result<Problem, trackperf::h2opt::H2Error> {
    let up = Channel { f: rf(&[e.f2], &[e.f2, 1.0]), h: rf(&[e.h2], &[-e.h2, 1.0]), sigma: e.sigma2 };
    Problem::new(
        rf(&[-e.k, 1.0], &[-e.p, 1.0 - e.p, 1.0]),
        Channel::ideal(),
        up,
        Weights { eps1: 0.5, eps2: 0.0, eps3: 0.5 },
        PowerLimits { gamma_u: 1.0, gamma_y: 2.5 },
        e.sigma_r,
    )
}

/// `P = (s−15)/((s+1)(s−12))`, `F₂ = H₂ = 1/(s+1)`, `ε₁ = 0.8`, `ε₂ = 0.2`, `σᵣ = σ₂ = 0.2`.
pub fn example3() -> Problem {
    let up = Channel { f: rf(&[1.0], &[1.0, 1.0]), h: rf(&[1.0], &[1.0, 1.0]), sigma: 0.2 };
    Problem::new(
        rf(&[-15.0, 1.0], &[-12.0, -11.0, 1.0]),
        Channel::ideal(),
        up,
        Weights { eps1: 0.8, eps2: 0.2, eps3: 0.0 },
        PowerLimits { gamma_u: 1.0, gamma_y: 1.0 },
        0.2,
    )
    .unwrap()
}
