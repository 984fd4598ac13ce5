//! Minimum channel input-power bounds as quadratic forms in `(σᵣ², σ₁², σ₂²)`.

use crate::h2opt::{FactorizationBundle, H2Error, Problem, YoulaParams};
use crate::oracle::{integrate_axis, QuadError, QuadOptions};
use crate::ratfun::{h2_norm_sq_closed, RatFn};

/// `Γy ≥ c_r σᵣ² + c₁ σ₁² + c₂ σ₂²` and `Γu ≥ d_r σᵣ² + d₁ σ₁² + d₂ σ₂²`.
///
/// A coefficient whose transfer map does not decay is `+∞` and listed in `divergent`.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerBounds {
    /// `(c_r, c₁, c₂)`.
    pub y_coeffs: [f64; 3],
    /// `(d_r, d₁, d₂)`.
    pub u_coeffs: [f64; 3],
    pub divergent: Vec<&'static str>,
    /// Largest relative gap between quadrature and closed form over the
    /// coefficients whose maps are stable and strictly proper.
    pub closed_form_gap: f64,
}

fn weighted(coeffs: &[f64; 3], sigmas: [f64; 3]) -> f64 {
    coeffs
        .iter()
        .zip(sigmas)
        .map(|(&c, s)| if s == 0.0 { 0.0 } else { c * s * s })
        .sum()
}

impl PowerBounds {
    pub fn y_bound(&self, sigma_r: f64, sigma1: f64, sigma2: f64) -> f64 {
        weighted(&self.y_coeffs, [sigma_r, sigma1, sigma2])
    }

    pub fn u_bound(&self, sigma_r: f64, sigma1: f64, sigma2: f64) -> f64 {
        weighted(&self.u_coeffs, [sigma_r, sigma1, sigma2])
    }
}

/// Squared H2 norm of one bound map, with its closed-form gap when available.
fn coefficient(map: &RatFn, opts: &QuadOptions) -> Result<(f64, Option<f64>), H2Error> {
    if map.is_zero() {
        return Ok((0.0, None));
    }
    if !map.is_strictly_proper() {
        return Ok((f64::INFINITY, None));
    }
    let q = match integrate_axis(|w| map.at_jw(w).norm_sqr(), opts) {
        Ok(r) => r.value,
        Err(QuadError::Divergent) => return Ok((f64::INFINITY, None)),
        Err(e) => return Err(e.into()),
    };
    let gap = if map.is_stable() {
        let c = h2_norm_sq_closed(map)?;
        Some((q - c).abs() / c.max(f64::MIN_POSITIVE))
    } else {
        None
    };
    Ok((q, gap))
}

/// Bound coefficients evaluated at the given Youla parameters.
///
/// Coefficients of inactive sources (zero intensity or zero coloring) are exactly zero.
pub fn min_power_bounds(
    prob: &Problem,
    bundle: &FactorizationBundle,
    params: &YoulaParams,
    opts: &QuadOptions,
) -> Result<PowerBounds, H2Error> {
    let cp = &bundle.coprime;
    let x_rn = &cp.x - &(&params.r * &cp.n);
    let y_rm = &cp.y - &(&params.r * &cp.m);
    let f1_nhat = &prob.down.f * &bundle.n_hat;
    let f2_nhat = &prob.up.f * &bundle.n_hat;
    let ref_on = prob.sigma_r > 0.0;
    let down_on = prob.down.is_noisy();
    let up_on = prob.up.is_noisy();
    let gate = |on: bool, f: &dyn Fn() -> RatFn| if on { f() } else { RatFn::zero() };

    let maps: [(&'static str, RatFn); 6] = [
        ("y_r", gate(ref_on, &|| &f1_nhat * &params.q)),
        ("y_1", gate(down_on, &|| &(&bundle.n_hat * &x_rn) * &prob.down.h)),
        ("y_2", gate(up_on, &|| &(&f1_nhat * &y_rm) * &prob.up.h)),
        ("u_r", gate(ref_on, &|| &cp.m * &params.q)),
        ("u_1", gate(down_on, &|| &(&f2_nhat * &y_rm) * &prob.down.h)),
        ("u_2", gate(up_on, &|| &(&cp.m * &y_rm) * &prob.up.h)),
    ];
    let mut values = [0.0; 6];
    let mut divergent = Vec::new();
    let mut closed_form_gap: f64 = 0.0;
    for (k, (name, map)) in maps.iter().enumerate() {
        let (v, gap) = coefficient(map, opts)?;
        if v.is_infinite() {
            divergent.push(*name);
        }
        if let Some(g) = gap {
            closed_form_gap = closed_form_gap.max(g);
        }
        values[k] = v;
    }
    Ok(PowerBounds {
        y_coeffs: [values[0], values[1], values[2]],
        u_coeffs: [values[3], values[4], values[5]],
        divergent,
        closed_form_gap,
    })
}

/// Comparison of one channel's power limit with its bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelReport {
    pub limit: f64,
    pub bound: f64,
    /// `limit − bound`; negative when infeasible.
    pub margin: f64,
    pub feasible: bool,
}

impl ChannelReport {
    fn new(limit: f64, bound: f64) -> Self {
        let margin = limit - bound;
        Self {
            limit,
            bound,
            margin,
            feasible: margin >= 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FeasibilityReport {
    pub u: ChannelReport,
    pub y: ChannelReport,
}

impl FeasibilityReport {
    pub fn feasible(&self) -> bool {
        self.u.feasible && self.y.feasible
    }
}

/// Checks the configured limits `Γu`, `Γy` against the bounds; equality is feasible.
pub fn feasibility_check(prob: &Problem, bounds: &PowerBounds) -> FeasibilityReport {
    let (sr, s1, s2) = (prob.sigma_r, prob.down.sigma, prob.up.sigma);
    FeasibilityReport {
        u: ChannelReport::new(prob.power.gamma_u, bounds.u_bound(sr, s1, s2)),
        y: ChannelReport::new(prob.power.gamma_y, bounds.y_bound(sr, s1, s2)),
    }
}
