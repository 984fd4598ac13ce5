use super::{build_bundle, compute_gammas, FactorizationBundle, Gammas, H2Error, Problem};
use crate::oracle::{integrate_axis, QuadOptions};
use crate::ratfun::h2_cross_sum;

/// Itemized optimal performance.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PerfBreakdown {
    /// `2ε₁σᵣ² Σ Re z` over RHP zeros of `P` and `F₁`.
    pub term_zero_sum: f64,
    pub term_g1: f64,
    pub term_g2: f64,
    pub term_g3: f64,
    /// `‖(I − ΔᵢΔᵢ~)[Γ₁; Γ₂]‖₂²`.
    pub term_residual: f64,
    /// `σᵣ² Υ₁`.
    pub term_upsilon: f64,
    /// `−ε₂Γu − ε₃Γy`.
    pub term_power: f64,
    pub total: f64,
}

impl PerfBreakdown {
    pub const FIELDS: [&'static str; 8] = [
        "total",
        "term_zero_sum",
        "term_g1",
        "term_g2",
        "term_g3",
        "term_residual",
        "term_upsilon",
        "term_power",
    ];

    pub fn terms_sum(&self) -> f64 {
        self.term_zero_sum
            + self.term_g1
            + self.term_g2
            + self.term_g3
            + self.term_residual
            + self.term_upsilon
            + self.term_power
    }

    /// Field by name, as listed in [`PerfBreakdown::FIELDS`].
    pub fn field(&self, name: &str) -> Option<f64> {
        Some(match name {
            "total" => self.total,
            "term_zero_sum" => self.term_zero_sum,
            "term_g1" => self.term_g1,
            "term_g2" => self.term_g2,
            "term_g3" => self.term_g3,
            "term_residual" => self.term_residual,
            "term_upsilon" => self.term_upsilon,
            "term_power" => self.term_power,
            _ => return None,
        })
    }
}

/// Pointwise `|F₁₀N₀(jω)|²`, `|Mm(jω)|²` and `|Λ₀(jω)|²`.
fn lambda_magnitudes(prob: &Problem, bundle: &FactorizationBundle, a: &crate::ratfun::RatFn, w: f64) -> (f64, f64, f64) {
    let e = prob.weights;
    let a2 = a.at_jw(w).norm_sqr();
    let m2 = bundle.mm.at_jw(w).norm_sqr();
    (a2, m2, (e.eps1 + e.eps3) * a2 + e.eps2 * m2)
}

/// Literal pointwise density `υ(ω) = ε₁ (ε₂|Mm|² + ε₃|F₁₀N₀|²) / |Λ₀|²` of the `Υ₁` norm.
pub fn upsilon_density(prob: &Problem, bundle: &FactorizationBundle, w: f64) -> f64 {
    let e = prob.weights;
    let (a2, m2, l2) = lambda_magnitudes(prob, bundle, &bundle.a(), w);
    e.eps1 * (e.eps2 * m2 + e.eps3 * a2) / l2
}

/// High-frequency floor `lim υ(ω)` as `ω → ∞`.
pub fn upsilon_floor(prob: &Problem) -> f64 {
    let e = prob.weights;
    if e.eps2 > 0.0 {
        e.eps1
    } else {
        e.eps1 * e.eps3 / (e.eps1 + e.eps3)
    }
}

/// `Υ₁ = (1/2π)∫(υ(ω) − υ∞) dω`, the `Υ₁` norm with its controller-independent
/// high-frequency floor removed so that it is finite.
///
/// With `ε₂ = 0` the density is constant and `Υ₁ = 0`; otherwise
/// `υ − υ∞ = −ε₁²|F₁₀N₀|²/|Λ₀|²` is integrated by quadrature.
pub fn compute_upsilon1(
    prob: &Problem,
    bundle: &FactorizationBundle,
    opts: &QuadOptions,
) -> Result<f64, H2Error> {
    let e = prob.weights;
    if e.eps2 == 0.0 {
        return Ok(0.0);
    }
    let a = bundle.a();
    let r = integrate_axis(
        |w| {
            let (a2, _, l2) = lambda_magnitudes(prob, bundle, &a, w);
            -e.eps1 * e.eps1 * a2 / l2
        },
        opts,
    )?;
    Ok(r.value)
}

/// `‖(I − ΔᵢΔᵢ~)[Γ₁; Γ₂]‖₂²` via the pointwise identity `|i₁Γ₂ − i₂Γ₁|² / (|i₁|² + |i₂|²)`.
pub fn compute_residual(
    bundle: &FactorizationBundle,
    gammas: &Gammas,
    opts: &QuadOptions,
) -> Result<f64, H2Error> {
    if bundle.delta.degenerate || (gammas.g1_stable.is_zero() && gammas.g2_stable.is_zero()) {
        return Ok(0.0);
    }
    let rows = bundle.delta.inner.rows();
    let r = integrate_axis(
        |w| {
            let (i1, i2) = (rows[0].at_jw(w), rows[1].at_jw(w));
            let (v1, v2) = (gammas.g1_stable.at_jw(w), gammas.g2_stable.at_jw(w));
            (i1 * v2 - i2 * v1).norm_sqr() / (i1.norm_sqr() + i2.norm_sqr())
        },
        opts,
    )?;
    Ok(r.value.max(0.0))
}

/// Factorizations, decompositions and the itemized optimum for one problem.
#[derive(Clone, Debug)]
pub struct Solution {
    pub bundle: FactorizationBundle,
    pub gammas: Gammas,
    pub breakdown: PerfBreakdown,
}

/// Runs the full closed-form pipeline.
pub fn solve(prob: &Problem, opts: &QuadOptions) -> Result<Solution, H2Error> {
    let bundle = build_bundle(prob)?;
    let gammas = compute_gammas(prob, &bundle)?;
    let e = prob.weights;
    let sr2 = prob.sigma_r * prob.sigma_r;
    let mut b = PerfBreakdown {
        term_zero_sum: 2.0 * e.eps1 * sr2 * prob.rhp_zero_re_sum(),
        term_g1: h2_cross_sum(&gammas.g1_terms)?,
        term_g2: h2_cross_sum(&gammas.g2_terms)?,
        term_g3: h2_cross_sum(&gammas.g3_terms)?,
        term_residual: compute_residual(&bundle, &gammas, opts)?,
        term_upsilon: if sr2 > 0.0 {
            sr2 * compute_upsilon1(prob, &bundle, opts)?
        } else {
            0.0
        },
        term_power: -e.eps2 * prob.power.gamma_u - e.eps3 * prob.power.gamma_y,
        total: 0.0,
    };
    b.total = b.terms_sum();
    Ok(Solution {
        bundle,
        gammas,
        breakdown: b,
    })
}

/// Optimal performance `J*` with default quadrature settings.
pub fn compute_jstar(prob: &Problem) -> Result<PerfBreakdown, H2Error> {
    compute_jstar_with(prob, &QuadOptions::default())
}

pub fn compute_jstar_with(prob: &Problem, opts: &QuadOptions) -> Result<PerfBreakdown, H2Error> {
    solve(prob, opts).map(|s| s.breakdown)
}
