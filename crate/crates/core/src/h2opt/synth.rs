use super::{FactorizationBundle, Gammas, H2Error, Problem};
use crate::ratfun::{side, RatFn, Side};
use crate::C64;

/// Youla parameters as closed-form rational functions, before any causality check.
#[derive(Clone, Debug)]
pub struct YoulaParams {
    pub q: RatFn,
    pub r: RatFn,
}

/// `R = Δ₀⁻¹Γ₃` (zero when `Δ` is degenerate) and `Q = ε₁ (F₁₀N₀)~ / (Λ₀~Λ₀)`.
pub fn optimal_params(
    prob: &Problem,
    bundle: &FactorizationBundle,
    gammas: &Gammas,
) -> Result<YoulaParams, H2Error> {
    let r = if bundle.delta.degenerate || gammas.g3_stable.is_zero() {
        RatFn::zero()
    } else {
        gammas.g3_stable.checked_div(&bundle.delta.outer)?
    };
    let l0 = &bundle.lambda.outer;
    let q = bundle
        .a()
        .para_conjugate()
        .scale_re(prob.weights.eps1)
        .checked_div(&(&l0.para_conjugate() * l0))?;
    Ok(YoulaParams { q, r })
}

/// Optimal two-parameter controller and its sensitivity.
#[derive(Clone, Debug)]
pub struct ControllerPair {
    pub q: RatFn,
    pub r: RatFn,
    pub k1: RatFn,
    pub k2: RatFn,
    /// `S = M (X − R N)`.
    pub s: RatFn,
    pub q_proper: bool,
    pub r_proper: bool,
}

impl ControllerPair {
    /// Largest `|1/(1 − K₂ F₂PF₁) − S|` relative to `|S|` on the given frequencies.
    pub fn loop_identity_residual(&self, prob: &Problem, omegas: &[f64]) -> f64 {
        let g = prob.loop_transfer();
        omegas
            .iter()
            .map(|&w| {
                let direct = C64::new(1.0, 0.0) / (1.0 - self.k2.at_jw(w) * g.at_jw(w));
                let s = self.s.at_jw(w);
                (direct - s).norm() / s.norm().max(1e-300)
            })
            .fold(0.0, f64::max)
    }
}

fn check_stable(name: &'static str, f: &RatFn) -> Result<(), H2Error> {
    let bad: Vec<C64> = f
        .poles()
        .iter()
        .filter(|r| side(r.point) != Side::Left)
        .map(|r| r.point)
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(H2Error::Synthesis {
            factor: name,
            reason: format!("poles outside the open left half-plane: {bad:?}"),
        })
    }
}

/// Assembles `K = (X − RN)⁻¹ [Q, Y − RM]` at the optimal parameters.
///
/// Unstable `Q` or `R` is an error; improperness is reported through the flags.
pub fn synth_controller(
    prob: &Problem,
    bundle: &FactorizationBundle,
    gammas: &Gammas,
) -> Result<ControllerPair, H2Error> {
    let YoulaParams { q, r } = optimal_params(prob, bundle, gammas)?;
    check_stable("Q", &q)?;
    check_stable("R", &r)?;
    let cp = &bundle.coprime;
    let x_rn = &cp.x - &(&r * &cp.n);
    if x_rn.is_zero() {
        return Err(H2Error::ControllerUndefined);
    }
    let k1 = q.checked_div(&x_rn)?;
    let k2 = (&cp.y - &(&r * &cp.m)).checked_div(&x_rn)?;
    let s = &cp.m * &x_rn;
    check_stable("S", &s)?;
    Ok(ControllerPair {
        q_proper: q.is_proper(),
        r_proper: r.is_proper(),
        q,
        r,
        k1,
        k2,
        s,
    })
}
