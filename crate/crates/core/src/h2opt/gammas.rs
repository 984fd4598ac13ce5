use super::{FactorizationBundle, H2Error, Problem};
use crate::ratfun::{side, RatFn, ResidueTerm, RootSet, Side};

/// Splits `f` into antistable terms at its declared RHP poles plus a stable remainder.
pub fn antistable_project(
    f: &RatFn,
    rhp_poles: &RootSet,
) -> Result<(Vec<ResidueTerm>, RatFn), H2Error> {
    if f.is_zero() {
        return Ok((Vec::new(), RatFn::zero()));
    }
    if let Some(p) = f.axis_poles().iter().next() {
        return Err(H2Error::AxisRoot { what: "pole", root: p.point });
    }
    let actual = f.rhp_poles();
    if !actual.approx_eq(rhp_poles, 1e-6) {
        return Err(H2Error::PoleMismatch {
            declared: rhp_poles.flat().collect(),
            actual: actual.flat().collect(),
        });
    }
    let pf = f.partial_fractions();
    let (anti, stable): (Vec<ResidueTerm>, Vec<ResidueTerm>) =
        pf.terms.into_iter().partition(|t| side(t.pole) == Side::Right);
    Ok((anti, RatFn::from_partial_fractions(&stable, &pf.direct)))
}

/// Sums the coefficients of terms sharing a pole and order.
fn merge_terms(terms: Vec<ResidueTerm>) -> Vec<ResidueTerm> {
    let mut out: Vec<ResidueTerm> = Vec::with_capacity(terms.len());
    for t in terms {
        match out.iter_mut().find(|u| u.order == t.order && u.pole == t.pole) {
            Some(u) => u.coeff += t.coeff,
            None => out.push(t),
        }
    }
    out
}

/// Generating functions and their antistable/stable decompositions.
#[derive(Clone, Debug)]
pub struct Gammas {
    pub g1_source: RatFn,
    pub g1_terms: Vec<ResidueTerm>,
    pub g1_stable: RatFn,
    pub g2_source: RatFn,
    pub g2_terms: Vec<ResidueTerm>,
    pub g2_stable: RatFn,
    pub g3_source: RatFn,
    pub g3_terms: Vec<ResidueTerm>,
    pub g3_stable: RatFn,
}

/// `Γ₁` from `σ₁√(ε₁+ε₃)N₀H₁XL⁻¹`, `Γ₂` from `Ω₀YB⁻¹`, `Γ₃` from `Δᵢ~[Γ₁; Γ₂]`.
pub fn compute_gammas(prob: &Problem, bundle: &FactorizationBundle) -> Result<Gammas, H2Error> {
    let w = prob.weights;
    let k1 = prob.down.sigma * (w.eps1 + w.eps3).sqrt();
    let g1_source = if prob.down.is_noisy() {
        (&(&(&bundle.n0 * &prob.down.h) * &bundle.coprime.x) / &bundle.l).scale_re(k1)
    } else {
        RatFn::zero()
    };
    let (g1_terms, g1_stable) = antistable_project(&g1_source, bundle.l.zeros())?;

    let g2_source = if bundle.omega.degenerate {
        RatFn::zero()
    } else {
        &(&bundle.omega.outer * &bundle.coprime.y) / &bundle.b
    };
    let (g2_terms, g2_stable) = antistable_project(&g2_source, bundle.b.zeros())?;

    let (g3_source, g3_terms, g3_stable) = if bundle.delta.degenerate {
        (RatFn::zero(), Vec::new(), RatFn::zero())
    } else {
        let rows = bundle.delta.inner.rows();
        let parts = [
            &rows[0].para_conjugate() * &g1_stable,
            &rows[1].para_conjugate() * &g2_stable,
        ];
        // Each product is projected in factored form; projecting their sum
        // would re-root its numerator and lose accuracy in the residues.
        let mut terms = Vec::new();
        let mut stable = RatFn::zero();
        for part in &parts {
            let (t, st) = antistable_project(part, &part.rhp_poles())?;
            terms.extend(t);
            stable = &stable + &st;
        }
        (&parts[0] + &parts[1], merge_terms(terms), stable)
    };

    Ok(Gammas {
        g1_source,
        g1_terms,
        g1_stable,
        g2_source,
        g2_terms,
        g2_stable,
        g3_source,
        g3_terms,
        g3_stable,
    })
}
