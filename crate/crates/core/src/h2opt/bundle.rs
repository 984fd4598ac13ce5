use super::{H2Error, Problem};
use crate::factor::{
    blaschke, coprime_bezout, min_phase_split, spectral_outer, ColumnTF, CoprimeData, FactorError,
    InnerOuter,
};
use crate::ratfun::RatFn;

/// Every factor the closed-form optimum is assembled from.
#[derive(Clone, Debug)]
pub struct FactorizationBundle {
    /// Coprime data of `F₂ P F₁`.
    pub coprime: CoprimeData,
    /// Blaschke product of the RHP zeros of `N`.
    pub l: RatFn,
    /// Blaschke product of the RHP zeros of `M` (unstable poles of the loop).
    pub b: RatFn,
    /// `N̂ = P M`.
    pub n_hat: RatFn,
    pub n0: RatFn,
    pub nm: RatFn,
    pub mm: RatFn,
    pub f10: RatFn,
    pub f20: RatFn,
    pub lg: RatFn,
    pub lf1: RatFn,
    pub lf2: RatFn,
    pub omega: InnerOuter,
    pub delta: InnerOuter,
    pub lambda: InnerOuter,
}

fn in_stack(stack: &'static str) -> impl Fn(FactorError) -> H2Error {
    move |source| H2Error::Factor { stack, source }
}

impl FactorizationBundle {
    /// `F₁₀ N₀`, the minimum-phase part of the reference-to-output map.
    pub fn a(&self) -> RatFn {
        &self.f10 * &self.n0
    }

    /// Worst relative mismatch of `N = L Nm`, `Nm = F₁₀F₂₀N₀`, `M = B Mm` on the given frequencies.
    pub fn identity_residual(&self, omegas: &[f64]) -> f64 {
        let pairs = [
            (self.coprime.n.clone(), &self.l * &self.nm),
            (self.nm.clone(), &(&self.f10 * &self.f20) * &self.n0),
            (self.coprime.m.clone(), &self.b * &self.mm),
        ];
        pairs
            .iter()
            .flat_map(|(lhs, rhs)| {
                omegas.iter().map(move |&w| {
                    let (a, b) = (lhs.at_jw(w), rhs.at_jw(w));
                    (a - b).norm() / a.norm().max(1e-300)
                })
            })
            .fold(0.0, f64::max)
    }

    /// Stacked column whose outer factor is `Ω₀`.
    pub fn omega_column(prob: &Problem, n0: &RatFn, f10: &RatFn, f20: &RatFn, mm: &RatFn) -> ColumnTF {
        let w = prob.weights;
        ColumnTF::new(vec![
            (&(f10 * n0) * &prob.up.h).scale_re(prob.up.sigma * (w.eps1 + w.eps3).sqrt()),
            (&(f20 * n0) * &prob.down.h).scale_re(prob.down.sigma * w.eps2.sqrt()),
            (mm * &prob.up.h).scale_re(prob.up.sigma * w.eps2.sqrt()),
        ])
    }
}

/// Builds coprime, all-pass/minimum-phase and inner–outer factors for `prob`.
pub fn build_bundle(prob: &Problem) -> Result<FactorizationBundle, H2Error> {
    let w = prob.weights;
    let coprime = coprime_bezout(&prob.loop_transfer()).map_err(in_stack("coprime"))?;
    let n_hat = &prob.plant * &coprime.m;
    let (lg, n0) = min_phase_split(&n_hat).map_err(in_stack("plant"))?;
    let (lf1, f10) = min_phase_split(&prob.down.f).map_err(in_stack("channel_down"))?;
    let (lf2, f20) = min_phase_split(&prob.up.f).map_err(in_stack("channel_up"))?;
    let (l, nm) = min_phase_split(&coprime.n).map_err(in_stack("N"))?;
    let b = blaschke(&coprime.m.rhp_zeros()).map_err(in_stack("M"))?;
    let mm = &coprime.m / &b;

    let omega = spectral_outer(&FactorizationBundle::omega_column(prob, &n0, &f10, &f20, &mm))
        .map_err(in_stack("omega"))?;
    let delta_col = ColumnTF::new(vec![
        (&(&n0 * &prob.down.h) * &nm).scale_re(prob.down.sigma * (w.eps1 + w.eps3).sqrt()),
        &omega.outer * &mm,
    ]);
    let delta = spectral_outer(&delta_col).map_err(in_stack("delta"))?;
    let a = &f10 * &n0;
    let lambda_col = ColumnTF::new(vec![
        a.scale_re(-w.eps1.sqrt()),
        mm.scale_re(w.eps2.sqrt()),
        a.scale_re(w.eps3.sqrt()),
    ]);
    let lambda = spectral_outer(&lambda_col).map_err(in_stack("lambda"))?;

    Ok(FactorizationBundle {
        coprime,
        l,
        b,
        n_hat,
        n0,
        nm,
        mm,
        f10,
        f20,
        lg,
        lf1,
        lf2,
        omega,
        delta,
        lambda,
    })
}
