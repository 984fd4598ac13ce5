use nalgebra::{DMatrix, DVector};

use super::FactorError;
use crate::ratfun::{close, poly_roots, side, Poly, RatFn, RootSet, Side};
use crate::{tol, C64};

/// Coprime factors `g = N/M` with a Bezout pair `X M − Y N = 1`.
#[derive(Clone, Debug)]
pub struct CoprimeData {
    pub n: RatFn,
    pub m: RatFn,
    pub x: RatFn,
    pub y: RatFn,
}

impl CoprimeData {
    /// `max |X M − Y N − 1|` over `s = jω` for the given frequencies.
    pub fn bezout_residual(&self, omegas: &[f64]) -> f64 {
        omegas
            .iter()
            .map(|&w| {
                (self.x.at_jw(w) * self.m.at_jw(w) - self.y.at_jw(w) * self.n.at_jw(w) - 1.0).norm()
            })
            .fold(0.0, f64::max)
    }

    /// All four factors proper and stable.
    pub fn all_in_rh_inf(&self) -> bool {
        [&self.n, &self.m, &self.x, &self.y].iter().all(|f| f.in_rh_inf())
    }
}

fn minus_one_pow(k: usize) -> RootSet {
    let mut s = RootSet::new();
    s.insert(C64::new(-1.0, 0.0), k);
    s
}

/// Coprime factorization over `c(s) = (s+1)^n`, `n = deg den g`.
///
/// `X = X̃/e`, `Y = Ỹ/e` with `e(s) = (s+1)^{n−1}` solve `X̃·den − Ỹ·num = c·e`
/// as a square Sylvester system. Stable `g` takes `N = g, M = 1, X = 1, Y = 0`.
pub fn coprime_bezout(g: &RatFn) -> Result<CoprimeData, FactorError> {
    if !g.is_proper() {
        return Err(FactorError::Improper {
            relative_degree: g.relative_degree(),
        });
    }
    if let Some(p) = g.axis_poles().iter().next() {
        return Err(FactorError::AxisPole { pole: p.point });
    }
    let closed_rhp = |z: C64| side(z) != Side::Left;
    for z in g.zeros().filter(closed_rhp).iter() {
        for p in g.poles().filter(closed_rhp).iter() {
            if close(z.point, p.point, tol::CANCELLATION) {
                return Err(FactorError::Unstabilizable {
                    zero: z.point,
                    pole: p.point,
                });
            }
        }
    }
    if g.is_stable() {
        return Ok(CoprimeData {
            n: g.clone(),
            m: RatFn::one(),
            x: RatFn::one(),
            y: RatFn::zero(),
        });
    }

    let n = g.poles().total();
    let den = g.den();
    let num = g.num();
    let c = minus_one_pow(n).poly();
    let e = minus_one_pow(n - 1).poly();
    let rhs = &c * &e;

    let size = 2 * n;
    let mut a = DMatrix::<C64>::zeros(size, size);
    for i in 0..n {
        for (k, &d) in den.coeffs().iter().enumerate() {
            a[(i + k, i)] += d;
        }
        for (k, &v) in num.coeffs().iter().enumerate() {
            a[(i + k, n + i)] -= v;
        }
    }
    let b = DVector::<C64>::from_iterator(
        size,
        (0..size).map(|k| rhs.coeffs().get(k).copied().unwrap_or_default()),
    );
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let rcond = if smax > 0.0 { smin / smax } else { 0.0 };
    if rcond < 1e-14 {
        return Err(FactorError::SingularSylvester { rcond });
    }
    let mut sol = svd
        .solve(&b, 0.0)
        .map_err(|_| FactorError::SingularSylvester { rcond })?;
    for _ in 0..3 {
        let resid = &b - &a * &sol;
        match svd.solve(&resid, 0.0) {
            Ok(dx) => sol += dx,
            Err(_) => break,
        }
    }
    let xt = Poly::new(sol.rows(0, n).iter().copied().collect());
    let yt = Poly::new(sol.rows(n, n).iter().copied().collect());

    let over_e = |p: &Poly| -> Result<RatFn, FactorError> {
        if p.is_zero() {
            return Ok(RatFn::zero());
        }
        let roots = poly_roots(p, tol::CLUSTER)?;
        Ok(RatFn::from_parts(p.lead(), roots, minus_one_pow(n - 1)))
    };
    Ok(CoprimeData {
        n: RatFn::from_parts(g.gain(), g.zeros().clone(), minus_one_pow(n)),
        m: RatFn::from_parts(C64::new(1.0, 0.0), g.poles().clone(), minus_one_pow(n)),
        x: over_e(&xt)?,
        y: over_e(&yt)?,
    })
}
