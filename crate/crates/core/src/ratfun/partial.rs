//! Partial-fraction expansion and closed-form H2 norms.

use super::{poly_roots, side, Poly, RatError, RatFn, RootSet, Side};
use crate::{tol, C64};

/// One partial-fraction term `coeff / (s − pole)^order`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidueTerm {
    pub pole: C64,
    pub order: usize,
    pub coeff: C64,
}

impl ResidueTerm {
    pub fn value(&self, s: C64) -> C64 {
        self.coeff / (s - self.pole).powu(self.order as u32)
    }
}

/// Full expansion: pole terms plus the polynomial (direct) part.
#[derive(Clone, Debug)]
pub struct PartialFractions {
    pub terms: Vec<ResidueTerm>,
    pub direct: Poly,
}

impl PartialFractions {
    pub fn value(&self, s: C64) -> C64 {
        self.terms.iter().map(|t| t.value(s)).sum::<C64>() + self.direct.eval(s)
    }
}

/// Sum of terms evaluated at `s`.
pub fn terms_value(terms: &[ResidueTerm], s: C64) -> C64 {
    terms.iter().map(|t| t.value(s)).sum()
}

fn series_mul(a: &[C64], b: &[C64], len: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); len];
    for (i, &x) in a.iter().enumerate().take(len) {
        for (j, &y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn series_pow(base: &[C64], k: usize, len: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); len];
    out[0] = C64::new(1.0, 0.0);
    for _ in 0..k {
        out = series_mul(&out, base, len);
    }
    out
}

impl RatFn {
    /// Taylor coefficients (in `t = s − p`) of `(s − p)^m g(s)` around a pole `p` of multiplicity `m`.
    fn local_series(&self, p: C64, len: usize) -> Vec<C64> {
        let mut acc = vec![C64::new(0.0, 0.0); len];
        acc[0] = self.gain();
        for z in self.zeros().iter() {
            let lin = [p - z.point, C64::new(1.0, 0.0)];
            acc = series_mul(&acc, &series_pow(&lin, z.mult, len), len);
        }
        for q in self.poles().iter() {
            if q.point == p {
                continue;
            }
            let c = p - q.point;
            let inv: Vec<C64> = (0..len)
                .map(|n| {
                    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                    sign / c.powu(n as u32 + 1)
                })
                .collect();
            acc = series_mul(&acc, &series_pow(&inv, q.mult, len), len);
        }
        acc
    }

    /// Complete partial-fraction expansion over every pole.
    pub fn partial_fractions(&self) -> PartialFractions {
        let mut terms = Vec::new();
        for r in self.poles().iter() {
            let series = self.local_series(r.point, r.mult);
            for (j, &c) in series.iter().enumerate() {
                if c != C64::new(0.0, 0.0) {
                    terms.push(ResidueTerm {
                        pole: r.point,
                        order: r.mult - j,
                        coeff: c,
                    });
                }
            }
        }
        let direct = if self.relative_degree() <= 0 && !self.is_zero() {
            self.num().div_rem(&self.den()).0
        } else {
            Poly::zero()
        };
        PartialFractions { terms, direct }
    }

    /// Rebuilds a canonical rational function from partial-fraction data.
    pub fn from_partial_fractions(terms: &[ResidueTerm], direct: &Poly) -> RatFn {
        let mut den = RootSet::new();
        for t in terms {
            let have = den.multiplicity_of(t.pole);
            if t.order > have {
                den.insert(t.pole, t.order - have);
            }
        }
        let mut parts: Vec<Poly> = terms
            .iter()
            .map(|t| Poly::from_roots(den.without(t.pole, t.order).flat(), t.coeff))
            .collect();
        parts.push(direct * &den.poly());
        let num = Poly::sum_trimmed(&parts);
        if num.is_zero() {
            return RatFn::zero();
        }
        let zeros = poly_roots(&num, tol::CLUSTER).expect("finite partial-fraction numerator");
        RatFn::from_parts(num.lead(), zeros, den)
    }
}

/// Pochhammer rising factorial `k (k+1) ... (k+n−1)`.
fn rising(k: usize, n: usize) -> f64 {
    (0..n).map(|i| (k + i) as f64).product()
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// The residue double sum
/// `Σ_i Σ_d r_id/(d−1)! · d^{d−1}/ds^{d−1}[Σ_j Σ_k (−1)^{k−1} conj(r_jk)/(s+conj(z_j))^k]` at `s = z_i`.
fn residue_double_sum(terms: &[ResidueTerm]) -> C64 {
    let mut total = C64::new(0.0, 0.0);
    for ti in terms {
        let d = ti.order;
        let scale = ti.coeff / factorial(d - 1);
        for tj in terms {
            let k = tj.order;
            let base = ti.pole + tj.pole.conj();
            let sign_k = if (k - 1) % 2 == 0 { 1.0 } else { -1.0 };
            let sign_d = if (d - 1) % 2 == 0 { 1.0 } else { -1.0 };
            let deriv = sign_d * rising(k, d - 1) / base.powu((k + d - 1) as u32);
            total += scale * sign_k * tj.coeff.conj() * deriv;
        }
    }
    total
}

/// `‖Σ terms‖₂²` for antistable terms by the closed-form residue double sum.
pub fn h2_cross_sum(terms: &[ResidueTerm]) -> Result<f64, RatError> {
    if let Some(t) = terms.iter().find(|t| side(t.pole) != Side::Right) {
        return Err(RatError::NotAntistable { pole: t.pole });
    }
    Ok(residue_double_sum(terms).re.max(0.0))
}

/// `(1/2π)∫|g(jω)|²dω` in closed form for stable strictly-proper `g`.
pub fn h2_norm_sq_closed(g: &RatFn) -> Result<f64, RatError> {
    if g.is_zero() {
        return Ok(0.0);
    }
    if !g.is_strictly_proper() {
        return Err(RatError::NotStrictlyProper {
            relative_degree: g.relative_degree(),
        });
    }
    let bad: Vec<C64> = g
        .poles()
        .iter()
        .filter(|r| side(r.point) != Side::Left)
        .map(|r| r.point)
        .collect();
    if !bad.is_empty() {
        return Err(RatError::Unstable { poles: bad });
    }
    let pf = g.partial_fractions();
    Ok((-residue_double_sum(&pf.terms).re).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn rf(num: &[f64], den: &[f64]) -> RatFn {
        RatFn::from_real_coeffs(num, den).unwrap()
    }

    #[test]
    fn two_point_partial_fractions() {
        let f = rf(&[1.0], &[-1.0, 0.0, 1.0]);
        let pf = f.partial_fractions();
        for t in &pf.terms {
            let expect = if t.pole.re > 0.0 { 0.5 } else { -0.5 };
            assert_eq!(t.order, 1);
            assert!((t.coeff - c(expect)).norm() < 1e-14);
        }
        assert!(pf.direct.is_zero());
    }

    #[test]
    fn rebuild_from_partial_fractions() {
        let f = rf(&[1.0, 0.0, 2.0, 1.0], &[2.0, -3.0, 0.0, 1.0]);
        let pf = f.partial_fractions();
        let back = RatFn::from_partial_fractions(&pf.terms, &pf.direct);
        assert!(back.approx_eq(&f, 1e-9));
    }

    #[test]
    fn closed_norms() {
        assert!((h2_norm_sq_closed(&rf(&[1.0], &[1.0, 1.0])).unwrap() - 0.5).abs() < 1e-15);
        assert!((h2_norm_sq_closed(&rf(&[1.0], &[4.0, 1.0])).unwrap() - 0.125).abs() < 1e-15);
        assert!((h2_norm_sq_closed(&rf(&[1.0], &[1.0, 2.0, 1.0])).unwrap() - 0.25).abs() < 1e-14);
    }

    #[test]
    fn closed_norm_rejects_bad_input() {
        assert!(matches!(
            h2_norm_sq_closed(&rf(&[1.0, 1.0], &[2.0, 1.0])),
            Err(RatError::NotStrictlyProper { .. })
        ));
        assert!(matches!(
            h2_norm_sq_closed(&rf(&[1.0], &[-1.0, 1.0])),
            Err(RatError::Unstable { .. })
        ));
    }

    #[test]
    fn cross_sum_scalars() {
        let t = |r: f64, z: f64, d| ResidueTerm { pole: c(z), order: d, coeff: c(r) };
        assert!((h2_cross_sum(&[t(1.0, 1.0, 1)]).unwrap() - 0.5).abs() < 1e-15);
        assert!((h2_cross_sum(&[t(2.0, 3.0, 1)]).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(h2_cross_sum(&[t(1.0, -1.0, 1)]).is_err());
    }
}
