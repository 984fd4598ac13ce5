//! Scalar rational functions of `s` stored in factored (gain, zeros, poles) form.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::{poly_roots, Poly, RatError, RootSet};
use crate::{tol, C64};

/// Rational function `gain · Π(s − z)^m / Π(s − p)^n`.
///
/// The canonical form has no zero coinciding with a pole (within the clustering
/// tolerance), and the identically-zero function carries no roots. The coefficient
/// view is `num() / den()` with a monic `den()`.
#[derive(Clone, Debug, PartialEq)]
pub struct RatFn {
    gain: C64,
    zeros: RootSet,
    poles: RootSet,
}

/// Half-plane classification of a point relative to the imaginary axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Axis,
    Right,
}

pub fn side(z: C64) -> Side {
    if z.re > tol::AXIS {
        Side::Right
    } else if z.re < -tol::AXIS {
        Side::Left
    } else {
        Side::Axis
    }
}

impl RatFn {
    /// Canonical function from factored data; coinciding zeros and poles cancel.
    pub fn from_parts(gain: C64, zeros: RootSet, poles: RootSet) -> Self {
        if gain == C64::new(0.0, 0.0) {
            return Self::zero();
        }
        let common = zeros.intersection(&poles);
        Self {
            gain,
            zeros: zeros.difference(&common),
            poles: poles.difference(&common),
        }
    }

    pub fn from_zpk(gain: C64, zeros: &[C64], poles: &[C64]) -> Self {
        Self::from_parts(
            gain,
            RootSet::from_points(zeros.iter().copied()),
            RootSet::from_points(poles.iter().copied()),
        )
    }

    /// Canonical `num / den`.
    pub fn from_polys(num: &Poly, den: &Poly) -> Result<Self, RatError> {
        if den.is_zero() {
            return Err(RatError::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let z = poly_roots(num, tol::CLUSTER)?;
        let p = poly_roots(den, tol::CLUSTER)?;
        Ok(Self::from_parts(num.lead() / den.lead(), z, p))
    }

    /// Canonical function from real ascending coefficient arrays.
    pub fn from_real_coeffs(num: &[f64], den: &[f64]) -> Result<Self, RatError> {
        Self::from_polys(&Poly::from_real(num), &Poly::from_real(den))
    }

    pub fn zero() -> Self {
        Self {
            gain: C64::new(0.0, 0.0),
            zeros: RootSet::new(),
            poles: RootSet::new(),
        }
    }

    pub fn constant(c: C64) -> Self {
        Self::from_parts(c, RootSet::new(), RootSet::new())
    }

    pub fn real(c: f64) -> Self {
        Self::constant(C64::new(c, 0.0))
    }

    pub fn one() -> Self {
        Self::real(1.0)
    }

    /// `1 / (s + a)^k`.
    pub fn lag(a: C64, k: usize) -> Self {
        let mut poles = RootSet::new();
        poles.insert(-a, k);
        Self::from_parts(C64::new(1.0, 0.0), RootSet::new(), poles)
    }

    pub fn gain(&self) -> C64 {
        self.gain
    }

    pub fn zeros(&self) -> &RootSet {
        &self.zeros
    }

    pub fn poles(&self) -> &RootSet {
        &self.poles
    }

    pub fn num(&self) -> Poly {
        Poly::from_roots(self.zeros.flat(), self.gain)
    }

    /// Monic denominator.
    pub fn den(&self) -> Poly {
        self.poles.poly()
    }

    pub fn is_zero(&self) -> bool {
        self.gain == C64::new(0.0, 0.0)
    }

    /// `deg den − deg num`; zero for the zero function.
    pub fn relative_degree(&self) -> i64 {
        if self.is_zero() {
            return 0;
        }
        self.poles.total() as i64 - self.zeros.total() as i64
    }

    pub fn is_proper(&self) -> bool {
        self.is_zero() || self.relative_degree() >= 0
    }

    pub fn is_strictly_proper(&self) -> bool {
        self.is_zero() || self.relative_degree() >= 1
    }

    /// All poles strictly in the open left half-plane (beyond the axis tolerance).
    pub fn is_stable(&self) -> bool {
        self.poles.iter().all(|r| side(r.point) == Side::Left)
    }

    /// Proper and stable.
    pub fn in_rh_inf(&self) -> bool {
        self.is_proper() && self.is_stable()
    }

    pub fn rhp_poles(&self) -> RootSet {
        self.poles.filter(|z| side(z) == Side::Right)
    }

    pub fn rhp_zeros(&self) -> RootSet {
        self.zeros.filter(|z| side(z) == Side::Right)
    }

    pub fn axis_poles(&self) -> RootSet {
        self.poles.filter(|z| side(z) == Side::Axis)
    }

    pub fn axis_zeros(&self) -> RootSet {
        self.zeros.filter(|z| side(z) == Side::Axis)
    }

    /// Largest real part among the poles, or `None` without poles.
    pub fn max_pole_re(&self) -> Option<f64> {
        self.poles.iter().map(|r| r.point.re).reduce(f64::max)
    }

    /// Value at a point that is not a pole.
    pub fn eval(&self, s: C64) -> Result<C64, RatError> {
        if let Some(p) = self
            .poles
            .iter()
            .find(|r| (s - r.point).norm() <= tol::POLE_HIT * 1f64.max(r.point.norm()))
        {
            return Err(RatError::PoleHit { pole: p.point });
        }
        Ok(self.value(s))
    }

    /// Value without the pole-hit check.
    pub fn value(&self, s: C64) -> C64 {
        if self.is_zero() {
            return self.gain;
        }
        let mut v = self.gain;
        for r in self.zeros.iter() {
            v *= (s - r.point).powu(r.mult as u32);
        }
        for r in self.poles.iter() {
            v /= (s - r.point).powu(r.mult as u32);
        }
        v
    }

    /// Frequency response at `s = jω`.
    pub fn at_jw(&self, w: f64) -> C64 {
        self.value(C64::new(0.0, w))
    }

    /// Limit as `s → ∞`; `None` when improper.
    pub fn value_at_infinity(&self) -> Option<C64> {
        match self.relative_degree() {
            d if d > 0 => Some(C64::new(0.0, 0.0)),
            0 => Some(self.gain),
            _ => None,
        }
    }

    pub fn scale(&self, k: C64) -> RatFn {
        Self::from_parts(self.gain * k, self.zeros.clone(), self.poles.clone())
    }

    pub fn scale_re(&self, k: f64) -> RatFn {
        self.scale(C64::new(k, 0.0))
    }

    /// Reciprocal; fails on the zero function.
    pub fn recip(&self) -> Result<RatFn, RatError> {
        if self.is_zero() {
            return Err(RatError::DivisionByZero);
        }
        Ok(Self {
            gain: C64::new(1.0, 0.0) / self.gain,
            zeros: self.poles.clone(),
            poles: self.zeros.clone(),
        })
    }

    pub fn checked_div(&self, rhs: &RatFn) -> Result<RatFn, RatError> {
        Ok(self * &rhs.recip()?)
    }

    /// Para-conjugate `g~(s) = conj(g(−conj(s)))`.
    pub fn para_conjugate(&self) -> RatFn {
        if self.is_zero() {
            return Self::zero();
        }
        let flip = |z: C64| -z.conj();
        let sign = if self.relative_degree().rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        Self {
            gain: self.gain.conj() * sign,
            zeros: self.zeros.map(flip),
            poles: self.poles.map(flip),
        }
    }

    /// First derivative, assembled from the logarithmic derivative so that
    /// existing roots stay exact.
    pub fn derivative(&self) -> RatFn {
        if self.is_zero() || (self.zeros.is_empty() && self.poles.is_empty()) {
            return Self::zero();
        }
        let zs: Vec<_> = self.zeros.iter().copied().collect();
        let ps: Vec<_> = self.poles.iter().copied().collect();
        let distinct: Vec<C64> = zs.iter().chain(ps.iter()).map(|r| r.point).collect();
        let mut terms = Vec::with_capacity(distinct.len());
        for (i, r) in zs.iter().chain(ps.iter()).enumerate() {
            let w = if i < zs.len() { r.mult as f64 } else { -(r.mult as f64) };
            let others = distinct
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != i)
                .map(|(_, &p)| p);
            terms.push(Poly::from_roots(others, C64::new(w, 0.0)));
        }
        let w = Poly::sum_trimmed(&terms);
        if w.is_zero() {
            return Self::zero();
        }
        let w_roots = poly_roots(&w, tol::CLUSTER).expect("finite derivative numerator");
        let mut zeros = RootSet::new();
        for r in &zs {
            zeros.insert(r.point, r.mult - 1);
        }
        let zeros = zeros.union(&w_roots);
        let mut poles = RootSet::new();
        for r in &ps {
            poles.insert(r.point, r.mult + 1);
        }
        Self::from_parts(self.gain * w.lead(), zeros, poles)
    }

    /// `n`-th derivative.
    pub fn derivative_n(&self, n: usize) -> RatFn {
        (0..n).fold(self.clone(), |g, _| g.derivative())
    }

    /// Canonical equality up to `rel` relative tolerance on gain and roots.
    pub fn approx_eq(&self, other: &RatFn, rel: f64) -> bool {
        if self.is_zero() || other.is_zero() {
            return self.is_zero() && other.is_zero();
        }
        (self.gain - other.gain).norm() <= rel * self.gain.norm().max(other.gain.norm())
            && self.zeros.approx_eq(&other.zeros, rel)
            && self.poles.approx_eq(&other.poles, rel)
    }

    /// Reflects every open-RHP zero and pole to its mirror image, keeping the axis magnitude.
    pub fn reflect_rhp(&self) -> RatFn {
        let flip = |z: C64| if side(z) == Side::Right { -z.conj() } else { z };
        Self::from_parts(self.gain, self.zeros.map(flip), self.poles.map(flip))
    }
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        write!(f, "({:.6})", self.gain)?;
        for r in self.zeros.iter() {
            write!(f, "(s-({:.6}))^{}", r.point, r.mult)?;
        }
        if !self.poles.is_empty() {
            write!(f, " / ")?;
            for r in self.poles.iter() {
                write!(f, "(s-({:.6}))^{}", r.point, r.mult)?;
            }
        }
        Ok(())
    }
}

impl Mul for &RatFn {
    type Output = RatFn;
    fn mul(self, rhs: &RatFn) -> RatFn {
        if self.is_zero() || rhs.is_zero() {
            return RatFn::zero();
        }
        RatFn::from_parts(
            self.gain * rhs.gain,
            self.zeros.union(&rhs.zeros),
            self.poles.union(&rhs.poles),
        )
    }
}

impl Div for &RatFn {
    type Output = RatFn;
    /// Panics when `rhs` is identically zero; see [`RatFn::checked_div`].
    fn div(self, rhs: &RatFn) -> RatFn {
        self.checked_div(rhs).expect("division by the zero rational function")
    }
}

impl Neg for &RatFn {
    type Output = RatFn;
    fn neg(self) -> RatFn {
        self.scale_re(-1.0)
    }
}

impl Add for &RatFn {
    type Output = RatFn;
    fn add(self, rhs: &RatFn) -> RatFn {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let common = self.zeros.intersection(&rhs.zeros);
        let den = self.poles.lcm(&rhs.poles);
        let part = |g: &RatFn| {
            let extra = den.difference(&g.poles);
            let own = g.zeros.difference(&common);
            Poly::from_roots(own.flat().chain(extra.flat()), g.gain)
        };
        let (pa, pb) = (part(self), part(rhs));
        let mut num = Poly::sum_trimmed(&[pa.clone(), pb.clone()]);
        if num.is_zero() {
            return RatFn::zero();
        }
        let mut poles = RootSet::new();
        for r in den.iter() {
            let both = self.poles.multiplicity_of(r.point) == r.mult
                && rhs.poles.multiplicity_of(r.point) == r.mult;
            let k = if both { cancelled_orders(&pa, &pb, r.point, r.mult) } else { 0 };
            if k > 0 {
                let lin = Poly::from_roots(std::iter::repeat_n(r.point, k), C64::new(1.0, 0.0));
                num = num.div_rem(&lin).0;
                if num.is_zero() {
                    return RatFn::zero();
                }
            }
            poles.insert(r.point, r.mult - k);
        }
        let roots = poly_roots(&num, tol::CLUSTER).expect("finite sum numerator");
        RatFn { gain: num.lead(), zeros: roots.union(&common), poles }
    }
}

/// Number of leading Laurent orders at a shared pole that cancel in the sum of two numerators.
fn cancelled_orders(pa: &Poly, pb: &Poly, p: C64, mult: usize) -> usize {
    let (mut da, mut db) = (pa.clone(), pb.clone());
    for j in 0..mult {
        let (x, y) = (da.eval(p), db.eval(p));
        if (x + y).norm() > tol::CLUSTER * (x.norm() + y.norm()) {
            return j;
        }
        da = da.derivative();
        db = db.derivative();
    }
    mult
}

impl Sub for &RatFn {
    type Output = RatFn;
    fn sub(self, rhs: &RatFn) -> RatFn {
        self + &(-rhs)
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for RatFn {
            type Output = RatFn;
            fn $m(self, rhs: RatFn) -> RatFn { (&self).$m(&rhs) }
        }
        impl $tr<&RatFn> for RatFn {
            type Output = RatFn;
            fn $m(self, rhs: &RatFn) -> RatFn { (&self).$m(rhs) }
        }
        impl $tr<RatFn> for &RatFn {
            type Output = RatFn;
            fn $m(self, rhs: RatFn) -> RatFn { self.$m(&rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl Neg for RatFn {
    type Output = RatFn;
    fn neg(self) -> RatFn {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn rf(num: &[f64], den: &[f64]) -> RatFn {
        RatFn::from_real_coeffs(num, den).unwrap()
    }

    #[test]
    fn allpass_on_axis() {
        let g = rf(&[-1.0, 1.0], &[1.0, 1.0]);
        let v = g.eval(c(0.0, 1.0)).unwrap();
        assert!((v - c(0.0, 1.0)).norm() < 1e-14);
        assert!((v.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn lag_at_origin() {
        assert!((rf(&[1.0], &[1.0, 1.0]).eval(c(0.0, 0.0)).unwrap() - 1.0).norm() < 1e-15);
    }

    #[test]
    fn eval_matches_direct_arithmetic() {
        let g = rf(&[-3.0, 1.0], &[-2.0, -1.0, 1.0]);
        let s = c(0.0, 1.0);
        let direct = (s - 3.0) / ((s + 1.0) * (s - 2.0));
        assert!((g.eval(s).unwrap() - direct).norm() < 1e-14);
    }

    #[test]
    fn pole_hit_reports_root() {
        let g = rf(&[1.0], &[1.0, 1.0]);
        match g.eval(c(-1.0, 0.0)) {
            Err(RatError::PoleHit { pole }) => assert!((pole + 1.0).norm() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn common_roots_cancel() {
        let g = rf(&[-2.0, 1.0], &[-2.0, -1.0, 1.0]);
        assert_eq!(g.poles().total(), 1);
        assert!(g.zeros().is_empty());
    }

    #[test]
    fn derivative_of_lag() {
        let d = rf(&[1.0], &[1.0, 1.0]).derivative_n(1);
        assert!(d.approx_eq(&RatFn::lag(c(1.0, 0.0), 2).scale_re(-1.0), 1e-12));
    }

    #[test]
    fn zeroth_derivative_is_identity() {
        let g = rf(&[1.0, 2.0], &[3.0, 1.0, 1.0]);
        assert_eq!(g.derivative_n(0), g);
    }

    #[test]
    fn second_derivative_matches_finite_differences() {
        let g = rf(&[0.0, 1.0], &[2.0, 1.0]);
        let d2 = g.derivative_n(2);
        let expected = rf(&[-4.0], &[8.0, 12.0, 6.0, 1.0]);
        assert!(d2.approx_eq(&expected, 1e-10));
        let d1 = g.derivative();
        let h = 1e-5;
        for x in [0.3, -0.7, 1.1, 2.5, 4.0] {
            let s = c(x, 0.2);
            let fd = (d1.value(s + h) - d1.value(s - h)) / (2.0 * h);
            let exact = d2.value(s);
            assert!((fd - exact).norm() <= 1e-6 * exact.norm().max(1.0));
        }
    }

    #[test]
    fn para_conjugate_examples() {
        let g = rf(&[1.0], &[1.0, 1.0]);
        assert!(g.para_conjugate().approx_eq(&rf(&[1.0], &[1.0, -1.0]), 1e-14));
        let k = RatFn::constant(c(2.0, 3.0));
        assert!(k.para_conjugate().approx_eq(&RatFn::constant(c(2.0, -3.0)), 1e-15));
        let g = RatFn::from_polys(
            &Poly::new(vec![c(2.0, 0.0), c(1.0, 1.0)]),
            &Poly::from_real(&[3.0, 1.0]),
        )
        .unwrap();
        let gt = g.para_conjugate();
        for k in 0..10 {
            let w = -3.0 + 0.7 * k as f64;
            assert!((gt.at_jw(w) - g.at_jw(w).conj()).norm() < 1e-13);
        }
    }

    #[test]
    fn sum_and_difference() {
        let a = rf(&[1.0], &[1.0, 1.0]);
        let b = rf(&[1.0], &[2.0, 1.0]);
        let s = &a + &b;
        let expected = rf(&[3.0, 2.0], &[2.0, 3.0, 1.0]);
        assert!(s.approx_eq(&expected, 1e-12));
        assert!((&a - &a).is_zero());
    }

    #[test]
    fn product_quotient_roundtrip() {
        let a = rf(&[1.0, 2.0], &[3.0, 1.0, 1.0]);
        let b = rf(&[-1.0, 0.0, 1.0], &[5.0, 1.0]);
        assert!(((&a * &b) / &b).approx_eq(&a, 1e-12));
    }
}
