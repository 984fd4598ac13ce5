//! Dense complex polynomials in ascending coefficient order.

use std::ops::{Add, Mul, Neg, Sub};

use crate::C64;

/// Coefficient noise multiplier used when trimming cancelled leading terms.
const NOISE_FACTOR: f64 = 64.0;

/// Complex polynomial `c0 + c1 s + ... + cn s^n`.
///
/// The leading coefficient is nonzero unless the polynomial is identically zero,
/// in which case the coefficient vector is empty.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    coeffs: Vec<C64>,
}

impl Poly {
    /// Builds a polynomial, trimming exact zeros at the top.
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while coeffs.last().is_some_and(|c| *c == C64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: C64) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(C64::new(1.0, 0.0))
    }

    /// `lead * Π (s - r)` over the given roots.
    pub fn from_roots<I: IntoIterator<Item = C64>>(roots: I, lead: C64) -> Self {
        let mut c = vec![lead];
        for r in roots {
            c.push(C64::new(0.0, 0.0));
            for k in (1..c.len()).rev() {
                c[k] = c[k - 1] - r * c[k];
            }
            c[0] = -r * c[0];
        }
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> C64 {
        self.coeffs.last().copied().unwrap_or_default()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn norm_inf(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, s: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &c| acc * s + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn scale(&self, k: C64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * k).collect())
    }

    /// Para-conjugate `conj(p(-conj(s)))`.
    pub fn para(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| if k % 2 == 0 { c.conj() } else { -c.conj() })
                .collect(),
        )
    }

    /// Monic copy; the zero polynomial is returned unchanged.
    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(C64::new(1.0, 0.0) / self.lead())
    }

    /// Quotient and remainder of division by a nonzero divisor.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by zero polynomial");
        let Some(nd) = self.degree() else {
            return (Poly::zero(), Poly::zero());
        };
        if nd < dd {
            return (Poly::zero(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let mut quo = vec![C64::new(0.0, 0.0); nd - dd + 1];
        let lead = d.lead();
        for k in (0..=nd - dd).rev() {
            let q = rem[k + dd] / lead;
            quo[k] = q;
            for (j, &dc) in d.coeffs.iter().enumerate() {
                rem[k + j] -= q * dc;
            }
        }
        rem.truncate(dd);
        (Poly::new(quo), Poly::new(rem))
    }

    /// Sum of the given polynomials, dropping leading coefficients that are
    /// indistinguishable from cancellation roundoff.
    pub fn sum_trimmed(terms: &[Poly]) -> Poly {
        let len = terms.iter().map(|p| p.coeffs.len()).max().unwrap_or(0);
        let mut sum = vec![C64::new(0.0, 0.0); len];
        let mut mag = vec![0.0; len];
        for p in terms {
            for (k, &c) in p.coeffs.iter().enumerate() {
                sum[k] += c;
                mag[k] += c.norm();
            }
        }
        let noise = NOISE_FACTOR * (len.max(1) as f64) * f64::EPSILON;
        while let Some(c) = sum.last() {
            let k = sum.len() - 1;
            if c.norm() <= noise * mag[k] {
                sum.pop();
            } else {
                break;
            }
        }
        Poly::new(sum)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let c = (0..n)
            .map(|k| {
                self.coeffs.get(k).copied().unwrap_or_default()
                    + rhs.coeffs.get(k).copied().unwrap_or_default()
            })
            .collect();
        Poly::new(c)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![C64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }
}
