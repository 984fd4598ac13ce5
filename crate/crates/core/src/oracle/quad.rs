//! Adaptive Gauss–Kronrod quadrature over the imaginary axis.
//!
//! Integrals `(1/2π)∫ f(ω) dω` over the real line are mapped to `(−π/2, π/2)`
//! by `ω = tan θ` and integrated with a globally adaptive 7/15-point rule.

use std::collections::BinaryHeap;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::ratfun::RatFn;
use crate::tol;

/// Kronrod abscissae (nonnegative half), descending.
const XK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
/// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the center.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: tol::QUAD,
            abs_tol: 1e-14,
            max_intervals: 20_000,
        }
    }
}

impl QuadOptions {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuadError {
    #[error("quadrature did not converge: error estimate {achieved:.3e} exceeds target {requested:.3e}")]
    NonConvergence { value: f64, achieved: f64, requested: f64 },
    #[error("integrand does not decay along the axis")]
    Divergent,
    #[error("non-finite integrand at omega = {omega}")]
    NonFinite { omega: f64 },
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<(f64, f64), f64> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    if !fc.is_finite() {
        return Err(c);
    }
    let mut k = WK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let x = h * XK[i];
        let (f1, f2) = (f(c - x), f(c + x));
        if !f1.is_finite() {
            return Err(c - x);
        }
        if !f2.is_finite() {
            return Err(c + x);
        }
        k += WK[i] * (f1 + f2);
        if i % 2 == 1 {
            g += WG[i / 2] * (f1 + f2);
        }
    }
    Ok((k * h, ((k - g) * h).abs()))
}

/// `∫_a^b f(x) dx` by globally adaptive Gauss–Kronrod.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    opts: &QuadOptions,
) -> Result<QuadResult, QuadError> {
    const INITIAL: usize = 16;
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    let width = (b - a) / INITIAL as f64;
    for i in 0..INITIAL {
        let (lo, hi) = (a + i as f64 * width, a + (i + 1) as f64 * width);
        let (value, error) = gk15(&f, lo, hi).map_err(|x| QuadError::NonFinite { omega: x })?;
        evaluations += 15;
        heap.push(Segment { a: lo, b: hi, value, error });
    }
    loop {
        let value: f64 = heap.iter().map(|s| s.value).sum();
        let error: f64 = heap.iter().map(|s| s.error).sum();
        let target = opts.abs_tol.max(opts.rel_tol * value.abs());
        if error <= target {
            return Ok(QuadResult { value, error, evaluations });
        }
        if heap.len() >= opts.max_intervals {
            return Err(QuadError::NonConvergence {
                value,
                achieved: error,
                requested: target,
            });
        }
        let worst = heap.pop().expect("nonempty segment heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(QuadError::NonConvergence {
                value,
                achieved: error,
                requested: target,
            });
        }
        for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error) = gk15(&f, lo, hi).map_err(|x| QuadError::NonFinite { omega: x })?;
            evaluations += 15;
            heap.push(Segment { a: lo, b: hi, value, error });
        }
    }
}

/// `(1/2π)∫_{−∞}^{∞} f(ω) dω` for an integrand decaying at least like `1/ω²`.
pub fn integrate_axis<F: Fn(f64) -> f64>(f: F, opts: &QuadOptions) -> Result<QuadResult, QuadError> {
    let tail = |w: f64| f(w).abs().max(f(-w).abs()) * w * w;
    let (t1, t2) = (tail(1e6), tail(1e9));
    if t2.is_finite() && t1.is_finite() && t2 > 10.0 * t1.max(f64::MIN_POSITIVE) && t2 > 1e-300 {
        return Err(QuadError::Divergent);
    }
    let mapped = |theta: f64| {
        let w = theta.tan();
        let sec2 = 1.0 + w * w;
        f(w) * sec2
    };
    let scaled = QuadOptions {
        abs_tol: opts.abs_tol * 2.0 * PI,
        ..*opts
    };
    let r = integrate(mapped, -FRAC_PI_2, FRAC_PI_2, &scaled).map_err(|e| match e {
        QuadError::NonConvergence { value, achieved, requested } => QuadError::NonConvergence {
            value: value / (2.0 * PI),
            achieved: achieved / (2.0 * PI),
            requested: requested / (2.0 * PI),
        },
        other => other,
    })?;
    Ok(QuadResult {
        value: r.value / (2.0 * PI),
        error: r.error / (2.0 * PI),
        evaluations: r.evaluations,
    })
}

/// `‖g‖₂²` by quadrature of `|g(jω)|²`.
pub fn h2_norm_sq_quad(g: &RatFn, opts: &QuadOptions) -> Result<f64, QuadError> {
    h2_norm_sq_quad_rows(std::slice::from_ref(g), opts)
}

/// `Σ_rows ‖row‖₂²` by quadrature of the summed squared magnitudes.
pub fn h2_norm_sq_quad_rows(rows: &[RatFn], opts: &QuadOptions) -> Result<f64, QuadError> {
    if rows.iter().any(|r| !r.is_strictly_proper()) {
        return Err(QuadError::Divergent);
    }
    if rows.iter().all(RatFn::is_zero) {
        return Ok(0.0);
    }
    integrate_axis(|w| rows.iter().map(|r| r.at_jw(w).norm_sqr()).sum(), opts).map(|r| r.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exactness() {
        let r = integrate(|x| x.powi(6), 0.0, 1.0, &QuadOptions::default()).unwrap();
        assert!((r.value - 1.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn first_order_lag() {
        let g = RatFn::from_real_coeffs(&[1.0], &[1.0, 1.0]).unwrap();
        assert!((h2_norm_sq_quad(&g, &QuadOptions::default()).unwrap() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn rows_add() {
        let g = RatFn::from_real_coeffs(&[1.0], &[1.0, 1.0]).unwrap();
        let v = h2_norm_sq_quad_rows(&[g.clone(), g], &QuadOptions::default()).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn non_decaying_rejected() {
        let g = RatFn::from_real_coeffs(&[1.0, 1.0], &[2.0, 1.0]).unwrap();
        assert_eq!(h2_norm_sq_quad(&g, &QuadOptions::default()), Err(QuadError::Divergent));
        assert_eq!(
            integrate_axis(|_| 1.0, &QuadOptions::default()).unwrap_err(),
            QuadError::Divergent
        );
    }

    #[test]
    fn sharp_resonance() {
        let g = RatFn::from_real_coeffs(&[1.0], &[1.0, 0.02, 1.0]).unwrap();
        let exact = crate::ratfun::h2_norm_sq_closed(&g).unwrap();
        let q = h2_norm_sq_quad(&g, &QuadOptions::default()).unwrap();
        assert!((q - exact).abs() < 1e-8 * exact);
    }
}
