//! Structural factorizations: all-pass products, minimum-phase splitting,
//! coprime factorization with a Bezout pair, and inner–outer factorization of columns.

mod coprime;
mod spectral;

pub use coprime::{coprime_bezout, CoprimeData};
pub use spectral::{spectral_outer, ColumnTF, InnerOuter};

use crate::ratfun::{side, RatError, RatFn, RootSet, Side};
use crate::C64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FactorError {
    #[error(transparent)]
    Rat(#[from] RatError),
    #[error("root {root} is not in the open right half-plane")]
    NotInOpenRhp { root: C64 },
    #[error("zero {zero} lies on the imaginary axis")]
    AxisZero { zero: C64 },
    #[error("pole {pole} lies on the imaginary axis")]
    AxisPole { pole: C64 },
    #[error("unstabilizable: right half-plane zero {zero} cancels pole {pole}")]
    Unstabilizable { zero: C64, pole: C64 },
    #[error("improper input (relative degree {relative_degree})")]
    Improper { relative_degree: i64 },
    #[error("singular Sylvester system (reciprocal condition {rcond:.3e})")]
    SingularSylvester { rcond: f64 },
    #[error("row {row} has poles outside the open left half-plane: {poles:?}")]
    UnstableRow { row: usize, poles: Vec<C64> },
    #[error("spectral density vanishes on the imaginary axis near {root}")]
    SpectralAxisRoot { root: C64 },
    #[error("spectral density roots are not mirror-paired ({left} left, {right} right)")]
    SpectralPairing { left: usize, right: usize },
}

/// `Π ((s − z)/(s + conj z))^m` over roots strictly in the open right half-plane.
pub fn blaschke(roots: &RootSet) -> Result<RatFn, FactorError> {
    if let Some(r) = roots.iter().find(|r| side(r.point) != Side::Right) {
        return Err(FactorError::NotInOpenRhp { root: r.point });
    }
    Ok(RatFn::from_parts(
        C64::new(1.0, 0.0),
        roots.clone(),
        roots.map(|z| -z.conj()),
    ))
}

/// Splits `g` into the Blaschke product of its RHP zeros and a minimum-phase remainder.
pub fn min_phase_split(g: &RatFn) -> Result<(RatFn, RatFn), FactorError> {
    if let Some(z) = g.axis_zeros().iter().next() {
        return Err(FactorError::AxisZero { zero: z.point });
    }
    let rhp = g.rhp_zeros();
    let allpass = blaschke(&rhp)?;
    let reflected = g
        .zeros()
        .map(|z| if side(z) == Side::Right { -z.conj() } else { z });
    let minphase = RatFn::from_parts(g.gain(), reflected, g.poles().clone());
    Ok((allpass, minphase))
}

/// Stable equivalent with the same axis magnitude: RHP zeros and poles are mirrored.
pub fn magnitude_canonical(g: &RatFn) -> Result<RatFn, FactorError> {
    if let Some(p) = g.axis_poles().iter().next() {
        return Err(FactorError::AxisPole { pole: p.point });
    }
    Ok(g.reflect_rhp())
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
    fn blaschke_examples() {
        assert!(blaschke(&RootSet::new()).unwrap().approx_eq(&RatFn::one(), 1e-15));
        let b = blaschke(&RootSet::from_points([c(1.0)])).unwrap();
        assert!(b.approx_eq(&rf(&[-1.0, 1.0], &[1.0, 1.0]), 1e-14));
        let mut two = RootSet::new();
        two.insert(c(2.0), 2);
        let b = blaschke(&two).unwrap();
        assert!(b.approx_eq(&rf(&[4.0, -4.0, 1.0], &[4.0, 4.0, 1.0]), 1e-12));
        assert!(blaschke(&RootSet::from_points([c(-1.0)])).is_err());
    }

    #[test]
    fn split_examples() {
        let (a, m) = min_phase_split(&rf(&[-1.0, 1.0], &[2.0, 3.0, 1.0])).unwrap();
        assert!(a.approx_eq(&rf(&[-1.0, 1.0], &[1.0, 1.0]), 1e-12));
        assert!(m.approx_eq(&rf(&[1.0], &[2.0, 1.0]), 1e-12));
        let g = rf(&[1.0], &[2.0, 1.0]);
        let (a, m) = min_phase_split(&g).unwrap();
        assert!(a.approx_eq(&RatFn::one(), 1e-15));
        assert!(m.approx_eq(&g, 1e-15));
    }

    #[test]
    fn split_two_zeros_keeps_magnitude() {
        let g = rf(&[3.0, -4.0, 1.0], &[8.0, 12.0, 6.0, 1.0]);
        let (a, m) = min_phase_split(&g).unwrap();
        assert_eq!(a.zeros().total(), 2);
        assert_eq!(a.zeros().multiplicity_of(c(1.0)), 1);
        assert_eq!(a.zeros().multiplicity_of(c(3.0)), 1);
        assert!(m.rhp_zeros().is_empty());
        for k in 0..20 {
            let w = 0.05 * 1.5f64.powi(k);
            assert!((m.at_jw(w).norm() - g.at_jw(w).norm()).abs() < 1e-12);
        }
        assert!((&a * &m).approx_eq(&g, 1e-12));
    }

    #[test]
    fn axis_zero_rejected() {
        assert!(matches!(
            min_phase_split(&rf(&[0.0, 1.0], &[1.0, 1.0])),
            Err(FactorError::AxisZero { .. })
        ));
    }

    #[test]
    fn canonical_filter() {
        let h = rf(&[0.5], &[-0.5, 1.0]);
        let hc = magnitude_canonical(&h).unwrap();
        assert!(hc.approx_eq(&rf(&[0.5], &[0.5, 1.0]), 1e-14));
    }
}
