use super::H2Error;
use crate::factor::magnitude_canonical;
use crate::ratfun::{close, poly_roots, side, Poly, RatFn, RootSet, Side};
use crate::{tol, C64};

/// One communication channel: transfer `f`, noise coloring `h`, noise intensity `sigma`.
#[derive(Clone, Debug)]
pub struct Channel {
    pub f: RatFn,
    pub h: RatFn,
    pub sigma: f64,
}

impl Channel {
    /// Ideal noiseless channel.
    pub fn ideal() -> Self {
        Self {
            f: RatFn::one(),
            h: RatFn::zero(),
            sigma: 0.0,
        }
    }

    /// Noise enters the loop.
    pub fn is_noisy(&self) -> bool {
        self.sigma > 0.0 && !self.h.is_zero()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Weights {
    pub eps1: f64,
    pub eps2: f64,
    pub eps3: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerLimits {
    pub gamma_u: f64,
    pub gamma_y: f64,
}

/// Validated problem data. Noise colorings are stored in stable canonical form.
#[derive(Clone, Debug)]
pub struct Problem {
    pub plant: RatFn,
    /// Controller-to-plant channel (`F₁`, `H₁`, `σ₁`).
    pub down: Channel,
    /// Plant-to-controller channel (`F₂`, `H₂`, `σ₂`).
    pub up: Channel,
    pub weights: Weights,
    pub power: PowerLimits,
    pub sigma_r: f64,
}

fn check_nonneg(name: &str, v: f64) -> Result<(), H2Error> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(H2Error::Invalid(format!("{name} must be finite and nonnegative, got {v}")))
    }
}

fn check_pos(name: &str, v: f64) -> Result<(), H2Error> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(H2Error::Invalid(format!("{name} must be finite and positive, got {v}")))
    }
}

fn closed_rhp(set: &RootSet) -> RootSet {
    set.filter(|z| side(z) != Side::Left)
}

/// Reports the first RHP zero lying within the cancellation gap of an RHP pole.
fn detect_cancellation(zeros: &[RootSet], poles: &RootSet) -> Result<(), H2Error> {
    for zs in zeros {
        for z in closed_rhp(zs).iter() {
            for p in closed_rhp(poles).iter() {
                if close(z.point, p.point, tol::CANCELLATION) {
                    return Err(H2Error::Unbounded {
                        zero: z.point,
                        pole: p.point,
                    });
                }
            }
        }
    }
    Ok(())
}

impl Problem {
    /// Validates and canonicalizes a problem given the plant as a rational function.
    pub fn new(
        plant: RatFn,
        down: Channel,
        up: Channel,
        weights: Weights,
        power: PowerLimits,
        sigma_r: f64,
    ) -> Result<Self, H2Error> {
        check_pos("eps1", weights.eps1)?;
        check_nonneg("eps2", weights.eps2)?;
        check_nonneg("eps3", weights.eps3)?;
        check_pos("gamma_u", power.gamma_u)?;
        check_pos("gamma_y", power.gamma_y)?;
        check_nonneg("sigma_r", sigma_r)?;
        check_nonneg("channel_down.sigma", down.sigma)?;
        check_nonneg("channel_up.sigma", up.sigma)?;

        if plant.is_zero() {
            return Err(H2Error::Invalid("plant is identically zero".into()));
        }
        if !plant.is_strictly_proper() {
            return Err(H2Error::Invalid("plant must be strictly proper".into()));
        }
        if let Some(p) = plant.axis_poles().iter().next() {
            return Err(H2Error::AxisRoot { what: "plant pole", root: p.point });
        }
        if let Some(z) = plant.axis_zeros().iter().next() {
            return Err(H2Error::AxisRoot { what: "plant zero", root: z.point });
        }
        let down = Self::canonical_channel("channel_down", down)?;
        let up = Self::canonical_channel("channel_up", up)?;
        detect_cancellation(
            &[plant.zeros().clone(), down.f.zeros().clone(), up.f.zeros().clone()],
            plant.poles(),
        )?;
        Ok(Self {
            plant,
            down,
            up,
            weights,
            power,
            sigma_r,
        })
    }

    /// Like [`Problem::new`], with the plant as raw coefficient polynomials so that
    /// near pole-zero cancellations are detected before canonical cancellation.
    pub fn from_plant_polys(
        num: &Poly,
        den: &Poly,
        down: Channel,
        up: Channel,
        weights: Weights,
        power: PowerLimits,
        sigma_r: f64,
    ) -> Result<Self, H2Error> {
        if den.is_zero() || num.is_zero() {
            return Err(H2Error::Invalid("plant numerator and denominator must be nonzero".into()));
        }
        let zeros = poly_roots(num, tol::CLUSTER)?;
        let poles = poly_roots(den, tol::CLUSTER)?;
        detect_cancellation(
            &[zeros.clone(), down.f.zeros().clone(), up.f.zeros().clone()],
            &poles,
        )?;
        let plant = RatFn::from_parts(num.lead() / den.lead(), zeros, poles);
        Self::new(plant, down, up, weights, power, sigma_r)
    }

    fn canonical_channel(name: &str, ch: Channel) -> Result<Channel, H2Error> {
        if ch.f.is_zero() {
            return Err(H2Error::Invalid(format!("{name}: channel transfer is identically zero")));
        }
        if !ch.f.in_rh_inf() {
            return Err(H2Error::Invalid(format!(
                "{name}: channel transfer must be stable and proper"
            )));
        }
        if let Some(z) = ch.f.axis_zeros().iter().next() {
            return Err(H2Error::AxisRoot { what: "channel zero", root: z.point });
        }
        let h = magnitude_canonical(&ch.h)
            .map_err(|e| H2Error::Invalid(format!("{name}: noise coloring: {e}")))?;
        if !h.is_proper() {
            return Err(H2Error::Invalid(format!("{name}: noise coloring must be proper")));
        }
        Ok(Channel {
            f: ch.f,
            h,
            sigma: ch.sigma,
        })
    }

    /// `F₂ P F₁`.
    pub fn loop_transfer(&self) -> RatFn {
        &(&self.up.f * &self.plant) * &self.down.f
    }

    /// Whether every coefficient is real (conjugate-symmetric roots, real gains).
    pub fn is_real(&self) -> bool {
        [&self.plant, &self.down.f, &self.down.h, &self.up.f, &self.up.h]
            .iter()
            .all(|g| g.num().coeffs().iter().all(|c| c.im.abs() <= 1e-12 * c.norm().max(1.0)))
    }

    /// Sum of `Re z` (with multiplicity) over RHP zeros of `P` and `F₁`.
    pub fn rhp_zero_re_sum(&self) -> f64 {
        [self.plant.rhp_zeros(), self.down.f.rhp_zeros()]
            .iter()
            .flat_map(|s| s.flat().collect::<Vec<C64>>())
            .map(|z| z.re)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rf(num: &[f64], den: &[f64]) -> RatFn {
        RatFn::from_real_coeffs(num, den).unwrap()
    }

    fn weights() -> Weights {
        Weights { eps1: 1.0, eps2: 0.0, eps3: 0.0 }
    }

    fn power() -> PowerLimits {
        PowerLimits { gamma_u: 1.0, gamma_y: 1.0 }
    }

    #[test]
    fn raw_near_cancellation_detected() {
        let num = Poly::from_real(&[-2.000001, 1.0]);
        let den = Poly::from_real(&[-2.0, -1.0, 1.0]);
        let err = Problem::from_plant_polys(
            &num, &den, Channel::ideal(), Channel::ideal(), weights(), power(), 1.0,
        )
        .unwrap_err();
        assert!(matches!(err, H2Error::Unbounded { .. }));
        assert!(err.to_string().contains("performance unbounded"));
    }

    #[test]
    fn exact_cancellation_detected_before_canonicalization() {
        let num = Poly::from_real(&[-2.0, 1.0]);
        let den = Poly::from_real(&[-2.0, -1.0, 1.0]);
        assert!(matches!(
            Problem::from_plant_polys(&num, &den, Channel::ideal(), Channel::ideal(), weights(), power(), 1.0),
            Err(H2Error::Unbounded { .. })
        ));
    }

    #[test]
    fn unstable_coloring_is_reflected() {
        let up = Channel { f: rf(&[0.5], &[0.5, 1.0]), h: rf(&[0.2], &[-0.2, 1.0]), sigma: 0.1 };
        let p = Problem::new(
            rf(&[-3.0, 1.0], &[-2.0, -1.0, 1.0]), Channel::ideal(), up, weights(), power(), 0.2,
        )
        .unwrap();
        assert!(p.up.h.is_stable());
        assert!((p.up.h.at_jw(0.7).norm() - rf(&[0.2], &[0.2, 1.0]).at_jw(0.7).norm()).abs() < 1e-15);
    }

    #[test]
    fn sign_constraints() {
        let w = Weights { eps1: 0.0, eps2: 0.0, eps3: 0.0 };
        assert!(matches!(
            Problem::new(rf(&[1.0], &[1.0, 1.0]), Channel::ideal(), Channel::ideal(), w, power(), 1.0),
            Err(H2Error::Invalid(_))
        ));
    }

    #[test]
    fn biproper_plant_rejected() {
        assert!(Problem::new(
            rf(&[1.0, 1.0], &[2.0, 1.0]), Channel::ideal(), Channel::ideal(), weights(), power(), 1.0,
        )
        .is_err());
    }
}
