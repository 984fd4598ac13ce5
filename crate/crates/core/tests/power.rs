mod common;

use common::{example3, rf};
use trackperf::h2opt::{optimal_params, solve, Channel, PowerLimits, Problem, Weights};
use trackperf::oracle::{integrate_axis, QuadOptions};
use trackperf::power::{feasibility_check, min_power_bounds, PowerBounds};
use trackperf::ratfun::RatFn;
use trackperf::C64;

fn bounds_of(prob: &Problem) -> PowerBounds {
    let sol = solve(prob, &QuadOptions::default()).unwrap();
    let yp = optimal_params(prob, &sol.bundle, &sol.gammas).unwrap();
    min_power_bounds(prob, &sol.bundle, &yp, &QuadOptions::default()).unwrap()
}

/// `(y, u)` coefficients from the loop `S = 1/(1 − K₂F₂PF₁)` with `K = (X − RN)⁻¹[Q, Y − RM]`.
fn closed_loop_coeffs(prob: &Problem) -> ([f64; 3], [f64; 3]) {
    let sol = solve(prob, &QuadOptions::default()).unwrap();
    let yp = optimal_params(prob, &sol.bundle, &sol.gammas).unwrap();
    let cp = &sol.bundle.coprime;
    let g = prob.loop_transfer();
    let maps = |w: f64| {
        let r = yp.r.at_jw(w);
        let xrn = cp.x.at_jw(w) - r * cp.n.at_jw(w);
        let (k1, k2) = (yp.q.at_jw(w) / xrn, (cp.y.at_jw(w) - r * cp.m.at_jw(w)) / xrn);
        let s = C64::new(1.0, 0.0) / (1.0 - k2 * g.at_jw(w));
        let (p, f1, f2) = (prob.plant.at_jw(w), prob.down.f.at_jw(w), prob.up.f.at_jw(w));
        let (h1, h2) = (prob.down.h.at_jw(w), prob.up.h.at_jw(w));
        [
            p * f1 * s * k1,
            p * s * h1,
            p * f1 * s * k2 * h2,
            s * k1,
            f2 * p * s * k2 * h1,
            s * k2 * h2,
        ]
    };
    let mut out = [0.0; 6];
    for (i, o) in out.iter_mut().enumerate() {
        *o = integrate_axis(|w| maps(w)[i].norm_sqr(), &QuadOptions::default()).unwrap().value;
    }
    ([out[0], out[1], out[2]], [out[3], out[4], out[5]])
}

#[test]
fn example3_coefficients_frozen() {
    let b = bounds_of(&example3());
    assert!(b.divergent.is_empty());
    assert!((b.y_coeffs[0] - 0.491_972_152_812_121_1).abs() <= 1e-6 * 0.492);
    assert_eq!(b.y_coeffs[1], 0.0);
    assert!((b.y_coeffs[2] - 12_663.007_432_631_024).abs() <= 1e-6 * 12_663.0);
    assert_eq!(b.u_coeffs[1], 0.0);
    assert!(b.u_coeffs.iter().chain(&b.y_coeffs).all(|&c| c >= 0.0));
    assert!(b.closed_form_gap < 1e-8);
}

#[test]
fn example3_noise_coefficient_respects_interpolation_bound() {
    // Every stabilizing loop has S(12) = 0 and S(15) = 1, so ‖S − 1‖² ≥ 9²·2·12.
    let b = bounds_of(&example3());
    assert!(b.y_coeffs[2] >= 1944.0);
}

#[test]
fn coefficients_match_closed_loop_oracle() {
    let prob = example3();
    let b = bounds_of(&prob);
    let (y, u) = closed_loop_coeffs(&prob);
    for (a, e) in b.y_coeffs.iter().chain(&b.u_coeffs).zip(y.iter().chain(&u)) {
        assert!((a - e).abs() <= 1e-4 * e.max(1e-12), "{a} vs {e}");
    }
}

#[test]
fn noise_free_bounds_only_carry_reference_terms() {
    let prob = Problem::new(
        rf(&[2.0, 1.0], &[2.0, 3.0, 1.0]),
        Channel { f: RatFn::one(), h: rf(&[1.0], &[1.0, 1.0]), sigma: 0.0 },
        Channel::ideal(),
        Weights { eps1: 1.0, eps2: 0.0, eps3: 0.0 },
        PowerLimits { gamma_u: 1.0, gamma_y: 1.0 },
        0.5,
    )
    .unwrap();
    let b = bounds_of(&prob);
    assert_eq!(&b.y_coeffs[1..], &[0.0, 0.0]);
    assert_eq!(&b.u_coeffs[1..], &[0.0, 0.0]);
    // Perfect tracking: y_r = ‖F₁N̂/(F₁₀N₀)‖² diverges (non-decaying), u_r likewise.
    assert!(b.y_coeffs[0].is_infinite());
    assert!(b.divergent.contains(&"y_r"));
}

#[test]
fn bounds_invariant_under_allpass_coloring() {
    let base = example3();
    let flipped = Problem::new(
        base.plant.clone(),
        base.down.clone(),
        Channel { h: rf(&[1.0], &[-1.0, 1.0]), ..base.up.clone() },
        base.weights,
        base.power,
        base.sigma_r,
    )
    .unwrap();
    let ap = RatFn::from_zpk(C64::new(1.0, 0.0), &[C64::new(2.0, 0.0)], &[C64::new(-2.0, 0.0)]);
    let with_allpass = Problem::new(
        base.plant.clone(),
        base.down.clone(),
        Channel { h: &base.up.h * &ap, ..base.up.clone() },
        base.weights,
        base.power,
        base.sigma_r,
    )
    .unwrap();
    let b0 = bounds_of(&base);
    for p in [flipped, with_allpass] {
        let b = bounds_of(&p);
        for (x, y) in b.y_coeffs.iter().chain(&b.u_coeffs).zip(b0.y_coeffs.iter().chain(&b0.u_coeffs)) {
            assert!((x - y).abs() <= 1e-8 * y.max(1.0));
        }
    }
}

#[test]
fn feasibility_margins() {
    let mut prob = example3();
    let printed = PowerBounds {
        y_coeffs: [0.64, 0.0, 2.88],
        u_coeffs: [0.0, 0.0, 0.0],
        divergent: vec![],
        closed_form_gap: 0.0,
    };
    let r = feasibility_check(&prob, &printed);
    assert!(r.feasible());
    assert!((r.y.bound - 0.1408).abs() < 1e-12);
    prob.power.gamma_y = 0.1;
    let r = feasibility_check(&prob, &printed);
    assert!(!r.y.feasible && r.y.margin < 0.0);
    prob.power.gamma_y = printed.y_bound(0.2, 0.0, 0.2);
    let r = feasibility_check(&prob, &printed);
    assert!(r.y.feasible && r.y.margin == 0.0);
}

#[test]
fn example3_is_infeasible_at_computed_coefficients() {
    let prob = example3();
    let r = feasibility_check(&prob, &bounds_of(&prob));
    assert!(!r.y.feasible);
}
