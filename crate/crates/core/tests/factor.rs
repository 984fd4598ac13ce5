mod common;

use common::grid;
use proptest::prelude::*;
use trackperf::factor::{blaschke, coprime_bezout, min_phase_split, spectral_outer, ColumnTF};
use trackperf::oracle::suites;
use trackperf::ratfun::{RatFn, RootSet, Side, side};
use trackperf::C64;

fn rhp_roots() -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((0.05f64..5.0, -4.0f64..4.0), 1..=5).prop_filter("separated", |r| {
        r.iter().enumerate().all(|(i, a)| {
            r[i + 1..].iter().all(|b| (C64::new(a.0, a.1) - C64::new(b.0, b.1)).norm() > 0.05)
        })
    })
    .prop_map(|r| r.into_iter().map(|(x, y)| C64::new(x, y)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn blaschke_is_unimodular_with_mirrored_poles(r in rhp_roots()) {
        let set = RootSet::from_points(r.iter().copied());
        let l = blaschke(&set).unwrap();
        for w in grid(100) {
            prop_assert!((l.at_jw(w).norm() - 1.0).abs() < 1e-10);
        }
        prop_assert!(l.zeros().approx_eq(&set, 1e-12));
        prop_assert!(l.poles().approx_eq(&set.map(|z| -z.conj()), 1e-12));
    }
}

#[test]
fn bezout_identity_on_random_loops() {
    let mut rng = suites::rng(5);
    let omegas = grid(200);
    let mut checked = 0;
    while checked < 40 {
        let g = suites::mixed_proper(&mut rng, 4);
        let cp = match coprime_bezout(&g) {
            Ok(cp) => cp,
            Err(_) => continue,
        };
        checked += 1;
        assert!(cp.all_in_rh_inf(), "{g}");
        assert!(cp.bezout_residual(&omegas) < 1e-10, "{g}: {}", cp.bezout_residual(&omegas));
        for w in [0.0, 0.7, 3.0] {
            let ratio = cp.n.at_jw(w) / cp.m.at_jw(w);
            assert!((ratio - g.at_jw(w)).norm() < 1e-9 * g.at_jw(w).norm().max(1.0));
        }
    }
}

#[test]
fn min_phase_split_reconstructs() {
    let mut rng = suites::rng(6);
    for _ in 0..30 {
        let g = suites::stable_strictly_proper(&mut rng, 5);
        let (ap, mp) = min_phase_split(&g).unwrap();
        assert!(mp.zeros().iter().all(|z| side(z.point) == Side::Left));
        for w in grid(20) {
            assert!((ap.at_jw(w).norm() - 1.0).abs() < 1e-10);
            let v = ap.at_jw(w) * mp.at_jw(w);
            assert!((v - g.at_jw(w)).norm() <= 1e-9 * g.at_jw(w).norm());
        }
    }
}

#[test]
fn spectral_outer_on_random_columns() {
    let mut rng = suites::rng(7);
    let omegas = grid(100);
    for _ in 0..30 {
        let col = suites::stable_column(&mut rng, 5);
        let io = spectral_outer(&col).unwrap();
        assert!(!io.degenerate);
        assert!(io.outer.is_stable());
        assert!(io.outer.zeros().iter().all(|z| side(z.point) == Side::Left));
        assert!(io.inner_deviation(&omegas) < 1e-8, "{}", io.inner_deviation(&omegas));
        for &w in &omegas {
            let target = col.magnitude_sq_at(w);
            assert!((io.outer.at_jw(w).norm_sqr() - target).abs() <= 1e-8 * target);
            for (row, inner) in col.rows().iter().zip(io.inner.rows()) {
                let v = inner.at_jw(w) * io.outer.at_jw(w);
                assert!((v - row.at_jw(w)).norm() <= 1e-8 * target.sqrt());
            }
        }
    }
}

#[test]
fn zero_column_is_degenerate() {
    let io = spectral_outer(&ColumnTF::new(vec![RatFn::zero(), RatFn::zero()])).unwrap();
    assert!(io.degenerate && io.outer.is_zero());
}

#[test]
fn mirror_symmetric_spectrum_terminates() {
    let re = |x: f64| C64::new(x, 0.0);
    let col = ColumnTF::new(vec![
        RatFn::from_zpk(re(-0.8676649557453876), &[], &[re(-1.3909929446495057), re(-0.9047632366110001)]),
        RatFn::from_zpk(
            re(-2.5097709991132384),
            &[re(1.8711698384208353)],
            &[re(-3.9211319279191943), re(-1.2078501162607198)],
        ),
    ]);
    let io = spectral_outer(&col).unwrap();
    assert!(io.inner_deviation(&grid(100)) < 1e-8);
}
