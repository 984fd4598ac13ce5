//! Seeded random problem families shared by tests, benches and acceptance checks.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::factor::ColumnTF;
use crate::h2opt::{Channel, PowerLimits, Problem, Weights};
use crate::ratfun::{RatFn, ResidueTerm};
use crate::C64;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

fn random_sign<R: Rng>(rng: &mut R) -> f64 {
    if rng.gen_bool(0.5) {
        1.0
    } else {
        -1.0
    }
}

/// `count` roots, real or in conjugate pairs, with real parts in `re` (sign applied by `side`).
fn real_roots<R: Rng>(rng: &mut R, count: usize, re: (f64, f64), side: impl Fn(&mut R) -> f64) -> Vec<C64> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x = side(rng) * rng.gen_range(re.0..re.1);
        if count - out.len() >= 2 && rng.gen_bool(0.4) {
            let y = rng.gen_range(0.2..3.0);
            out.push(C64::new(x, y));
            out.push(C64::new(x, -y));
        } else {
            out.push(C64::new(x, 0.0));
        }
    }
    out
}

fn separated(points: &[C64], min_gap: f64) -> bool {
    points
        .iter()
        .enumerate()
        .all(|(i, a)| points[i + 1..].iter().all(|b| (a - b).norm() >= min_gap))
}

/// Real-coefficient, stable, strictly proper transfer of degree `1..=max_deg`.
/// Zeros may lie in either half-plane but stay off the axis.
pub fn stable_strictly_proper<R: Rng>(rng: &mut R, max_deg: usize) -> RatFn {
    loop {
        let n = rng.gen_range(1..=max_deg);
        let m = rng.gen_range(0..n);
        let poles = real_roots(rng, n, (0.2, 4.0), |_| -1.0);
        let zeros = real_roots(rng, m, (0.2, 4.0), |r| random_sign(r));
        let all: Vec<C64> = poles.iter().chain(&zeros).copied().collect();
        if !separated(&all, 0.05) {
            continue;
        }
        let k = random_sign(rng) * rng.gen_range(0.5..3.0);
        return RatFn::from_zpk(C64::new(k, 0.0), &zeros, &poles);
    }
}

/// Proper (possibly biproper) real transfer with poles and zeros in both half-planes.
pub fn mixed_proper<R: Rng>(rng: &mut R, max_deg: usize) -> RatFn {
    loop {
        let n = rng.gen_range(1..=max_deg);
        let m = rng.gen_range(0..=n);
        let poles = real_roots(rng, n, (0.2, 4.0), |r| random_sign(r));
        let zeros = real_roots(rng, m, (0.2, 4.0), |r| random_sign(r));
        let all: Vec<C64> = poles.iter().chain(&zeros).copied().collect();
        if !separated(&all, 0.3) {
            continue;
        }
        let k = random_sign(rng) * rng.gen_range(0.5..3.0);
        return RatFn::from_zpk(C64::new(k, 0.0), &zeros, &poles);
    }
}

/// Antistable terms: at most `max_poles` distinct RHP poles, each with order `1..=max_order`.
pub fn residue_terms<R: Rng>(rng: &mut R, max_poles: usize, max_order: u32) -> Vec<ResidueTerm> {
    let count = rng.gen_range(1..=max_poles);
    let mut poles: Vec<C64> = Vec::with_capacity(count);
    while poles.len() < count {
        let p = C64::new(rng.gen_range(0.2..4.0), rng.gen_range(-3.0..3.0));
        if poles.iter().all(|q| (p - q).norm() > 0.3) {
            poles.push(p);
        }
    }
    let mut terms = Vec::new();
    for p in poles {
        let top = rng.gen_range(1..=max_order);
        for order in 1..=top {
            let coeff = C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            terms.push(ResidueTerm { pole: p, order: order as usize, coeff });
        }
    }
    terms
}

/// Column of `1..=3` stable strictly proper rows of degree `≤ max_deg`.
pub fn stable_column<R: Rng>(rng: &mut R, max_deg: usize) -> ColumnTF {
    let rows = rng.gen_range(1..=3);
    ColumnTF::new((0..rows).map(|_| stable_strictly_proper(rng, max_deg)).collect())
}

/// Noise-free tracking problem with a stable plant carrying `1..=3` RHP zeros.
/// Returns the problem and `2ε₁σᵣ²ΣRe z`.
pub fn classical_problem<R: Rng>(rng: &mut R) -> (Problem, f64) {
    loop {
        let nz = rng.gen_range(1..=3);
        let rhp = real_roots(rng, nz, (0.2, 5.0), |_| 1.0);
        let extra = rng.gen_range(0..=1);
        let poles = real_roots(rng, nz + extra + 1, (0.3, 5.0), |_| -1.0);
        let all: Vec<C64> = poles.iter().chain(&rhp).copied().collect();
        if !separated(&all, 0.1) {
            continue;
        }
        let plant = RatFn::from_zpk(C64::new(rng.gen_range(0.5..3.0), 0.0), &rhp, &poles);
        let eps1 = rng.gen_range(0.2..2.0);
        let sigma_r = rng.gen_range(0.1..2.0);
        let prob = Problem::new(
            plant,
            Channel::ideal(),
            Channel::ideal(),
            Weights { eps1, eps2: 0.0, eps3: 0.0 },
            PowerLimits { gamma_u: 1.0, gamma_y: 1.0 },
            sigma_r,
        )
        .expect("classical problem is valid");
        let expected = 2.0 * eps1 * sigma_r * sigma_r * rhp.iter().map(|z| z.re).sum::<f64>();
        return (prob, expected);
    }
}

fn biproper_coloring<R: Rng>(rng: &mut R) -> RatFn {
    let c = rng.gen_range(0.5..3.0);
    let d = rng.gen_range(0.5..3.0);
    RatFn::from_zpk(C64::new(1.0, 0.0), &[C64::new(-c, 0.0)], &[C64::new(-d, 0.0)])
}

/// Stabilizable problem with one RHP zero, one RHP pole, plant degree `≤ 3`,
/// noise in both channels and `ε₂ = ε₃ = 0`.
pub fn verification_problem<R: Rng>(rng: &mut R) -> Problem {
    let z: f64 = rng.gen_range(0.5..4.0);
    let mut p: f64 = rng.gen_range(0.3..3.0);
    while (p - z).abs() < 0.5 {
        p = rng.gen_range(0.3..3.0);
    }
    let mut zeros = vec![C64::new(z, 0.0)];
    let mut poles = vec![C64::new(p, 0.0), C64::new(-rng.gen_range(0.5..4.0), 0.0)];
    if rng.gen_bool(0.5) {
        zeros.push(C64::new(-rng.gen_range(0.5..4.0), 0.0));
        poles.push(C64::new(-rng.gen_range(0.5..4.0), 0.0));
    }
    let plant = RatFn::from_zpk(C64::new(rng.gen_range(0.5..3.0), 0.0), &zeros, &poles);
    let down = Channel { f: RatFn::one(), h: biproper_coloring(rng), sigma: rng.gen_range(0.1..0.5) };
    let up = Channel { f: RatFn::one(), h: biproper_coloring(rng), sigma: rng.gen_range(0.1..0.5) };
    Problem::new(
        plant,
        down,
        up,
        Weights { eps1: 1.0, eps2: 0.0, eps3: 0.0 },
        PowerLimits { gamma_u: 1.0, gamma_y: 1.0 },
        rng.gen_range(0.1..0.5),
    )
    .expect("verification problem is valid")
}
