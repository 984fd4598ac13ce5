//! Root multisets and polynomial root finding with multiplicity clustering.

use nalgebra::{DMatrix, Schur};

use super::{Poly, RatError};
use crate::{tol, C64};

/// A point with its multiplicity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub point: C64,
    pub mult: usize,
}

/// Multiset of complex points.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RootSet {
    entries: Vec<Root>,
}

/// Relative closeness test used for clustering and cancellation.
pub fn close(a: C64, b: C64, rel: f64) -> bool {
    (a - b).norm() <= rel * 1f64.max(a.norm()).max(b.norm())
}

impl RootSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a set from points, merging nearly identical ones.
    pub fn from_points<I: IntoIterator<Item = C64>>(points: I) -> Self {
        let mut s = Self::new();
        for p in points {
            s.insert(p, 1);
        }
        s
    }

    pub fn from_roots<I: IntoIterator<Item = Root>>(roots: I) -> Self {
        let mut s = Self::new();
        for r in roots {
            s.insert(r.point, r.mult);
        }
        s
    }

    /// Adds `mult` copies of `point`, merging with an existing entry only when nearly identical.
    pub fn insert(&mut self, point: C64, mult: usize) {
        if mult == 0 {
            return;
        }
        match self.entries.iter().position(|r| close(r.point, point, tol::MERGE)) {
            Some(i) => self.entries[i].mult += mult,
            None => self.entries.push(Root { point, mult }),
        }
    }

    /// Removes up to `mult` copies of the entry close to `point`; returns how many were removed.
    pub fn remove(&mut self, point: C64, mult: usize) -> usize {
        let Some(i) = self.position(point) else {
            return 0;
        };
        let taken = mult.min(self.entries[i].mult);
        self.entries[i].mult -= taken;
        if self.entries[i].mult == 0 {
            self.entries.remove(i);
        }
        taken
    }

    pub fn position(&self, point: C64) -> Option<usize> {
        self.entries
            .iter()
            .position(|r| close(r.point, point, tol::CLUSTER))
    }

    pub fn multiplicity_of(&self, point: C64) -> usize {
        self.position(point).map_or(0, |i| self.entries[i].mult)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Root> {
        self.entries.iter()
    }

    /// Every point repeated by its multiplicity.
    pub fn flat(&self) -> impl Iterator<Item = C64> + '_ {
        self.entries
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.point, r.mult))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sum of multiplicities.
    pub fn total(&self) -> usize {
        self.entries.iter().map(|r| r.mult).sum()
    }

    pub fn filter<F: Fn(C64) -> bool>(&self, keep: F) -> RootSet {
        RootSet {
            entries: self.entries.iter().copied().filter(|r| keep(r.point)).collect(),
        }
    }

    pub fn map<F: Fn(C64) -> C64>(&self, f: F) -> RootSet {
        RootSet::from_roots(self.entries.iter().map(|r| Root {
            point: f(r.point),
            mult: r.mult,
        }))
    }

    /// Multiset sum.
    pub fn union(&self, other: &RootSet) -> RootSet {
        let mut s = self.clone();
        for r in &other.entries {
            s.insert(r.point, r.mult);
        }
        s
    }

    /// Multiset maximum (least common multiple of the factored polynomials).
    pub fn lcm(&self, other: &RootSet) -> RootSet {
        let mut s = self.clone();
        for r in &other.entries {
            match s.position(r.point) {
                Some(i) => s.entries[i].mult = s.entries[i].mult.max(r.mult),
                None => s.entries.push(*r),
            }
        }
        s
    }

    /// Multiset minimum.
    pub fn intersection(&self, other: &RootSet) -> RootSet {
        let mut s = RootSet::new();
        for r in &self.entries {
            let m = other.multiplicity_of(r.point).min(r.mult);
            s.insert(r.point, m);
        }
        s
    }

    /// Multiset difference (saturating).
    pub fn difference(&self, other: &RootSet) -> RootSet {
        let mut s = self.clone();
        for r in &other.entries {
            s.remove(r.point, r.mult);
        }
        s
    }

    /// Same points and multiplicities up to `rel` relative distance.
    pub fn approx_eq(&self, other: &RootSet, rel: f64) -> bool {
        if self.total() != other.total() || self.len() != other.len() {
            return false;
        }
        self.entries.iter().all(|r| {
            other
                .entries
                .iter()
                .any(|o| o.mult == r.mult && close(o.point, r.point, rel))
        })
    }

    /// Monic polynomial with these roots.
    pub fn poly(&self) -> Poly {
        Poly::from_roots(self.flat(), C64::new(1.0, 0.0))
    }

    /// Entries with multiplicity reduced at `point` by `by`.
    pub fn without(&self, point: C64, by: usize) -> RootSet {
        let mut s = self.clone();
        s.remove(point, by);
        s
    }

    /// Sorted copy (by real part, then imaginary part) for deterministic output.
    pub fn sorted(&self) -> RootSet {
        let mut entries = self.entries.clone();
        entries.sort_by(|a, b| {
            a.point
                .re
                .total_cmp(&b.point.re)
                .then(a.point.im.total_cmp(&b.point.im))
        });
        RootSet { entries }
    }
}

/// Roots of `p` with multiplicities; points closer than `rel_tol` (relative) are merged.
///
/// Companion-matrix eigenvalues of simple roots are polished by one Newton step. Wider clusters
/// are merged only when the merged factorization still reproduces `p`.
pub fn poly_roots(p: &Poly, rel_tol: f64) -> Result<RootSet, RatError> {
    if !p.is_finite() {
        return Err(RatError::NonFinite);
    }
    let Some(deg) = p.degree() else {
        return Err(RatError::ZeroPolynomial);
    };
    let coeffs = p.coeffs();
    let zeros_at_origin = coeffs.iter().take_while(|c| c.norm() == 0.0).count();
    let reduced = Poly::new(coeffs[zeros_at_origin..].to_vec());
    let n = deg - zeros_at_origin;

    let mut points = vec![C64::new(0.0, 0.0); zeros_at_origin];
    if n > 0 {
        points.extend(companion_eigenvalues(&reduced)?);
    }

    let mut groups = cluster(&points, rel_tol);
    for g in groups.iter_mut() {
        g.refine(p);
    }
    merge_validated(p, &mut groups);
    let mut set = RootSet::new();
    for g in groups {
        set.entries.push(Root {
            point: g.center,
            mult: g.members.len(),
        });
    }
    Ok(set)
}

fn companion_eigenvalues(p: &Poly) -> Result<Vec<C64>, RatError> {
    let n = p.degree().unwrap_or(0);
    let c = p.coeffs();
    let lead = p.lead();
    if n == 1 {
        return Ok(vec![-c[0] / lead]);
    }
    let mut m = DMatrix::<C64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..n {
        m[(i, n - 1)] = -c[i] / lead;
    }
    balance(&mut m);
    let finite = |v: &[C64]| v.iter().all(|z| z.re.is_finite() && z.im.is_finite());
    if let Some(eig) = Schur::try_new(m, f64::EPSILON, 100 * n).and_then(|s| s.eigenvalues()) {
        let out: Vec<C64> = eig.iter().copied().collect();
        if finite(&out) {
            return Ok(out);
        }
    }
    let out = aberth(p).ok_or(RatError::RootFinding { degree: n })?;
    if !finite(&out) {
        return Err(RatError::RootFinding { degree: n });
    }
    Ok(out)
}

/// Aberth–Ehrlich simultaneous iteration, used when the shifted QR stalls
/// (e.g. on exactly mirror-symmetric spectra).
fn aberth(p: &Poly) -> Option<Vec<C64>> {
    let n = p.degree()?;
    let dp = p.derivative();
    let lead = p.lead().norm();
    let radius = p.coeffs()[..n]
        .iter()
        .enumerate()
        .map(|(k, c)| (c.norm() / lead).powf(1.0 / (n - k) as f64))
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut z: Vec<C64> = (0..n)
        .map(|k| C64::from_polar(radius, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4))
        .collect();
    for _ in 0..2000 {
        let mut moved: f64 = 0.0;
        for k in 0..n {
            let pv = p.eval(z[k]);
            if pv.norm() == 0.0 {
                continue;
            }
            let ratio = pv / dp.eval(z[k]);
            let repulse: C64 = (0..n).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let step = ratio / (C64::new(1.0, 0.0) - ratio * repulse);
            if !(step.re.is_finite() && step.im.is_finite()) {
                continue;
            }
            z[k] -= step;
            moved = moved.max(step.norm() / z[k].norm().max(radius * f64::EPSILON));
        }
        if moved <= 4.0 * f64::EPSILON {
            break;
        }
    }
    Some(z)
}

/// Diagonal similarity scaling by powers of two so row and column norms are comparable.
fn balance(m: &mut DMatrix<C64>) {
    let n = m.nrows();
    let radix = 2.0_f64;
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let mut col = 0.0;
            let mut row = 0.0;
            for j in 0..n {
                if j != i {
                    col += m[(j, i)].norm();
                    row += m[(i, j)].norm();
                }
            }
            if col == 0.0 || row == 0.0 {
                continue;
            }
            let total = col + row;
            let mut f = 1.0;
            let mut g = row / radix;
            while col < g {
                f *= radix;
                col *= radix * radix;
            }
            g = row * radix;
            while col > g {
                f /= radix;
                col /= radix * radix;
            }
            if (col + row) / f < 0.95 * total {
                converged = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
    }
}

/// Newton step on `q` from `z`, kept only when it reduces `|q|`.
fn newton_step(q: &Poly, dq: &Poly, z: C64) -> C64 {
    let d = dq.eval(z);
    if d.norm() == 0.0 {
        return z;
    }
    let cand = z - q.eval(z) / d;
    if cand.re.is_finite() && cand.im.is_finite() && q.eval(cand).norm() < q.eval(z).norm() {
        cand
    } else {
        z
    }
}

struct Group {
    members: Vec<C64>,
    center: C64,
}

impl Group {
    fn new(members: Vec<C64>) -> Self {
        let center = members.iter().sum::<C64>() / members.len() as f64;
        Self { members, center }
    }

    /// Simple roots take one Newton step on `p`; an m-fold cluster is refined as
    /// the simple root of `p^(m−1)` near its centroid.
    fn refine(&mut self, p: &Poly) {
        let m = self.members.len();
        let mut q = p.clone();
        for _ in 1..m {
            q = q.derivative();
        }
        let dq = q.derivative();
        let steps = if m == 1 { 1 } else { 4 };
        for _ in 0..steps {
            self.center = newton_step(&q, &dq, self.center);
        }
    }
}

fn cluster(points: &[C64], rel_tol: f64) -> Vec<Group> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if close(points[i], points[j], rel_tol) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b] = a;
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<C64>)> = Vec::new();
    for (i, &pt) in points.iter().enumerate() {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|(root, _)| *root == r) {
            Some((_, g)) => g.push(pt),
            None => groups.push((r, vec![pt])),
        }
    }
    groups.into_iter().map(|(_, g)| Group::new(g)).collect()
}

fn backward_error(p: &Poly, groups: &[Group]) -> f64 {
    let target = p.monic();
    let rebuilt = Poly::from_roots(
        groups
            .iter()
            .flat_map(|g| std::iter::repeat_n(g.center, g.members.len())),
        C64::new(1.0, 0.0),
    );
    (&target - &rebuilt).norm_inf() / target.norm_inf()
}

fn merge_validated(p: &Poly, groups: &mut Vec<Group>) {
    const LOOSE: f64 = 1e-3;
    const FLOOR: f64 = 1e-13;
    loop {
        let base = backward_error(p, groups);
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for i in 0..groups.len() {
            for j in i + 1..groups.len() {
                let (a, b) = (groups[i].center, groups[j].center);
                if close(a, b, LOOSE) {
                    pairs.push(((a - b).norm(), i, j));
                }
            }
        }
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut candidates: Vec<Vec<usize>> = components(groups.len(), &pairs)
            .into_iter()
            .filter(|c| c.len() > 2)
            .collect();
        candidates.extend(pairs.iter().map(|&(_, i, j)| vec![i, j]));
        let mut merged = false;
        for idx in candidates {
            let joined: Vec<C64> = idx.iter().flat_map(|&k| groups[k].members.iter().copied()).collect();
            let mut merged_group = Group::new(joined);
            merged_group.refine(p);
            let mut trial: Vec<Group> = groups
                .iter()
                .enumerate()
                .filter(|(k, _)| !idx.contains(k))
                .map(|(_, g)| Group { members: g.members.clone(), center: g.center })
                .collect();
            trial.push(merged_group);
            if backward_error(p, &trial) <= FLOOR.max(10.0 * base) {
                *groups = trial;
                merged = true;
                break;
            }
        }
        if !merged {
            return;
        }
    }
}

/// Connected components of the closeness graph, each as sorted indices.
fn components(n: usize, pairs: &[(f64, usize, usize)]) -> Vec<Vec<usize>> {
    let mut label: Vec<usize> = (0..n).collect();
    let mut changed = true;
    while changed {
        changed = false;
        for &(_, i, j) in pairs {
            let m = label[i].min(label[j]);
            if label[i] != m || label[j] != m {
                label[i] = m;
                label[j] = m;
                changed = true;
            }
        }
    }
    let mut out: Vec<Vec<usize>> = Vec::new();
    for k in 0..n {
        match out.iter_mut().find(|c| label[c[0]] == label[k]) {
            Some(c) => c.push(k),
            None => out.push(vec![k]),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn aberth_fallback_finds_mirrored_roots() {
        let roots = [r(1.5, 0.0), r(-1.5, 0.0), r(0.5, 2.0), r(0.5, -2.0), r(-0.5, 2.0), r(-0.5, -2.0)];
        let p = Poly::from_roots(roots, r(2.0, 0.0));
        let found = aberth(&p).unwrap();
        for z in roots {
            let d = found.iter().map(|w| (w - z).norm()).fold(f64::INFINITY, f64::min);
            assert!(d < 1e-10, "{z} missed by {d}");
        }
    }

    #[test]
    fn perfect_square() {
        let s = poly_roots(&Poly::from_real(&[1.0, -2.0, 1.0]), tol::CLUSTER).unwrap();
        assert_eq!(s.len(), 1);
        let root = s.iter().next().unwrap();
        assert_eq!(root.mult, 2);
        assert!((root.point - r(1.0, 0.0)).norm() < 1e-7);
    }

    #[test]
    fn conjugate_pair() {
        let s = poly_roots(&Poly::from_real(&[1.0, 0.0, 1.0]), tol::CLUSTER).unwrap();
        assert_eq!(s.total(), 2);
        assert_eq!(s.multiplicity_of(r(0.0, 1.0)), 1);
        assert_eq!(s.multiplicity_of(r(0.0, -1.0)), 1);
    }

    #[test]
    fn cubic_distinct_roots() {
        let s = poly_roots(&Poly::from_real(&[-6.0, 11.0, -6.0, 1.0]), tol::CLUSTER).unwrap();
        for k in [1.0, 2.0, 3.0] {
            assert_eq!(s.multiplicity_of(r(k, 0.0)), 1);
        }
    }

    #[test]
    fn triple_root_is_clustered() {
        let p = Poly::from_roots([r(-1.0, 0.0); 3], r(2.0, 0.0));
        let s = poly_roots(&p, tol::CLUSTER).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.iter().next().unwrap().mult, 3);
    }

    #[test]
    fn degree_zero_is_empty() {
        let s = poly_roots(&Poly::from_real(&[3.0]), tol::CLUSTER).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn non_finite_rejected() {
        let p = Poly::from_real(&[f64::NAN, 1.0]);
        assert!(matches!(poly_roots(&p, tol::CLUSTER), Err(RatError::NonFinite)));
    }

    #[test]
    fn set_algebra() {
        let a = RootSet::from_points([r(1.0, 0.0), r(1.0, 0.0), r(2.0, 0.0)]);
        let b = RootSet::from_points([r(1.0, 0.0), r(3.0, 0.0)]);
        assert_eq!(a.intersection(&b).total(), 1);
        assert_eq!(a.lcm(&b).total(), 4);
        assert_eq!(a.union(&b).total(), 5);
        assert_eq!(a.difference(&b).total(), 2);
    }
}
