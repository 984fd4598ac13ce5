use super::FactorError;
use crate::ratfun::{poly_roots, side, Poly, RatFn, RootSet, Side};
use crate::{tol, C64};

/// Ordered stack of rational functions treated as a column transfer function.
#[derive(Clone, Debug)]
pub struct ColumnTF {
    rows: Vec<RatFn>,
}

impl ColumnTF {
    pub fn new(rows: Vec<RatFn>) -> Self {
        Self { rows }
    }

    pub fn rows(&self) -> &[RatFn] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(RatFn::is_zero)
    }

    /// `Σ_rows |row(jω)|²`.
    pub fn magnitude_sq_at(&self, w: f64) -> f64 {
        self.rows.iter().map(|r| r.at_jw(w).norm_sqr()).sum()
    }
}

/// Inner–outer factorization `col = inner · outer` with a scalar outer factor.
#[derive(Clone, Debug)]
pub struct InnerOuter {
    pub inner: ColumnTF,
    pub outer: RatFn,
    /// Set when the column is identically zero; `outer` is then zero.
    pub degenerate: bool,
}

impl InnerOuter {
    /// Largest deviation of `Σ|inner(jω)|²` from one over the given frequencies.
    pub fn inner_deviation(&self, omegas: &[f64]) -> f64 {
        if self.degenerate {
            return 0.0;
        }
        omegas
            .iter()
            .map(|&w| (self.inner.magnitude_sq_at(w) - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Stable minimum-phase spectral factor of `Σ_rows g g~` together with the inner column.
pub fn spectral_outer(col: &ColumnTF) -> Result<InnerOuter, FactorError> {
    for (row, g) in col.rows().iter().enumerate() {
        if !g.is_proper() {
            return Err(FactorError::Improper {
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
            return Err(FactorError::UnstableRow { row, poles: bad });
        }
    }
    let live: Vec<&RatFn> = col.rows().iter().filter(|g| !g.is_zero()).collect();
    if live.is_empty() {
        return Ok(InnerOuter {
            inner: col.clone(),
            outer: RatFn::zero(),
            degenerate: true,
        });
    }

    let den = live
        .iter()
        .fold(RootSet::new(), |acc, g| acc.lcm(g.poles()));
    let common = live
        .iter()
        .skip(1)
        .fold(live[0].zeros().clone(), |acc, g| acc.intersection(g.zeros()));
    if let Some(z) = common.iter().find(|r| side(r.point) == Side::Axis) {
        return Err(FactorError::SpectralAxisRoot { root: z.point });
    }

    let spectrum: Vec<Poly> = live
        .iter()
        .map(|g| {
            let n = Poly::from_roots(
                g.zeros()
                    .difference(&common)
                    .flat()
                    .chain(den.difference(g.poles()).flat()),
                g.gain(),
            );
            &n * &n.para()
        })
        .collect();
    let phi = Poly::sum_trimmed(&spectrum);
    let roots = poly_roots(&phi, tol::CLUSTER)?;

    let mut left = RootSet::new();
    let mut right = 0;
    for r in roots.iter() {
        match side(r.point) {
            Side::Left => left.insert(r.point, r.mult),
            Side::Right => right += r.mult,
            Side::Axis => return Err(FactorError::SpectralAxisRoot { root: r.point }),
        }
    }
    if left.total() != right {
        return Err(FactorError::SpectralPairing {
            left: left.total(),
            right,
        });
    }

    let zeros = left.union(&common.map(|z| if side(z) == Side::Right { -z.conj() } else { z }));
    let unit = RatFn::from_parts(C64::new(1.0, 0.0), zeros, den);
    let gain = match_gain(col, &unit);
    let outer = unit.scale_re(gain);
    let inner = ColumnTF::new(
        col.rows()
            .iter()
            .map(|g| g.checked_div(&outer))
            .collect::<Result<_, _>>()?,
    );
    Ok(InnerOuter {
        inner,
        outer,
        degenerate: false,
    })
}

/// Positive gain `k` with `|k · unit(jω)|² = Σ|rows(jω)|²`, taken as a median over
/// frequencies spread around the root scale.
fn match_gain(col: &ColumnTF, unit: &RatFn) -> f64 {
    let scale = unit
        .zeros()
        .iter()
        .chain(unit.poles().iter())
        .map(|r| r.point.norm())
        .fold(1.0, f64::max);
    let mut ratios: Vec<f64> = [0.0, 0.13, 0.71, 1.9, 7.3]
        .iter()
        .map(|&f| f * scale)
        .filter_map(|w| {
            let u = unit.at_jw(w).norm_sqr();
            let target = col.magnitude_sq_at(w);
            (u > 0.0 && target > 0.0 && u.is_finite()).then(|| (target / u).sqrt())
        })
        .collect();
    ratios.sort_by(f64::total_cmp);
    ratios[ratios.len() / 2]
}
