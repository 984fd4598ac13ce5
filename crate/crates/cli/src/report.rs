//! JSON documents for `perf`, `bounds` and `verify`.

use std::path::Path;

use serde_json::{json, Map, Value};
use trackperf::h2opt::{
    compute_residual, compute_upsilon1, optimal_params, solve, synth_controller, PerfBreakdown, Problem, Solution,
};
use trackperf::oracle::{integrate_axis, ritz_min_j, QuadOptions, RitzConfig};
use trackperf::power::{feasibility_check, min_power_bounds, ChannelReport, PowerBounds};
use trackperf::ratfun::{terms_value, Poly, RatFn, ResidueTerm};
use trackperf::C64;

use crate::{quad_options, CliError, Config, Output, EXIT_OK, EXIT_VERIFY_GAP, VERIFY_GAP_LIMIT};

/// Relative agreement below which a per-term cross-check is "ok".
pub const CROSS_CHECK_TOL: f64 = 1e-6;

fn load(path: &Path, tol: Option<f64>) -> Result<(Problem, QuadOptions), CliError> {
    let cfg = Config::load(path)?;
    let opts = quad_options(tol, &cfg)?;
    Ok((cfg.to_problem()?, opts))
}

/// `n` log-spaced frequencies in `[1e-3, 1e3]`, mirrored.
pub fn diagnostic_grid(n: usize) -> Vec<f64> {
    let pos: Vec<f64> = (0..n)
        .map(|i| 10f64.powf(-3.0 + 6.0 * i as f64 / (n - 1) as f64))
        .collect();
    pos.iter().map(|w| -w).chain(pos.iter().copied()).collect()
}

fn complex_list(points: impl Iterator<Item = C64>) -> Value {
    let pts: Vec<C64> = points.collect();
    let scale = pts.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if pts.iter().all(|c| c.im.abs() <= 1e-12 * scale) {
        json!(pts.iter().map(|c| c.re).collect::<Vec<_>>())
    } else {
        json!(pts.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>())
    }
}

fn poly_json(p: &Poly) -> Value {
    complex_list(p.coeffs().iter().copied())
}

/// Ascending `num`/`den` coefficients plus zeros, poles and properness.
pub fn ratfn_json(f: &RatFn) -> Value {
    let num = f.num().scale(f.gain());
    json!({
        "num": poly_json(&num),
        "den": poly_json(&f.den()),
        "zeros": complex_list(f.zeros().flat()),
        "poles": complex_list(f.poles().flat()),
        "proper": f.is_proper(),
    })
}

pub fn breakdown_json(b: &PerfBreakdown) -> Value {
    let mut m = Map::new();
    for name in PerfBreakdown::FIELDS {
        m.insert(name.into(), json!(b.field(name).map(|x| x + 0.0)));
    }
    Value::Object(m)
}

fn channel_json(c: &ChannelReport) -> Value {
    json!({ "limit": c.limit, "bound": c.bound, "margin": c.margin, "feasible": c.feasible })
}

fn coeffs_json(c: &[f64; 3]) -> Value {
    json!({ "sigma_r": c[0], "sigma_1": c[1], "sigma_2": c[2] })
}

pub fn bounds_json(prob: &Problem, bounds: &PowerBounds) -> Value {
    let f = feasibility_check(prob, bounds);
    json!({
        "y_coeffs": coeffs_json(&bounds.y_coeffs),
        "u_coeffs": coeffs_json(&bounds.u_coeffs),
        "divergent": bounds.divergent,
        "closed_form_gap": bounds.closed_form_gap,
        "feasibility": { "u": channel_json(&f.u), "y": channel_json(&f.y), "feasible": f.feasible() },
    })
}

fn infeasibility_warnings(prob: &Problem, bounds: &PowerBounds) -> Vec<String> {
    let f = feasibility_check(prob, bounds);
    [("u", f.u), ("y", f.y)]
        .iter()
        .filter(|(_, c)| !c.feasible)
        .map(|(name, c)| {
            if c.bound.is_finite() {
                format!(
                    "channel {name} input-power limit {} is below the minimum {} (margin {})",
                    c.limit, c.bound, c.margin
                )
            } else {
                format!("channel {name} input power is unbounded at the optimal controller")
            }
        })
        .collect()
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

/// Power bounds at the optimal Youla parameters.
pub fn power_bounds(prob: &Problem, sol: &Solution, opts: &QuadOptions) -> Result<PowerBounds, CliError> {
    let params = optimal_params(prob, &sol.bundle, &sol.gammas).map_err(CliError::Solver)?;
    min_power_bounds(prob, &sol.bundle, &params, opts).map_err(CliError::Solver)
}

pub fn perf_document(prob: &Problem, opts: &QuadOptions) -> Result<(Value, Vec<String>), CliError> {
    let sol = solve(prob, opts).map_err(CliError::Solver)?;
    let mut warnings = Vec::new();
    let omegas = diagnostic_grid(200);

    let controller = match synth_controller(prob, &sol.bundle, &sol.gammas) {
        Ok(c) => {
            if !c.q_proper {
                warnings.push("optimal Q is improper".to_string());
            }
            if !c.r_proper {
                warnings.push("optimal R is improper".to_string());
            }
            json!({
                "q": ratfn_json(&c.q),
                "r": ratfn_json(&c.r),
                "k1": ratfn_json(&c.k1),
                "k2": ratfn_json(&c.k2),
                "s": ratfn_json(&c.s),
                "s_max_pole_re": c.s.max_pole_re(),
                "loop_identity_residual": c.loop_identity_residual(prob, &omegas),
            })
        }
        Err(e) => {
            warnings.push(format!("controller synthesis failed: {e}"));
            json!({ "error": e.to_string() })
        }
    };

    match power_bounds(prob, &sol, opts) {
        Ok(b) => warnings.extend(infeasibility_warnings(prob, &b)),
        Err(e) => warnings.push(format!("power bounds unavailable: {e}")),
    }

    let b = &sol.bundle;
    let doc = json!({
        "breakdown": breakdown_json(&sol.breakdown),
        "controller": controller,
        "diagnostics": {
            "bezout_residual": b.coprime.bezout_residual(&omegas),
            "identity_residual": b.identity_residual(&omegas),
            "inner_deviation_omega": b.omega.inner_deviation(&omegas),
            "inner_deviation_delta": b.delta.inner_deviation(&omegas),
            "inner_deviation_lambda": b.lambda.inner_deviation(&omegas),
            "terms_sum_residual": (sol.breakdown.total - sol.breakdown.terms_sum()).abs(),
        },
        "warnings": warnings,
    });
    Ok((doc, warnings))
}

fn with_warnings((doc, warnings): (Value, Vec<String>)) -> Output {
    Output {
        stdout: pretty(&doc),
        stderr: warnings.into_iter().map(|w| format!("warning: {w}")).collect(),
        code: EXIT_OK,
    }
}

pub fn cmd_perf(path: &Path, tol: Option<f64>) -> Result<Output, CliError> {
    let (prob, opts) = load(path, tol)?;
    perf_document(&prob, &opts).map(with_warnings)
}

pub fn bounds_document(prob: &Problem, opts: &QuadOptions) -> Result<(Value, Vec<String>), CliError> {
    let sol = solve(prob, opts).map_err(CliError::Solver)?;
    let bounds = power_bounds(prob, &sol, opts)?;
    let warnings = infeasibility_warnings(prob, &bounds);
    Ok((bounds_json(prob, &bounds), warnings))
}

pub fn cmd_bounds(path: &Path, tol: Option<f64>) -> Result<Output, CliError> {
    let (prob, opts) = load(path, tol)?;
    bounds_document(&prob, &opts).map(with_warnings)
}

/// One closed-form term against an independent quadrature.
#[derive(Clone, Debug, PartialEq)]
pub enum CrossCheck {
    Compared { closed_form: f64, quadrature: f64, relative_error: f64 },
    Skipped,
}

impl CrossCheck {
    fn compare(closed_form: f64, quadrature: f64) -> Self {
        let scale = closed_form.abs().max(quadrature.abs()).max(f64::MIN_POSITIVE);
        CrossCheck::Compared {
            closed_form,
            quadrature,
            relative_error: (closed_form - quadrature).abs() / scale,
        }
    }

    pub fn ok(&self) -> bool {
        match self {
            CrossCheck::Compared { relative_error, .. } => *relative_error <= CROSS_CHECK_TOL,
            CrossCheck::Skipped => true,
        }
    }

    fn to_json(&self, term: &str) -> Value {
        match self {
            CrossCheck::Compared { closed_form, quadrature, relative_error } => json!({
                "term": term,
                "status": if self.ok() { "ok" } else { "mismatch" },
                "closed_form": closed_form,
                "quadrature": quadrature,
                "relative_error": relative_error,
            }),
            CrossCheck::Skipped => json!({ "term": term, "status": "skipped" }),
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub jstar: f64,
    pub j_approx: f64,
    /// `|j_approx − J*| / max(|J*|, 1e-9)`.
    pub relative_gap: f64,
    pub order: usize,
    pub basis_pole: f64,
    pub j_r: f64,
    pub j_q: f64,
    pub condition: f64,
    pub checks: Vec<(&'static str, CrossCheck)>,
    pub warnings: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.relative_gap <= VERIFY_GAP_LIMIT
    }

    pub fn to_json(&self) -> Value {
        json!({
            "jstar": self.jstar,
            "j_approx": self.j_approx,
            "relative_gap": self.relative_gap,
            "gap_limit": VERIFY_GAP_LIMIT,
            "pass": self.passed(),
            "ritz": {
                "order": self.order,
                "basis_pole": self.basis_pole,
                "j_noise": self.j_r,
                "j_reference": self.j_q,
                "condition": self.condition,
            },
            "cross_checks": self.checks.iter().map(|(t, c)| c.to_json(t)).collect::<Vec<_>>(),
            "warnings": self.warnings,
        })
    }
}

fn quad(f: impl Fn(f64) -> f64, opts: &QuadOptions) -> Result<f64, CliError> {
    integrate_axis(f, opts)
        .map(|r| r.value)
        .map_err(|e| CliError::Solver(e.into()))
}

fn antistable_check(terms: &[ResidueTerm], closed: f64, opts: &QuadOptions) -> Result<CrossCheck, CliError> {
    if terms.is_empty() {
        return Ok(CrossCheck::Skipped);
    }
    let q = quad(|w| terms_value(terms, C64::new(0.0, w)).norm_sqr(), opts)?;
    Ok(CrossCheck::compare(closed, q))
}

/// Tighter options for the re-quadratured terms.
fn tight(opts: &QuadOptions) -> QuadOptions {
    QuadOptions {
        rel_tol: (opts.rel_tol * 1e-2).max(1e-13),
        max_intervals: opts.max_intervals * 4,
        ..*opts
    }
}

fn cross_checks(prob: &Problem, sol: &Solution, opts: &QuadOptions) -> Result<Vec<(&'static str, CrossCheck)>, CliError> {
    let b = &sol.breakdown;
    let g = &sol.gammas;
    let bundle = &sol.bundle;
    let mut out = Vec::new();

    let sr2 = prob.sigma_r * prob.sigma_r;
    let l = &bundle.lf1 * &bundle.lg;
    let zero_sum = if sr2 == 0.0 || l.zeros().is_empty() {
        CrossCheck::Skipped
    } else {
        let l_inf = l.value_at_infinity().unwrap_or(C64::new(1.0, 0.0));
        let q = quad(|w| (C64::new(1.0, 0.0) - l.at_jw(w) / l_inf).norm_sqr(), opts)?;
        CrossCheck::compare(b.term_zero_sum, prob.weights.eps1 * sr2 * q)
    };
    out.push(("term_zero_sum", zero_sum));
    out.push(("term_g1", antistable_check(&g.g1_terms, b.term_g1, opts)?));
    out.push(("term_g2", antistable_check(&g.g2_terms, b.term_g2, opts)?));
    out.push(("term_g3", antistable_check(&g.g3_terms, b.term_g3, opts)?));

    let residual = if bundle.delta.degenerate || (g.g1_stable.is_zero() && g.g2_stable.is_zero()) {
        CrossCheck::Skipped
    } else {
        let q = compute_residual(bundle, g, &tight(opts)).map_err(CliError::Solver)?;
        CrossCheck::compare(b.term_residual, q)
    };
    out.push(("term_residual", residual));

    let upsilon = if sr2 == 0.0 || prob.weights.eps2 == 0.0 {
        CrossCheck::Skipped
    } else {
        let q = sr2 * compute_upsilon1(prob, bundle, &tight(opts)).map_err(CliError::Solver)?;
        CrossCheck::compare(b.term_upsilon, q)
    };
    out.push(("term_upsilon", upsilon));
    Ok(out)
}

pub fn verify_problem(
    prob: &Problem,
    order: usize,
    basis_pole: Option<f64>,
    opts: &QuadOptions,
) -> Result<VerifyReport, CliError> {
    let sol = solve(prob, opts).map_err(CliError::Solver)?;
    let mut cfg = RitzConfig::scaled(prob, order);
    if let Some(a) = basis_pole {
        cfg.basis_pole = a;
    }
    cfg.quad = *opts;
    let ritz = ritz_min_j(prob, &cfg).map_err(CliError::Solver)?;
    let checks = cross_checks(prob, &sol, opts)?;
    let jstar = sol.breakdown.total;
    let mut warnings = ritz.warnings.clone();
    for (term, c) in &checks {
        if !c.ok() {
            warnings.push(format!("{term}: closed form and quadrature disagree"));
        }
    }
    Ok(VerifyReport {
        jstar,
        j_approx: ritz.j_approx,
        relative_gap: (ritz.j_approx - jstar).abs() / jstar.abs().max(1e-9),
        order,
        basis_pole: cfg.basis_pole,
        j_r: ritz.j_r,
        j_q: ritz.j_q,
        condition: ritz.condition,
        checks,
        warnings,
    })
}

pub fn cmd_verify(path: &Path, tol: Option<f64>, order: usize, basis_pole: Option<f64>) -> Result<Output, CliError> {
    let (prob, opts) = load(path, tol)?;
    let report = verify_problem(&prob, order, basis_pole, &opts)?;
    let mut stderr: Vec<String> = report.warnings.iter().map(|w| format!("warning: {w}")).collect();
    let code = if report.passed() {
        EXIT_OK
    } else {
        stderr.push(format!(
            "error: relative gap {:.3e} exceeds {VERIFY_GAP_LIMIT}",
            report.relative_gap
        ));
        EXIT_VERIFY_GAP
    };
    Ok(Output {
        stdout: pretty(&report.to_json()),
        stderr,
        code,
    })
}
