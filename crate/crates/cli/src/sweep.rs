//! Grid sweeps over numeric config leaves, emitted as CSV.

use std::path::Path;

use toml::Value;
use trackperf::exec;
use trackperf::h2opt::{compute_jstar_with, PerfBreakdown};
use trackperf::oracle::QuadOptions;

use crate::config::{load_value, set_path};
use crate::{quad_options, CliError, Config, Output, EXIT_OK};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AxisSpec {
    pub path: String,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub scale: Scale,
}

impl AxisSpec {
    /// Parses `<path>:<from>:<to>:<steps>[:log]`.
    pub fn parse(spec: &str) -> Result<Self, CliError> {
        let bad = |why: &str| CliError::Config(format!("axis '{spec}': {why}"));
        let parts: Vec<&str> = spec.split(':').collect();
        let scale = match parts.len() {
            4 => Scale::Linear,
            5 if parts[4] == "log" => Scale::Log,
            5 if parts[4] == "lin" => Scale::Linear,
            _ => return Err(bad("expected <path>:<from>:<to>:<steps>[:log]")),
        };
        let num = |s: &str| s.trim().parse::<f64>().ok().filter(|x| x.is_finite());
        let from = num(parts[1]).ok_or_else(|| bad("bad <from>"))?;
        let to = num(parts[2]).ok_or_else(|| bad("bad <to>"))?;
        let steps: usize = parts[3].trim().parse().map_err(|_| bad("bad <steps>"))?;
        if steps < 2 {
            return Err(bad("steps must be at least 2"));
        }
        if scale == Scale::Log && !(from > 0.0 && to > 0.0) {
            return Err(bad("log axes need positive endpoints"));
        }
        let path = parts[0].trim();
        if path.is_empty() {
            return Err(bad("empty path"));
        }
        Ok(Self { path: path.to_string(), from, to, steps, scale })
    }

    /// Grid values; the endpoints are exact.
    pub fn values(&self) -> Vec<f64> {
        let last = self.steps - 1;
        (0..self.steps)
            .map(|i| {
                if i == 0 {
                    return self.from;
                }
                if i == last {
                    return self.to;
                }
                let t = i as f64 / last as f64;
                match self.scale {
                    Scale::Linear => self.from + t * (self.to - self.from),
                    Scale::Log => (self.from.ln() + t * (self.to.ln() - self.from.ln())).exp(),
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub axes: Vec<AxisSpec>,
    pub fields: Vec<String>,
}

impl SweepSpec {
    pub fn parse(axes: &[String], fields: Option<&[String]>) -> Result<Self, CliError> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(CliError::Config(format!("a sweep takes 1 or 2 axes, got {}", axes.len())));
        }
        let axes = axes.iter().map(|a| AxisSpec::parse(a)).collect::<Result<Vec<_>, _>>()?;
        let fields: Vec<String> = match fields {
            None => PerfBreakdown::FIELDS.iter().map(|f| f.to_string()).collect(),
            Some(fs) => fs.iter().map(|f| f.trim().to_string()).collect(),
        };
        if fields.is_empty() {
            return Err(CliError::Config("no output fields selected".into()));
        }
        if let Some(f) = fields.iter().find(|f| !PerfBreakdown::FIELDS.contains(&f.as_str())) {
            return Err(CliError::Config(format!(
                "unknown field '{f}'; expected one of {}",
                PerfBreakdown::FIELDS.join(", ")
            )));
        }
        Ok(Self { axes, fields })
    }

    /// Grid points in row-major order, first axis outermost.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let mut pts: Vec<Vec<f64>> = vec![Vec::new()];
        for axis in &self.axes {
            let vals = axis.values();
            pts = pts
                .iter()
                .flat_map(|p| {
                    vals.iter().map(move |&v| {
                        let mut q = p.clone();
                        q.push(v);
                        q
                    })
                })
                .collect();
        }
        pts
    }
}

/// Fixed 17-significant-digit rendering used for every CSV number.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn config_at(base: &Value, spec: &SweepSpec, point: &[f64]) -> Result<Config, CliError> {
    let mut v = base.clone();
    for (axis, &x) in spec.axes.iter().zip(point) {
        set_path(&mut v, &axis.path, x)?;
    }
    Config::from_value(v)
}

/// Evaluates one grid point; `Err` carries the message for the error column.
fn evaluate(base: &Value, spec: &SweepSpec, point: &[f64], opts: &QuadOptions) -> Result<PerfBreakdown, String> {
    let cfg = config_at(base, spec, point).map_err(|e| e.to_string())?;
    let prob = cfg.to_problem().map_err(|e| e.to_string())?;
    compute_jstar_with(&prob, opts).map_err(|e| e.to_string())
}

/// Runs the sweep on an already-loaded config tree and renders the CSV.
pub fn sweep_csv(base: &Value, spec: &SweepSpec, tol: Option<f64>) -> Result<(String, Vec<String>), CliError> {
    let points = spec.points();
    let first = config_at(base, spec, &points[0])?;
    if let Err(e @ CliError::Config(_)) = first.to_problem() {
        return Err(e);
    }
    let opts = quad_options(tol, &first)?;
    let results = exec::map(&points, |p| evaluate(base, spec, p, &opts));

    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<&str> = spec
        .axes
        .iter()
        .map(|a| a.path.as_str())
        .chain(spec.fields.iter().map(String::as_str))
        .chain(std::iter::once("error"))
        .collect();
    let csv_err = |e: csv::Error| CliError::Config(format!("CSV output: {e}"));
    w.write_record(&header).map_err(csv_err)?;
    let mut diagnostics = Vec::new();
    for (p, r) in points.iter().zip(&results) {
        let mut row: Vec<String> = p.iter().map(|&x| fmt_num(x)).collect();
        match r {
            Ok(b) => {
                row.extend(spec.fields.iter().map(|f| fmt_num(b.field(f).expect("validated field"))));
                row.push(String::new());
            }
            Err(msg) => {
                row.extend(spec.fields.iter().map(|_| String::new()));
                row.push(msg.clone());
                let at: Vec<String> = spec.axes.iter().zip(p).map(|(a, x)| format!("{}={x}", a.path)).collect();
                diagnostics.push(format!("warning: point {}: {msg}", at.join(", ")));
            }
        }
        w.write_record(&row).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Config(format!("CSV output: {e}")))?;
    Ok((String::from_utf8(bytes).expect("CSV is UTF-8"), diagnostics))
}

pub fn cmd_sweep(path: &Path, tol: Option<f64>, spec: &SweepSpec) -> Result<Output, CliError> {
    let base = load_value(path)?;
    let (stdout, stderr) = sweep_csv(&base, spec, tol)?;
    Ok(Output { stdout, stderr, code: EXIT_OK })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_parsing() {
        let a = AxisSpec::parse("channel_up.f_cutoff:0.1:2:20").unwrap();
        assert_eq!((a.steps, a.scale), (20, Scale::Linear));
        let v = a.values();
        assert_eq!((v[0], v[19]), (0.1, 2.0));
        let l = AxisSpec::parse("reference.sigma_r:0.01:1:3:log").unwrap();
        let v = l.values();
        assert!((v[1] - 0.1).abs() < 1e-15);
        for bad in ["x:0:1:1", "x:0:1", "x:a:1:3", ":0:1:3", "x:0:1:3:log", "x:0:1:3:cubic"] {
            assert!(AxisSpec::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn row_major_points() {
        let spec = SweepSpec::parse(&["a:0:1:2".into(), "b:10:30:3".into()], None).unwrap();
        let pts = spec.points();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[0], vec![0.0, 10.0]);
        assert_eq!(pts[2], vec![0.0, 30.0]);
        assert_eq!(pts[3], vec![1.0, 10.0]);
    }

    #[test]
    fn spec_validation() {
        assert!(SweepSpec::parse(&[], None).is_err());
        assert!(SweepSpec::parse(&vec!["a:0:1:2".to_string(); 3], None).is_err());
        assert!(SweepSpec::parse(&["a:0:1:2".into()], Some(&["bogus".into()])).is_err());
    }

    #[test]
    fn number_format_has_17_digits() {
        assert_eq!(fmt_num(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_num(-2.0), "-2.0000000000000000e0");
    }
}
