//! TOML problem configuration.
//!
//! ```toml
//! [plant]                 # either num/den (ascending) or zeros/poles/gain
//! num = [-3.0, 1.0]
//! den = [-2.0, -1.0, 1.0]
//!
//! [channel_up]            # omitted channels are ideal: F = 1, H = 0, sigma = 0
//! f_cutoff = 0.5          # F = c/(s + c); or f_num/f_den
//! h_num = [0.5]           # H = h_num/h_den; or h_cutoff: H = c/(s + c)
//! h_den = [-0.5, 1.0]
//! sigma = 0.1
//!
//! [weights]
//! eps1 = 0.5
//! eps3 = 0.5
//!
//! [power]
//! gamma_u = 1.0
//! gamma_y = 2.5
//!
//! [reference]
//! sigma_r = 0.2
//! ```
//!
//! Roots in `zeros`/`poles` are reals or `[re, im]` pairs; complex roots must
//! be listed together with their conjugates.

use std::path::Path;

use serde::Deserialize;
use toml::Value;
use trackperf::h2opt::{Channel, PowerLimits, Problem, Weights};
use trackperf::ratfun::{Poly, RatFn};
use trackperf::C64;

use crate::CliError;

#[derive(Clone, Copy, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum RootSpec {
    Real(f64),
    Complex([f64; 2]),
}

impl RootSpec {
    fn point(self) -> C64 {
        match self {
            RootSpec::Real(x) => C64::new(x, 0.0),
            RootSpec::Complex([re, im]) => C64::new(re, im),
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantConfig {
    pub num: Option<Vec<f64>>,
    pub den: Option<Vec<f64>>,
    pub zeros: Option<Vec<RootSpec>>,
    pub poles: Option<Vec<RootSpec>>,
    pub gain: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    pub f_num: Option<Vec<f64>>,
    pub f_den: Option<Vec<f64>>,
    pub f_cutoff: Option<f64>,
    pub h_num: Option<Vec<f64>>,
    pub h_den: Option<Vec<f64>>,
    pub h_cutoff: Option<f64>,
    #[serde(default)]
    pub sigma: f64,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsConfig {
    pub eps1: f64,
    #[serde(default)]
    pub eps2: f64,
    #[serde(default)]
    pub eps3: f64,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerConfig {
    pub gamma_u: f64,
    pub gamma_y: f64,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceConfig {
    pub sigma_r: f64,
}

#[derive(Clone, Copy, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    /// Relative quadrature tolerance.
    pub quad_tol: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub plant: PlantConfig,
    #[serde(default)]
    pub channel_down: ChannelConfig,
    #[serde(default)]
    pub channel_up: ChannelConfig,
    pub weights: WeightsConfig,
    pub power: PowerConfig,
    pub reference: ReferenceConfig,
    #[serde(default)]
    pub solver: SolverConfig,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn rational(name: &str, num: &[f64], den: &[f64]) -> Result<RatFn, CliError> {
    RatFn::from_real_coeffs(num, den).map_err(|e| config_err(format!("{name}: {e}")))
}

fn first_order(c: f64, name: &str) -> Result<RatFn, CliError> {
    if !(c.is_finite() && c > 0.0) {
        return Err(config_err(format!("{name} must be positive, got {c}")));
    }
    rational(name, &[c], &[c, 1.0])
}

/// Transfer from a `*_num/*_den` pair or a first-order cutoff, with a default when neither is given.
fn transfer(
    name: &str,
    num: &Option<Vec<f64>>,
    den: &Option<Vec<f64>>,
    cutoff: Option<f64>,
    default: RatFn,
) -> Result<RatFn, CliError> {
    match (num, den, cutoff) {
        (None, None, None) => Ok(default),
        (None, None, Some(c)) => first_order(c, &format!("{name}_cutoff")),
        (_, _, Some(_)) => Err(config_err(format!(
            "{name}_cutoff cannot be combined with {name}_num/{name}_den"
        ))),
        (Some(n), d, None) => rational(name, n, d.as_deref().unwrap_or(&[1.0])),
        (None, Some(_), None) => Err(config_err(format!("{name}_den given without {name}_num"))),
    }
}

impl ChannelConfig {
    fn to_channel(&self, which: &str) -> Result<Channel, CliError> {
        Ok(Channel {
            f: transfer(&format!("{which}.f"), &self.f_num, &self.f_den, self.f_cutoff, RatFn::one())?,
            h: transfer(&format!("{which}.h"), &self.h_num, &self.h_den, self.h_cutoff, RatFn::zero())?,
            sigma: self.sigma,
        })
    }
}

impl Config {
    pub fn from_value(value: Value) -> Result<Self, CliError> {
        value.try_into().map_err(|e: toml::de::Error| config_err(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        Self::from_value(load_value(path)?)
    }

    pub fn to_problem(&self) -> Result<Problem, CliError> {
        let down = self.channel_down.to_channel("channel_down")?;
        let up = self.channel_up.to_channel("channel_up")?;
        let w = Weights {
            eps1: self.weights.eps1,
            eps2: self.weights.eps2,
            eps3: self.weights.eps3,
        };
        let power = PowerLimits {
            gamma_u: self.power.gamma_u,
            gamma_y: self.power.gamma_y,
        };
        let sigma_r = self.reference.sigma_r;
        let p = &self.plant;
        let built = match (&p.num, &p.den, &p.zeros, &p.poles) {
            (Some(num), Some(den), None, None) => {
                if p.gain.is_some() {
                    return Err(config_err("plant.gain applies to the zeros/poles form only"));
                }
                if num.iter().chain(den).any(|c| !c.is_finite()) {
                    return Err(config_err("plant coefficients must be finite"));
                }
                Problem::from_plant_polys(&Poly::from_real(num), &Poly::from_real(den), down, up, w, power, sigma_r)
            }
            (None, None, zeros, Some(poles)) => {
                let zeros: Vec<C64> = zeros.iter().flatten().map(|r| r.point()).collect();
                let poles: Vec<C64> = poles.iter().map(|r| r.point()).collect();
                if zeros.iter().chain(&poles).any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                    return Err(config_err("plant roots must be finite"));
                }
                let plant = RatFn::from_zpk(C64::new(p.gain.unwrap_or(1.0), 0.0), &zeros, &poles);
                Problem::new(plant, down, up, w, power, sigma_r)
            }
            _ => {
                return Err(config_err(
                    "plant needs either num and den, or poles with optional zeros and gain",
                ))
            }
        };
        built.map_err(CliError::Solver)
    }
}

pub fn load_value(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
    text.parse::<Value>()
        .map_err(|e| config_err(format!("{}: {e}", path.display())))
}

#[derive(Clone, Debug, PartialEq)]
enum Segment {
    Key(String),
    Index(usize),
}

fn parse_path(path: &str) -> Result<Vec<Segment>, CliError> {
    let bad = || config_err(format!("malformed config path '{path}'"));
    let mut out = Vec::new();
    for part in path.split('.') {
        let (key, mut rest) = match part.find('[') {
            Some(i) => (&part[..i], &part[i..]),
            None => (part, ""),
        };
        if key.is_empty() {
            return Err(bad());
        }
        out.push(Segment::Key(key.to_string()));
        while !rest.is_empty() {
            let close = rest.find(']').ok_or_else(bad)?;
            if !rest.starts_with('[') {
                return Err(bad());
            }
            let idx = rest[1..close].parse::<usize>().map_err(|_| bad())?;
            out.push(Segment::Index(idx));
            rest = &rest[close + 1..];
        }
    }
    Ok(out)
}

/// Sets the numeric leaf at a dotted path such as `channel_up.f_cutoff` or `plant.poles[1]`.
///
/// Missing table keys are created; array indices must exist; existing leaves must be numeric.
pub fn set_path(root: &mut Value, path: &str, x: f64) -> Result<(), CliError> {
    let segs = parse_path(path)?;
    let mut cur = root;
    for (i, seg) in segs.iter().enumerate() {
        let last = i + 1 == segs.len();
        cur = match (seg, cur) {
            (Segment::Key(k), Value::Table(t)) => {
                if !t.contains_key(k) {
                    let fresh = if last {
                        Value::Float(x)
                    } else {
                        Value::Table(Default::default())
                    };
                    t.insert(k.clone(), fresh);
                }
                t.get_mut(k).expect("key present")
            }
            (Segment::Index(j), Value::Array(a)) => {
                let len = a.len();
                a.get_mut(*j).ok_or_else(|| {
                    config_err(format!("{path}: index {j} out of range (length {len})"))
                })?
            }
            _ => return Err(config_err(format!("{path}: does not address a config entry"))),
        };
    }
    match cur {
        Value::Float(_) | Value::Integer(_) => {
            *cur = Value::Float(x);
            Ok(())
        }
        _ => Err(config_err(format!("{path}: not a numeric leaf"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX1: &str = r#"
        [plant]
        num = [-3.0, 1.0]
        den = [-2.0, -1.0, 1.0]
        [channel_up]
        f_cutoff = 0.5
        h_num = [0.5]
        h_den = [-0.5, 1.0]
        sigma = 0.1
        [weights]
        eps1 = 0.5
        eps3 = 0.5
        [power]
        gamma_u = 1
        gamma_y = 2.5
        [reference]
        sigma_r = 0.2
    "#;

    #[test]
    fn parses_and_builds() {
        let v: Value = EX1.parse().unwrap();
        let p = Config::from_value(v).unwrap().to_problem().unwrap();
        assert!((p.up.f.at_jw(0.0).re - 1.0).abs() < 1e-15);
        assert!(p.down.h.is_zero());
        assert_eq!(p.power.gamma_u, 1.0);
    }

    #[test]
    fn set_path_creates_and_overwrites() {
        let mut v: Value = EX1.parse().unwrap();
        set_path(&mut v, "channel_up.f_cutoff", 0.25).unwrap();
        set_path(&mut v, "plant.den[0]", -3.0).unwrap();
        set_path(&mut v, "channel_down.sigma", 0.3).unwrap();
        let c = Config::from_value(v.clone()).unwrap();
        assert_eq!(c.channel_up.f_cutoff, Some(0.25));
        assert_eq!(c.plant.den.as_ref().unwrap()[0], -3.0);
        assert_eq!(c.channel_down.sigma, 0.3);
        assert!(set_path(&mut v, "plant.den[7]", 1.0).is_err());
        assert!(set_path(&mut v, "plant", 1.0).is_err());
        assert!(set_path(&mut v, "plant..den", 1.0).is_err());
    }

    #[test]
    fn rejects_conflicts_and_unknown_keys() {
        let mut v: Value = EX1.parse().unwrap();
        set_path(&mut v, "channel_up.f_num[0]", 1.0).unwrap_err();
        let t = v.get_mut("channel_up").unwrap().as_table_mut().unwrap();
        t.insert("f_num".into(), Value::Array(vec![Value::Float(1.0)]));
        assert!(Config::from_value(v.clone()).unwrap().to_problem().is_err());
        let mut v: Value = EX1.parse().unwrap();
        v.get_mut("weights").unwrap().as_table_mut().unwrap().insert("eps4".into(), Value::Float(1.0));
        assert!(Config::from_value(v).is_err());
    }

    #[test]
    fn zpk_plant() {
        let text = EX1.replace(
            "num = [-3.0, 1.0]\n        den = [-2.0, -1.0, 1.0]",
            "zeros = [3.0]\n        poles = [2.0, -1.0]",
        );
        let p = Config::from_value(text.parse().unwrap()).unwrap().to_problem().unwrap();
        let q = Config::from_value(EX1.parse().unwrap()).unwrap().to_problem().unwrap();
        assert!(p.plant.approx_eq(&q.plant, 1e-12));
    }
}
