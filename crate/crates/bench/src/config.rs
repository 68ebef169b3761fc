//! Sweep configuration and the small parsers behind the command-line flags.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Fdm,
    Fem,
}

impl FromStr for Scheme {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fdm" => Ok(Scheme::Fdm),
            "fem" => Ok(Scheme::Fem),
            other => Err(BenchError::Config(format!(
                "unknown scheme '{other}' (expected fdm or fem)"
            ))),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Fdm => "fdm",
            Scheme::Fem => "fem",
        })
    }
}

/// Norm used for finite-difference tables; finite elements always use `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormChoice {
    #[default]
    Euclidean,
    GridL2,
}

impl FromStr for NormChoice {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "euclidean" => Ok(NormChoice::Euclidean),
            "grid-l2" | "l2" => Ok(NormChoice::GridL2),
            other => Err(BenchError::Config(format!(
                "unknown norm '{other}' (expected euclidean or grid-l2)"
            ))),
        }
    }
}

/// Initial data: the built-in test problem or a pair of expressions in `x`, `y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum InitialData {
    /// `v0 = 0`, `w0 = (3/2) sin 2x sin 2y`.
    TestProblem,
    Expressions {
        v0: String,
        w0: String,
    },
}

impl FromStr for InitialData {
    type Err = BenchError;

    /// Accepts `test-problem` or `v0=<expr>;w0=<expr>` (either part may be
    /// omitted and defaults to `0`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("test-problem") {
            return Ok(InitialData::TestProblem);
        }
        let (mut v0, mut w0) = ("0".to_string(), "0".to_string());
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, expr) = part.split_once('=').ok_or_else(|| {
                BenchError::Config(format!("expected v0=<expr> or w0=<expr>, got '{part}'"))
            })?;
            match key.trim() {
                "v0" => v0 = expr.trim().to_string(),
                "w0" => w0 = expr.trim().to_string(),
                other => {
                    return Err(BenchError::Config(format!(
                        "unknown initial-data field '{other}'"
                    )))
                }
            }
        }
        let data = InitialData::Expressions { v0, w0 };
        let _ = data.functions()?;
        Ok(data)
    }
}

type Field = Box<dyn Fn(f64, f64) -> f64>;

fn compile(name: &str, expr: &str) -> Result<Field> {
    let parsed: meval::Expr = expr
        .parse()
        .map_err(|e| BenchError::Config(format!("cannot parse {name} = '{expr}': {e}")))?;
    let f = parsed
        .bind2("x", "y")
        .map_err(|e| BenchError::Config(format!("cannot bind {name} = '{expr}': {e}")))?;
    Ok(Box::new(f))
}

impl InitialData {
    /// The pair `(v0, w0)` as callables.
    pub fn functions(&self) -> Result<(Field, Field)> {
        match self {
            InitialData::TestProblem => Ok((
                Box::new(|_, _| 0.0),
                Box::new(|x: f64, y: f64| 1.5 * (2.0 * x).sin() * (2.0 * y).sin()),
            )),
            InitialData::Expressions { v0, w0 } => Ok((compile("v0", v0)?, compile("w0", w0)?)),
        }
    }
}

/// Parses a positive number, a fraction `p/q`, or an expression such as `pi`.
pub fn parse_positive(label: &str, s: &str) -> Result<f64> {
    let value = meval::eval_str(s.trim())
        .map_err(|e| BenchError::Config(format!("cannot parse {label} '{s}': {e}")))?;
    if !(value.is_finite() && value > 0.0) {
        return Err(BenchError::Config(format!(
            "{label} must be positive, got {s}"
        )));
    }
    Ok(value)
}

/// Parses `2^1..2^6` (powers of two, either direction) or a comma list.
pub fn parse_t_list(s: &str) -> Result<Vec<f64>> {
    let s = s.trim();
    if let Some((lo, hi)) = s.split_once("..") {
        let exponent = |part: &str| -> Result<i32> {
            part.trim()
                .strip_prefix("2^")
                .and_then(|e| e.trim().parse::<i32>().ok())
                .ok_or_else(|| {
                    BenchError::Config(format!("range bounds must look like 2^k, got '{part}'"))
                })
        };
        let (a, b) = (exponent(lo)?, exponent(hi)?);
        let exps: Vec<i32> = if a <= b {
            (a..=b).collect()
        } else {
            (b..=a).rev().collect()
        };
        return Ok(exps.into_iter().map(|k| 2f64.powi(k)).collect());
    }
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| parse_positive("T", p))
        .collect()
}

/// Everything one table needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub scheme: Scheme,
    pub n: usize,
    pub rho: f64,
    pub side: f64,
    pub dt: f64,
    pub t_list: Vec<f64>,
    pub init: InitialData,
    #[serde(default)]
    pub norm: NormChoice,
    /// Node and element files replacing the structured finite-element mesh.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mesh: Option<(PathBuf, PathBuf)>,
}

impl SweepConfig {
    /// Defaults of the reference experiments: `a = pi`, `rho = 5/2`, test data.
    pub fn reference(scheme: Scheme, n: usize, dt: f64, t_list: Vec<f64>) -> Self {
        Self {
            scheme,
            n,
            rho: 2.5,
            side: std::f64::consts::PI,
            dt,
            t_list,
            init: InitialData::TestProblem,
            norm: NormChoice::Euclidean,
            mesh: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(BenchError::Config(m));
        if self.n < 2 {
            return bad(format!("n must be at least 2, got {}", self.n));
        }
        if !(self.rho.is_finite() && self.rho > 0.0) || self.rho == 2.0 {
            return bad(format!("rho must be positive and not 2, got {}", self.rho));
        }
        if !(self.side.is_finite() && self.side > 0.0) {
            return bad(format!("side must be positive, got {}", self.side));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if self.t_list.is_empty() {
            return bad("T-list is empty".into());
        }
        if let Some(t) = self.t_list.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
            return bad(format!("T-list entries must be positive, got {t}"));
        }
        if self.t_list.len() > 1 {
            let r = self.t_list[1] / self.t_list[0];
            let ok = self.t_list.windows(2).all(|p| {
                let q = p[1] / p[0];
                ((q - 2.0).abs() < 1e-12 || (q - 0.5).abs() < 1e-12) && (q - r).abs() < 1e-12
            });
            if !ok {
                return bad("T-list must be monotone with consecutive ratio 2".into());
            }
        }
        for &t in &self.t_list {
            plate_nc::types::steps_for(t, self.dt)
                .map_err(|e| BenchError::Config(e.to_string()))
                .and_then(|m| {
                    if m < 2 {
                        bad(format!(
                            "T = {t} gives fewer than 2 steps of dt = {}",
                            self.dt
                        ))
                    } else {
                        Ok(())
                    }
                })?;
        }
        if self.mesh.is_some() && self.scheme == Scheme::Fdm {
            return bad("--mesh only applies to the fem scheme".into());
        }
        let _ = self.init.functions()?;
        Ok(())
    }
}
