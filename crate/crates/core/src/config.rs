//! JSON configuration for the command-line front end.
//!
//! Functions are named built-ins, written either as `"name:p1,p2"` or as
//! `{"name": "...", "params": [...]}`.

use std::path::Path;

use serde::Deserialize;

use crate::contraction::{ConditionKind, ConditionSpec, CoupledMap};
use crate::control::ControlFunction;
use crate::error::{Error, Result};
use crate::fredholm::{FredholmProblem, LowerUpperPair};
use crate::order::{Metric, OrderedVector};
use crate::solver::SolverConfig;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Builtin {
    Text(String),
    Object {
        name: String,
        #[serde(default)]
        params: Vec<f64>,
    },
}

impl Builtin {
    fn parts(&self) -> std::result::Result<(String, Vec<f64>), String> {
        match self {
            Builtin::Object { name, params } => Ok((name.trim().to_string(), params.clone())),
            Builtin::Text(text) => match text.split_once(':') {
                None => Ok((text.trim().to_string(), Vec::new())),
                Some((name, rest)) => {
                    let params = rest
                        .split(',')
                        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("`{p}` is not a number in `{text}`")))
                        .collect::<std::result::Result<Vec<_>, _>>()?;
                    Ok((name.trim().to_string(), params))
                }
            },
        }
    }
}

fn field_err(field: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("{field}: {msg}"))
}

fn arity(field: &str, name: &str, params: &[f64], n: usize) -> Result<()> {
    if params.len() != n {
        return Err(field_err(field, format!("`{name}` takes {n} parameter(s), got {}", params.len())));
    }
    if params.iter().any(|p| !p.is_finite()) {
        return Err(field_err(field, "parameters must be finite"));
    }
    Ok(())
}

fn poly(coeffs: Vec<f64>) -> impl Fn(f64) -> f64 + Send + Sync + 'static {
    move |x| coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Kernels `K(t, s)`: `zero`, `constant:c`, `separable:c,p,q` (`c t^p s^q`).
pub fn kernel(field: &str, spec: &Builtin) -> Result<impl Fn(f64, f64) -> f64 + Send + Sync + 'static> {
    let (name, p) = spec.parts().map_err(|m| field_err(field, m))?;
    let (c, pt, ps) = match name.as_str() {
        "zero" => {
            arity(field, &name, &p, 0)?;
            (0.0, 0.0, 0.0)
        }
        "constant" => {
            arity(field, &name, &p, 1)?;
            (p[0], 0.0, 0.0)
        }
        "separable" => {
            arity(field, &name, &p, 3)?;
            (p[0], p[1], p[2])
        }
        _ => return Err(field_err(field, format!("unknown built-in `{name}`"))),
    };
    Ok(move |t: f64, s: f64| c * t.powf(pt) * s.powf(ps))
}

/// Nonlinearities `f(s, x)`: `zero`, `linear:c` (`c x`), `polynomial:c0,c1,..` in `x`.
pub fn nonlinearity(field: &str, spec: &Builtin) -> Result<impl Fn(f64, f64) -> f64 + Send + Sync + 'static> {
    let (name, p) = spec.parts().map_err(|m| field_err(field, m))?;
    let coeffs = match name.as_str() {
        "zero" => {
            arity(field, &name, &p, 0)?;
            vec![]
        }
        "linear" => {
            arity(field, &name, &p, 1)?;
            vec![0.0, p[0]]
        }
        "polynomial" => {
            arity(field, &name, &p, p.len().max(1))?;
            p
        }
        _ => return Err(field_err(field, format!("unknown built-in `{name}`"))),
    };
    let f = poly(coeffs);
    Ok(move |_s: f64, x: f64| f(x))
}

/// Forcing terms `h(t)`: `zero`, `constant:c`, `identity`, `polynomial:c0,c1,..` in `t`.
pub fn forcing(field: &str, spec: &Builtin) -> Result<impl Fn(f64) -> f64 + Send + Sync + 'static> {
    let (name, p) = spec.parts().map_err(|m| field_err(field, m))?;
    let coeffs = match name.as_str() {
        "zero" => {
            arity(field, &name, &p, 0)?;
            vec![]
        }
        "constant" => {
            arity(field, &name, &p, 1)?;
            p
        }
        "identity" => {
            arity(field, &name, &p, 0)?;
            vec![0.0, 1.0]
        }
        "polynomial" => {
            arity(field, &name, &p, p.len().max(1))?;
            p
        }
        _ => return Err(field_err(field, format!("unknown built-in `{name}`"))),
    };
    Ok(poly(coeffs))
}

pub fn control(field: &str, spec: &str) -> Result<ControlFunction> {
    ControlFunction::builtin(spec).map_err(|e| field_err(field, e))
}

/// Coupled maps: `example1`, `linear:a,b` (`a x - b y`), `product` (`x y`),
/// `constant:c`, `first` (`F(x, y) = x`).
pub fn coupled_map(field: &str, spec: &str) -> Result<CoupledMap> {
    let (name, p) = Builtin::Text(spec.to_string()).parts().map_err(|m| field_err(field, m))?;
    Ok(match name.as_str() {
        "example1" => {
            arity(field, &name, &p, 0)?;
            CoupledMap::example1()
        }
        "linear" => {
            arity(field, &name, &p, 2)?;
            let (a, b) = (p[0], p[1]);
            CoupledMap::scalar(spec, move |x, y| a * x - b * y)
        }
        "product" => {
            arity(field, &name, &p, 0)?;
            CoupledMap::scalar(spec, |x, y| x * y)
        }
        "constant" => {
            arity(field, &name, &p, 1)?;
            let c = p[0];
            CoupledMap::scalar(spec, move |_, _| c)
        }
        "first" => {
            arity(field, &name, &p, 0)?;
            CoupledMap::scalar(spec, |x, _| x)
        }
        _ => return Err(field_err(field, format!("unknown built-in `{name}`"))),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct Kernels {
    pub k1: Builtin,
    pub k2: Builtin,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct Nonlinearities {
    pub f: Builtin,
    pub g: Builtin,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct Constants {
    pub lambda: f64,
    pub mu: f64,
}

/// A constant function or explicit node values.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum NodeValues {
    Constant(f64),
    Nodes(Vec<f64>),
}

impl NodeValues {
    fn sample(&self, field: &str, n: usize) -> Result<OrderedVector> {
        let values = match self {
            NodeValues::Constant(c) => vec![*c; n],
            NodeValues::Nodes(v) if v.len() == n => v.clone(),
            NodeValues::Nodes(v) => {
                return Err(field_err(field, format!("expected {n} node values, got {}", v.len())));
            }
        };
        OrderedVector::new(values).map_err(|e| field_err(field, e))
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct LowerUpper {
    pub alpha: NodeValues,
    pub beta: NodeValues,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
pub struct SolverSection {
    pub tolerance: Option<f64>,
    pub max_iterations: Option<usize>,
}

/// Integral-equation problem file.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FredholmConfig {
    pub interval: Interval,
    pub grid_size: usize,
    pub kernels: Kernels,
    pub nonlinearities: Nonlinearities,
    #[serde(alias = "h")]
    pub forcing: Builtin,
    pub constants: Constants,
    pub theta: String,
    pub lower_upper: LowerUpper,
    #[serde(default)]
    pub solver: SolverSection,
}

impl FredholmConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn problem(&self) -> Result<FredholmProblem> {
        FredholmProblem::builder()
            .interval(self.interval.a, self.interval.b)
            .kernels(kernel("kernels.k1", &self.kernels.k1)?, kernel("kernels.k2", &self.kernels.k2)?)
            .nonlinearities(nonlinearity("nonlinearities.f", &self.nonlinearities.f)?, nonlinearity("nonlinearities.g", &self.nonlinearities.g)?)
            .forcing(forcing("forcing", &self.forcing)?)
            .constants(self.constants.lambda, self.constants.mu)
            .theta(control("theta", &self.theta)?)
            .grid_size(self.grid_size)
            .build()
            .map_err(|e| Error::Config(e.to_string()))
    }

    pub fn lower_upper(&self) -> Result<LowerUpperPair> {
        let n = self.grid_size;
        let alpha = self.lower_upper.alpha.sample("lower_upper.alpha", n)?;
        let beta = self.lower_upper.beta.sample("lower_upper.beta", n)?;
        LowerUpperPair::new(alpha, beta)
    }

    pub fn solver_config(&self) -> SolverConfig {
        let mut cfg = SolverConfig::default();
        if let Some(t) = self.solver.tolerance {
            cfg.tolerance = t;
        }
        if let Some(m) = self.solver.max_iterations {
            cfg.max_iterations = m;
        }
        cfg
    }
}

/// Condition-check file for `certify` / `falsify`.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionConfig {
    pub condition: Option<String>,
    pub map: Option<String>,
    pub phi: Option<String>,
    pub psi: Option<String>,
    pub k: Option<f64>,
    pub metric: Option<Metric>,
    /// Coordinates are sampled from `[-radius, radius]`.
    pub radius: Option<f64>,
    /// Check the discretized operator of this problem instead of `map`.
    pub fredholm: Option<FredholmConfig>,
}

impl ConditionConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn coupled_map(&self) -> Result<CoupledMap> {
        match (&self.fredholm, &self.map) {
            (Some(fc), None) => Ok(fc.problem()?.discretize().map_err(|e| field_err("fredholm", e))?.map),
            (None, Some(m)) => coupled_map("map", m),
            (Some(_), Some(_)) => Err(field_err("map", "give either `map` or `fredholm`, not both")),
            (None, None) => Err(field_err("map", "missing")),
        }
    }

    pub fn condition_spec(&self, dim: usize) -> Result<ConditionSpec> {
        let name = self.condition.as_deref().ok_or_else(|| field_err("condition", "missing"))?;
        let phi = || control("phi", self.phi.as_deref().unwrap_or("identity"));
        let psi = || control("psi", self.psi.as_deref().ok_or_else(|| field_err("psi", "missing"))?);
        let kind = match name {
            "bhaskar" => {
                let k = self.k.ok_or_else(|| field_err("k", "missing"))?;
                ConditionKind::bhaskar(k).map_err(|e| field_err("k", e))?
            }
            "luong" => ConditionKind::Luong { phi: phi()?, psi: psi()? },
            "berinde" => ConditionKind::Berinde { phi: phi()?, psi: psi()? },
            "berinde-cor" => ConditionKind::BerindeCor { psi: psi()? },
            other => return Err(field_err("condition", format!("unknown condition `{other}`"))),
        };
        let metric = self.metric.unwrap_or(if dim == 1 { Metric::AbsoluteScalar } else { Metric::SupNorm });
        Ok(ConditionSpec::new(kind, metric))
    }
}

/// Function lists for `validate-functions`.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionsConfig {
    #[serde(default)]
    pub phi: Vec<String>,
    #[serde(default)]
    pub psi: Vec<String>,
    #[serde(default)]
    pub theta: Vec<String>,
}

impl FunctionsConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DERIVED: &str = r#"{
        "interval": {"a": 0, "b": 1},
        "grid_size": 5,
        "kernels": {"k1": "constant:0.25", "k2": {"name": "constant", "params": [-0.125]}},
        "nonlinearities": {"f": "linear:0.041666666666666664", "g": "linear:-0.020833333333333332"},
        "forcing": "constant:1",
        "constants": {"lambda": 0.16666666666666666, "mu": 0.08333333333333333},
        "theta": "theta1:0.25",
        "lower_upper": {"alpha": 0, "beta": [2, 2, 2, 2, 2]}
    }"#;

    #[test]
    fn parses_problem() {
        let c = FredholmConfig::from_json(DERIVED).unwrap();
        let p = c.problem().unwrap();
        assert_eq!(p.grid_size(), 5);
        let lu = c.lower_upper().unwrap();
        assert_eq!(lu.beta.as_slice(), &[2.0; 5]);
        assert_eq!(c.solver_config().tolerance, 1e-10);
    }

    #[test]
    fn node_count_mismatch_names_field() {
        let text = DERIVED.replace("[2, 2, 2, 2, 2]", "[2, 2]");
        let err = FredholmConfig::from_json(&text).unwrap().lower_upper().unwrap_err();
        assert!(err.to_string().contains("lower_upper.beta"));
    }

    #[test]
    fn unknown_builtin_names_field() {
        let text = DERIVED.replace("constant:0.25", "gaussian:1");
        let err = FredholmConfig::from_json(&text).unwrap().problem().unwrap_err();
        assert!(err.to_string().contains("kernels.k1"), "{err}");
        let text = DERIVED.replace("theta1:0.25", "theta9");
        let err = FredholmConfig::from_json(&text).unwrap().problem().unwrap_err();
        assert!(err.to_string().contains("theta"), "{err}");
    }

    #[test]
    fn builtin_shapes() {
        let k = kernel("k", &Builtin::Text("separable:2,1,2".into())).unwrap();
        assert_eq!(k(3.0, 2.0), 24.0);
        let f = nonlinearity("f", &Builtin::Text("polynomial:1,0,3".into())).unwrap();
        assert_eq!(f(0.0, 2.0), 13.0);
        let h = forcing("h", &Builtin::Text("identity".into())).unwrap();
        assert_eq!(h(0.7), 0.7);
        assert!(kernel("k", &Builtin::Text("constant".into())).is_err());
        assert!(kernel("k", &Builtin::Text("constant:x".into())).is_err());
    }

    #[test]
    fn coupled_map_builtins() {
        let s = |v: f64| OrderedVector::scalar(v).unwrap();
        assert_eq!(coupled_map("map", "linear:0.5,0.25").unwrap().eval(&s(2.0), &s(4.0)).unwrap()[0], 0.0);
        assert_eq!(coupled_map("map", "example1").unwrap().eval(&s(-2.0), &s(3.0)).unwrap()[0], -2.0);
        assert!(coupled_map("map", "linear:1").is_err());
        assert!(coupled_map("map", "sine").is_err());
    }

    #[test]
    fn condition_config() {
        let c = ConditionConfig {
            condition: Some("luong".into()),
            map: Some("example1".into()),
            psi: Some("linear:0.25".into()),
            ..Default::default()
        };
        let spec = c.condition_spec(1).unwrap();
        assert_eq!(spec.metric, Metric::AbsoluteScalar);
        assert_eq!(spec.kind.name(), "luong");
        let missing_k = ConditionConfig { condition: Some("bhaskar".into()), ..Default::default() };
        assert!(missing_k.condition_spec(1).unwrap_err().to_string().starts_with("config: k"));
    }
}
