//! Control functions: the altering distance `phi`, the gauge `psi` and the
//! Lipschitz-type modulus `theta` used by the integral-equation hypotheses.
//!
//! Class membership cannot be proven from point evaluations. The validators
//! here sample a grid and report every observed violation; a passing report is
//! evidence, not proof.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Class a control function claims to belong to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FunctionClass {
    /// Continuous, non-decreasing, `phi(t) < t` for `t > 0`.
    Phi,
    /// Positive limits away from zero, vanishing limit at `0+`.
    Psi,
    /// Non-decreasing with `theta(r) = r/2 - psi(r/2)` for some admissible `psi`.
    Theta,
}

type ScalarFn = dyn Fn(f64) -> f64 + Send + Sync;

/// An evaluable scalar function `[0, inf) -> [0, inf)` with a declared class.
#[derive(Clone)]
pub struct ControlFunction {
    evaluator: Arc<ScalarFn>,
    class: FunctionClass,
    label: String,
}

impl fmt::Debug for ControlFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ControlFunction").field("class", &self.class).field("label", &self.label).finish()
    }
}

impl ControlFunction {
    pub fn new(label: impl Into<String>, class: FunctionClass, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { evaluator: Arc::new(f), class, label: label.into() }
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.evaluator)(t)
    }

    pub fn class(&self) -> FunctionClass {
        self.class
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_class(mut self, class: FunctionClass) -> Self {
        self.class = class;
        self
    }

    pub fn identity() -> Self {
        Self::new("identity", FunctionClass::Phi, |t| t)
    }

    /// `t -> k t`, declared as a `phi`.
    pub fn linear(k: f64) -> Self {
        Self::new(format!("linear:{k}"), FunctionClass::Phi, move |t| k * t)
    }

    /// `t -> c t`, declared as a `psi`.
    pub fn psi_linear(c: f64) -> Self {
        Self::new(format!("psi-linear:{c}"), FunctionClass::Psi, move |t| c * t)
    }

    /// `theta_1(r) = k r`, admissible for `0 <= 2k < 1`.
    pub fn theta1(k: f64) -> Self {
        Self::new(format!("theta1:{k}"), FunctionClass::Theta, move |r| k * r)
    }

    /// `theta_2(r) = r^2 / (2 (r + 1))`.
    pub fn theta2() -> Self {
        Self::new("theta2", FunctionClass::Theta, |r| r * r / (2.0 * (r + 1.0)))
    }

    /// `theta_3(r) = r/2 - ln(r + 1)/2`.
    pub fn theta3() -> Self {
        Self::new("theta3", FunctionClass::Theta, |r| 0.5 * (r - r.ln_1p()))
    }

    /// Parses a built-in by name: `identity`, `linear:k`, `theta1:k`,
    /// `theta2`, `theta3`, `psi-linear:c`.
    pub fn builtin(spec: &str) -> Result<Self> {
        let (name, arg) = match spec.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (spec.trim(), None),
        };
        let param = |arg: Option<&str>| -> Result<f64> {
            let a = arg.ok_or_else(|| Error::InvalidParameter(format!("`{name}` needs a numeric parameter")))?;
            let v: f64 = a.parse().map_err(|_| Error::InvalidParameter(format!("`{a}` is not a number in `{spec}`")))?;
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("non-finite parameter in `{spec}`")));
            }
            Ok(v)
        };
        let no_param = |arg: Option<&str>| -> Result<()> {
            match arg {
                Some(_) => Err(Error::InvalidParameter(format!("`{name}` takes no parameter"))),
                None => Ok(()),
            }
        };
        match name {
            "identity" => no_param(arg).map(|_| Self::identity()),
            "linear" => param(arg).map(Self::linear),
            "psi-linear" => param(arg).map(Self::psi_linear),
            "theta1" => param(arg).map(Self::theta1),
            "theta2" => no_param(arg).map(|_| Self::theta2()),
            "theta3" => no_param(arg).map(|_| Self::theta3()),
            _ => Err(Error::UnknownBuiltin(spec.to_string())),
        }
    }
}

/// `psi(s) = s - theta(2s)`, the gauge a `theta` is built from.
pub fn psi_from_theta(theta: &ControlFunction) -> ControlFunction {
    let th = theta.clone();
    ControlFunction::new(format!("psi_of({})", theta.label), FunctionClass::Psi, move |s| s - th.eval(2.0 * s))
}

/// `theta(r) = r/2 - psi(r/2)`.
pub fn theta_from_psi(psi: &ControlFunction) -> ControlFunction {
    let ps = psi.clone();
    ControlFunction::new(format!("theta_of({})", psi.label), FunctionClass::Theta, move |r| 0.5 * r - ps.eval(0.5 * r))
}

/// Sorted positive sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid {
    points: Vec<f64>,
}

impl Default for SampleGrid {
    /// 256 log-spaced points in `[1e-9, 1e3]`.
    fn default() -> Self {
        Self::logarithmic(1e-9, 1e3, 256).expect("valid default grid")
    }
}

impl SampleGrid {
    pub fn logarithmic(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo > 0.0 && hi > lo && n >= 2 && hi.is_finite()) {
            return Err(Error::InvalidParameter(format!("bad log grid [{lo}, {hi}] x {n}")));
        }
        let (a, b) = (lo.ln(), hi.ln());
        let step = (b - a) / (n - 1) as f64;
        let mut points: Vec<f64> = (0..n).map(|i| (a + step * i as f64).exp()).collect();
        points[0] = lo;
        points[n - 1] = hi;
        Ok(Self { points })
    }

    /// `n` uniform points on `(0, t_max]` preceded by a geometric cluster
    /// `1e-9 * 2^j` below the first uniform point.
    pub fn uniform(t_max: f64, n: usize) -> Result<Self> {
        if !(t_max > 0.0 && t_max.is_finite() && n >= 1) {
            return Err(Error::InvalidParameter(format!("bad uniform grid (0, {t_max}] x {n}")));
        }
        let h = t_max / n as f64;
        let mut points: Vec<f64> = std::iter::successors(Some(1e-9), |t| Some(t * 2.0)).take_while(|t| *t < h).collect();
        points.extend((1..=n).map(|i| h * i as f64));
        Ok(Self { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Tunables for the sampled class checks.
#[derive(Debug, Clone)]
pub struct ValidationSettings {
    pub grid: SampleGrid,
    /// Allowed adjacent jump is `modulus * spacing * (local slope + 1)`.
    pub continuity_modulus: f64,
    /// Number of interior points where `lim_{t->r} psi(t) > 0` is probed.
    pub limit_points: usize,
    /// Smallest neighbourhood radius used in the limit probes.
    pub neighbourhood_floor: f64,
    /// `psi` at the end of the `2^-k -> 0` sequence must be below this.
    pub zero_limit_tolerance: f64,
}

impl Default for ValidationSettings {
    fn default() -> Self {
        Self {
            grid: SampleGrid::default(),
            continuity_modulus: 10.0,
            limit_points: 32,
            neighbourhood_floor: 1e-9,
            zero_limit_tolerance: 1e-4,
        }
    }
}

impl ValidationSettings {
    pub fn with_grid(grid: SampleGrid) -> Self {
        Self { grid, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassViolation {
    pub input: f64,
    pub observed: f64,
    pub expected: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassReport {
    pub class_checked: FunctionClass,
    pub label: String,
    pub passed: bool,
    pub violations: Vec<ClassViolation>,
    pub samples_used: usize,
}

struct Recorder<'a> {
    f: &'a ControlFunction,
    violations: Vec<ClassViolation>,
    samples: usize,
}

impl<'a> Recorder<'a> {
    fn new(f: &'a ControlFunction) -> Self {
        Self { f, violations: Vec::new(), samples: 0 }
    }

    fn eval(&mut self, t: f64) -> f64 {
        self.samples += 1;
        self.f.eval(t)
    }

    fn violate(&mut self, input: f64, observed: f64, expected: impl Into<String>) {
        self.violations.push(ClassViolation { input, observed, expected: expected.into() });
    }

    /// Evaluates at 0 and on the grid; records non-finite or negative values.
    fn sample_values(&mut self, grid: &SampleGrid) -> Vec<f64> {
        let v0 = self.eval(0.0);
        if !(v0.is_finite() && v0 >= 0.0) {
            self.violate(0.0, v0, "finite and >= 0");
        }
        grid.points()
            .iter()
            .map(|&t| {
                let v = self.eval(t);
                if !(v.is_finite() && v >= 0.0) {
                    self.violate(t, v, "finite and >= 0");
                }
                v
            })
            .collect()
    }

    fn check_nondecreasing(&mut self, grid: &SampleGrid, values: &[f64]) {
        for (i, w) in values.windows(2).enumerate() {
            let slack = 1e-12 * w[0].abs().max(1.0);
            if w[1] < w[0] - slack {
                self.violate(grid.points()[i + 1], w[1], format!("non-decreasing: >= {}", w[0]));
            }
        }
    }

    fn finish(self, class: FunctionClass) -> ClassReport {
        ClassReport {
            class_checked: class,
            label: self.f.label.clone(),
            passed: self.violations.is_empty(),
            violations: self.violations,
            samples_used: self.samples,
        }
    }
}

pub fn validate_phi(phi: &ControlFunction, settings: &ValidationSettings) -> ClassReport {
    let grid = &settings.grid;
    let mut rec = Recorder::new(phi);
    let values = rec.sample_values(grid);
    rec.check_nondecreasing(grid, &values);

    for (&t, &v) in grid.points().iter().zip(&values) {
        if v.is_finite() && v >= t {
            rec.violate(t, v, format!("< {t}"));
        }
    }

    // continuity heuristic: adjacent jumps bounded by the neighbours' slopes
    let pts = grid.points();
    let slopes: Vec<f64> = pts
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| ((v[1] - v[0]) / (t[1] - t[0])).abs())
        .collect();
    for i in 0..slopes.len() {
        let left = if i > 0 { slopes[i - 1] } else { 0.0 };
        let right = slopes.get(i + 1).copied().unwrap_or(0.0);
        let h = pts[i + 1] - pts[i];
        let bound = settings.continuity_modulus * h * (left.max(right) + 1.0);
        let jump = (values[i + 1] - values[i]).abs();
        if jump.is_finite() && jump > bound {
            rec.violate(pts[i + 1], jump, format!("continuous: jump <= {bound:e}"));
        }
    }
    rec.finish(FunctionClass::Phi)
}

pub fn validate_psi(psi: &ControlFunction, settings: &ValidationSettings) -> ClassReport {
    let mut rec = Recorder::new(psi);
    check_psi_into(&mut rec, settings);
    rec.finish(FunctionClass::Psi)
}

fn check_psi_into(rec: &mut Recorder<'_>, settings: &ValidationSettings) {
    let grid = &settings.grid;
    let values = rec.sample_values(grid);
    for (&t, &v) in grid.points().iter().zip(&values) {
        if !(v > 0.0) {
            rec.violate(t, v, "> 0");
        }
    }

    // lim_{t -> 0+} psi(t) = 0 along 2^-k
    let tail = std::iter::successors(Some(1.0_f64), |t| Some(t / 2.0))
        .take_while(|t| *t >= settings.neighbourhood_floor)
        .last()
        .unwrap_or(1.0);
    let v = rec.eval(tail);
    if !(v.abs() <= settings.zero_limit_tolerance) {
        rec.violate(tail, v, format!("-> 0 (|psi| <= {:e})", settings.zero_limit_tolerance));
    }

    // lim_{t -> r} psi(t) > 0 on shrinking neighbourhoods
    let pts = grid.points();
    let k = settings.limit_points.clamp(2, pts.len().max(2));
    for j in 0..k {
        let r = pts[(j * (pts.len() - 1) / (k - 1)).min(pts.len() - 1)];
        let mut w = 0.5 * r;
        while w >= settings.neighbourhood_floor {
            for t in [r - w, r + w] {
                let v = rec.eval(t);
                if !(v > 0.0) {
                    rec.violate(t, v, format!("lim_(t->{r}) psi(t) > 0"));
                }
            }
            w *= 0.5;
        }
    }
}

/// Checks `theta` is non-decreasing and that `s - theta(2s)` is an admissible
/// `psi`.
pub fn validate_theta(theta: &ControlFunction, settings: &ValidationSettings) -> ClassReport {
    let grid = &settings.grid;
    let mut rec = Recorder::new(theta);
    let values = rec.sample_values(grid);
    rec.check_nondecreasing(grid, &values);

    let psi = psi_from_theta(theta);
    let mut psi_rec = Recorder::new(&psi);
    check_psi_into(&mut psi_rec, settings);
    rec.samples += psi_rec.samples;
    rec.violations.extend(psi_rec.violations.into_iter().map(|mut v| {
        v.expected = format!("derived psi: {}", v.expected);
        v
    }));
    rec.finish(FunctionClass::Theta)
}

/// Runs the validator matching the function's declared class.
pub fn validate(f: &ControlFunction, settings: &ValidationSettings) -> ClassReport {
    match f.class() {
        FunctionClass::Phi => validate_phi(f, settings),
        FunctionClass::Psi => validate_psi(f, settings),
        FunctionClass::Theta => validate_theta(f, settings),
    }
}
