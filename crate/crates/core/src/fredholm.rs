//! Nonlinear Fredholm equations
//!
//! ```text
//! x(t) = ∫_a^b (K1(t,s) + K2(t,s)) (f(s, x(s)) + g(s, x(s))) ds + h(t)
//! ```
//!
//! solved through the mixed monotone operator
//!
//! ```text
//! F(x,y)(t) = ∫ K1(t,s) [f(s,x(s)) + g(s,y(s))] ds + ∫ K2(t,s) [f(s,y(s)) + g(s,x(s))] ds + h(t)
//! ```
//!
//! on a uniform grid with composite trapezoid weights. `x = F(x, x)` is the
//! discretized equation.

use std::fmt;
use std::io::Write;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::contraction::CoupledMap;
use crate::control::{validate_theta, ControlFunction, ValidationSettings};
use crate::error::{Error, Result};
use crate::order::{check_dims, compare, OrderedVector};
use crate::solver::{diagonal_check, solve, CoupledFixedPoint, DiagonalReport, IterationTrace, SolverConfig};

pub type KernelFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
/// `(s, x) -> value`.
pub type NonlinearityFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type ForcingFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Slack for the pointwise inequalities checked on the grid.
pub const NODE_SLACK: f64 = 1e-12;
/// Witnesses kept per violated condition.
const MAX_WITNESSES: usize = 32;

#[derive(Clone)]
pub struct FredholmProblem {
    a: f64,
    b: f64,
    k1: KernelFn,
    k2: KernelFn,
    f: NonlinearityFn,
    g: NonlinearityFn,
    h: ForcingFn,
    lambda: f64,
    mu: f64,
    theta: ControlFunction,
    grid_size: usize,
}

impl fmt::Debug for FredholmProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FredholmProblem")
            .field("interval", &(self.a, self.b))
            .field("lambda", &self.lambda)
            .field("mu", &self.mu)
            .field("theta", &self.theta.label())
            .field("grid_size", &self.grid_size)
            .finish_non_exhaustive()
    }
}

impl FredholmProblem {
    pub fn builder() -> FredholmBuilder {
        FredholmBuilder::default()
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn theta(&self) -> &ControlFunction {
        &self.theta
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    pub fn with_grid_size(mut self, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("grid_size must be >= 2, got {n}")));
        }
        self.grid_size = n;
        Ok(self)
    }

    pub fn with_constants(mut self, lambda: f64, mu: f64) -> Result<Self> {
        check_constants(lambda, mu)?;
        self.lambda = lambda;
        self.mu = mu;
        Ok(self)
    }

    /// Uniform nodes `a = t_0 < ... < t_{n-1} = b`.
    pub fn nodes(&self) -> Vec<f64> {
        let n = self.grid_size;
        let step = (self.b - self.a) / (n - 1) as f64;
        let mut t: Vec<f64> = (0..n).map(|i| self.a + step * i as f64).collect();
        t[n - 1] = self.b;
        t
    }

    pub fn discretize(&self) -> Result<Discretization> {
        let nodes = self.nodes();
        let weights = trapezoid_weights(&nodes);
        let n = nodes.len();
        let mut wk1 = Vec::with_capacity(n * n);
        let mut wk2 = Vec::with_capacity(n * n);
        for &t in &nodes {
            for (&s, &w) in nodes.iter().zip(&weights) {
                let (k1, k2) = ((self.k1)(t, s), (self.k2)(t, s));
                if !k1.is_finite() {
                    return Err(Error::NonFiniteNode { what: "K1", t, s });
                }
                if !k2.is_finite() {
                    return Err(Error::NonFiniteNode { what: "K2", t, s });
                }
                wk1.push(w * k1);
                wk2.push(w * k2);
            }
        }
        let h = nodes
            .iter()
            .map(|&t| {
                let v = (self.h)(t);
                if v.is_finite() { Ok(v) } else { Err(Error::NonFiniteNode { what: "h", t, s: t }) }
            })
            .collect::<Result<Vec<_>>>()?;
        let ops = Arc::new(GridOperator { nodes: nodes.clone(), wk1, wk2, h, f: self.f.clone(), g: self.g.clone() });
        let op = ops.clone();
        let map = CoupledMap::new("fredholm", n, move |x, y| op.apply(x, y));
        Ok(Discretization { nodes, weights, ops, map })
    }
}

fn check_constants(lambda: f64, mu: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite() && mu > 0.0 && mu.is_finite()) {
        return Err(Error::InvalidParameter(format!("lambda and mu must be positive, got {lambda}, {mu}")));
    }
    Ok(())
}

/// Composite trapezoid weights on the given nodes.
pub fn trapezoid_weights(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut w = vec![0.0; n];
    for i in 0..n.saturating_sub(1) {
        let half = 0.5 * (nodes[i + 1] - nodes[i]);
        w[i] += half;
        w[i + 1] += half;
    }
    w
}

#[derive(Default)]
pub struct FredholmBuilder {
    interval: Option<(f64, f64)>,
    k1: Option<KernelFn>,
    k2: Option<KernelFn>,
    f: Option<NonlinearityFn>,
    g: Option<NonlinearityFn>,
    h: Option<ForcingFn>,
    constants: Option<(f64, f64)>,
    theta: Option<ControlFunction>,
    grid_size: Option<usize>,
}

impl FredholmBuilder {
    pub fn interval(mut self, a: f64, b: f64) -> Self {
        self.interval = Some((a, b));
        self
    }

    pub fn kernels(
        mut self,
        k1: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        k2: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.k1 = Some(Arc::new(k1));
        self.k2 = Some(Arc::new(k2));
        self
    }

    pub fn nonlinearities(
        mut self,
        f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        g: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.f = Some(Arc::new(f));
        self.g = Some(Arc::new(g));
        self
    }

    pub fn forcing(mut self, h: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.h = Some(Arc::new(h));
        self
    }

    pub fn constants(mut self, lambda: f64, mu: f64) -> Self {
        self.constants = Some((lambda, mu));
        self
    }

    pub fn theta(mut self, theta: ControlFunction) -> Self {
        self.theta = Some(theta);
        self
    }

    pub fn grid_size(mut self, n: usize) -> Self {
        self.grid_size = Some(n);
        self
    }

    pub fn build(self) -> Result<FredholmProblem> {
        let missing = |what: &str| Error::InvalidParameter(format!("missing {what}"));
        let (a, b) = self.interval.ok_or_else(|| missing("interval"))?;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidParameter(format!("interval needs a < b, got [{a}, {b}]")));
        }
        let (lambda, mu) = self.constants.ok_or_else(|| missing("constants lambda, mu"))?;
        check_constants(lambda, mu)?;
        let grid_size = self.grid_size.ok_or_else(|| missing("grid_size"))?;
        if grid_size < 2 {
            return Err(Error::InvalidParameter(format!("grid_size must be >= 2, got {grid_size}")));
        }
        Ok(FredholmProblem {
            a,
            b,
            k1: self.k1.ok_or_else(|| missing("kernel K1"))?,
            k2: self.k2.ok_or_else(|| missing("kernel K2"))?,
            f: self.f.ok_or_else(|| missing("nonlinearity f"))?,
            g: self.g.ok_or_else(|| missing("nonlinearity g"))?,
            h: self.h.ok_or_else(|| missing("forcing h"))?,
            lambda,
            mu,
            theta: self.theta.ok_or_else(|| missing("theta"))?,
            grid_size,
        })
    }
}

/// Weighted kernel matrices (row-major, `w_j K(t_i, s_j)`) and forcing samples.
struct GridOperator {
    nodes: Vec<f64>,
    wk1: Vec<f64>,
    wk2: Vec<f64>,
    h: Vec<f64>,
    f: NonlinearityFn,
    g: NonlinearityFn,
}

impl GridOperator {
    fn apply(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let n = self.nodes.len();
        // integrands of the K1 and K2 terms
        let (mut p, mut q) = (Vec::with_capacity(n), Vec::with_capacity(n));
        for (j, &s) in self.nodes.iter().enumerate() {
            let (fx, fy) = ((self.f)(s, x[j]), (self.f)(s, y[j]));
            let (gx, gy) = ((self.g)(s, x[j]), (self.g)(s, y[j]));
            p.push(fx + gy);
            q.push(fy + gx);
        }
        (0..n)
            .map(|i| {
                let row1 = &self.wk1[i * n..(i + 1) * n];
                let row2 = &self.wk2[i * n..(i + 1) * n];
                let mut acc = 0.0;
                for j in 0..n {
                    acc += row1[j] * p[j] + row2[j] * q[j];
                }
                acc + self.h[i]
            })
            .collect()
    }

    /// `max_i |x_i - (sum_j w_j (K1 + K2)_ij (f + g)(s_j, x_j) + h_i)|`.
    fn equation_residual(&self, x: &[f64]) -> f64 {
        let n = self.nodes.len();
        let integrand: Vec<f64> = self.nodes.iter().zip(x).map(|(&s, &v)| (self.f)(s, v) + (self.g)(s, v)).collect();
        (0..n)
            .map(|i| {
                let rhs: f64 = (0..n).map(|j| (self.wk1[i * n + j] + self.wk2[i * n + j]) * integrand[j]).sum::<f64>() + self.h[i];
                (x[i] - rhs).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Grid, weights and the induced coupled map.
pub struct Discretization {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    ops: Arc<GridOperator>,
    pub map: CoupledMap,
}

impl fmt::Debug for Discretization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Discretization").field("nodes", &self.nodes.len()).finish_non_exhaustive()
    }
}

impl Discretization {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `sum_j w_j (K1 - K2)(t_i, s_j)` for each node `t_i`.
    pub fn kernel_row_integrals(&self) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| (0..n).map(|j| self.ops.wk1[i * n + j] - self.ops.wk2[i * n + j]).sum())
            .collect()
    }

    /// Max-norm residual of the discretized equation at `x`.
    pub fn equation_residual(&self, x: &OrderedVector) -> Result<f64> {
        if x.dim() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), found: x.dim() });
        }
        Ok(self.ops.equation_residual(x.as_slice()))
    }

    pub fn verify_lower_upper(&self, pair: &LowerUpperPair) -> Result<LowerUpperCheck> {
        for v in [&pair.alpha, &pair.beta] {
            if v.dim() != self.len() {
                return Err(Error::DimensionMismatch { expected: self.len(), found: v.dim() });
            }
        }
        let lower = self.map.eval(&pair.alpha, &pair.beta)?;
        let upper = self.map.eval(&pair.beta, &pair.alpha)?;
        let mut witnesses = Vec::new();
        for (i, &t) in self.nodes.iter().enumerate() {
            if pair.alpha[i] > lower[i] + NODE_SLACK {
                witnesses.push(NodeViolation { node: i, t, side: Side::Lower, value: pair.alpha[i], bound: lower[i] });
            }
            if pair.beta[i] < upper[i] - NODE_SLACK {
                witnesses.push(NodeViolation { node: i, t, side: Side::Upper, value: pair.beta[i], bound: upper[i] });
            }
        }
        Ok(LowerUpperCheck { holds: witnesses.is_empty(), witnesses })
    }
}

pub fn discretize(p: &FredholmProblem) -> Result<Discretization> {
    p.discretize()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionViolation {
    pub condition: String,
    /// Sample coordinates: `(t, s)` for kernels, `(t, x, y)` for nonlinearities.
    pub at: Vec<f64>,
    pub observed: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AssumptionReport {
    pub k1_nonneg: bool,
    pub k2_nonpos: bool,
    pub f_lipschitz_ok: bool,
    pub g_lipschitz_ok: bool,
    pub theta_ok: bool,
    /// `(lambda + mu) * max_i ∫ (K1 - K2)(t_i, s) ds`.
    pub norm_bound: f64,
    /// `2 max(lambda, mu) * max_i ∫ (K1 - K2)(t_i, s) ds`, the older, stricter bound.
    pub luong_bound: f64,
    pub norm_ok: bool,
    pub violations: Vec<AssumptionViolation>,
}

impl AssumptionReport {
    pub fn passed(&self) -> bool {
        self.k1_nonneg && self.k2_nonpos && self.f_lipschitz_ok && self.g_lipschitz_ok && self.theta_ok && self.norm_ok
    }

    pub fn summary(&self) -> String {
        let mut failed = Vec::new();
        if !self.k1_nonneg {
            failed.push("condition (i): K1 >= 0".to_string());
        }
        if !self.k2_nonpos {
            failed.push("condition (i): K2 <= 0".to_string());
        }
        if !self.f_lipschitz_ok {
            failed.push("condition (ii): 0 <= f(t,x) - f(t,y) <= lambda theta(x-y)".to_string());
        }
        if !self.g_lipschitz_ok {
            failed.push("condition (ii): -mu theta(x-y) <= g(t,x) - g(t,y) <= 0".to_string());
        }
        if !self.theta_ok {
            failed.push("theta is not admissible".to_string());
        }
        if !self.norm_ok {
            failed.push(format!("condition (iii): (lambda+mu) sup ∫(K1-K2) = {} > 1", self.norm_bound));
        }
        if failed.is_empty() {
            "all conditions hold".to_string()
        } else {
            failed.join("; ")
        }
    }
}

/// Sampling plan for the Lipschitz-type checks.
#[derive(Debug, Clone)]
pub struct AssumptionSampler {
    pub samples: usize,
    /// Base values `y` are drawn from `[-radius, radius]`; gaps `x - y` are
    /// log-uniform in `[1e-6, radius]`.
    pub radius: f64,
    pub seed: u64,
}

impl Default for AssumptionSampler {
    fn default() -> Self {
        Self { samples: 2000, radius: 10.0, seed: 42 }
    }
}

fn push_capped(list: &mut Vec<AssumptionViolation>, count: &mut usize, v: AssumptionViolation) {
    if *count < MAX_WITNESSES {
        list.push(v);
    }
    *count += 1;
}

pub fn check_assumptions(p: &FredholmProblem, sampler: &AssumptionSampler) -> Result<AssumptionReport> {
    let disc = p.discretize()?;
    let nodes = &disc.nodes;
    let mut violations = Vec::new();

    let (mut n_k1, mut n_k2) = (0, 0);
    for &t in nodes {
        for &s in nodes {
            let k1 = (p.k1)(t, s);
            if !(k1 >= 0.0) {
                push_capped(&mut violations, &mut n_k1, AssumptionViolation { condition: "K1 >= 0".into(), at: vec![t, s], observed: k1, bound: 0.0 });
            }
            let k2 = (p.k2)(t, s);
            if !(k2 <= 0.0) {
                push_capped(&mut violations, &mut n_k2, AssumptionViolation { condition: "K2 <= 0".into(), at: vec![t, s], observed: k2, bound: 0.0 });
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(sampler.seed);
    let (lo, hi) = (1e-6_f64.ln(), sampler.radius.max(1e-6).ln());
    let (mut n_f, mut n_g) = (0, 0);
    for _ in 0..sampler.samples {
        let t = nodes[rng.gen_range(0..nodes.len())];
        let y = rng.gen_range(-sampler.radius..=sampler.radius);
        let gap = rng.gen_range(lo..=hi).exp();
        let x = y + gap;
        let th = p.theta.eval(x - y);

        let (fx, fy) = ((p.f)(t, x), (p.f)(t, y));
        let df = fx - fy;
        let slack = NODE_SLACK * (1.0 + fx.abs().max(fy.abs()));
        let upper = p.lambda * th;
        if !(df >= -slack && df <= upper + slack) {
            let bound = if df < 0.0 { 0.0 } else { upper };
            push_capped(&mut violations, &mut n_f, AssumptionViolation { condition: "0 <= f(t,x)-f(t,y) <= lambda theta(x-y)".into(), at: vec![t, x, y], observed: df, bound });
        }

        let (gx, gy) = ((p.g)(t, x), (p.g)(t, y));
        let dg = gx - gy;
        let slack = NODE_SLACK * (1.0 + gx.abs().max(gy.abs()));
        let lower = -p.mu * th;
        if !(dg <= slack && dg >= lower - slack) {
            let bound = if dg > 0.0 { 0.0 } else { lower };
            push_capped(&mut violations, &mut n_g, AssumptionViolation { condition: "-mu theta(x-y) <= g(t,x)-g(t,y) <= 0".into(), at: vec![t, x, y], observed: dg, bound });
        }
    }

    let theta_ok = validate_theta(&p.theta, &ValidationSettings::default()).passed;
    let sup = disc.kernel_row_integrals().into_iter().fold(f64::NEG_INFINITY, f64::max);
    let norm_bound = (p.lambda + p.mu) * sup;
    let luong_bound = 2.0 * p.lambda.max(p.mu) * sup;

    Ok(AssumptionReport {
        k1_nonneg: n_k1 == 0,
        k2_nonpos: n_k2 == 0,
        f_lipschitz_ok: n_f == 0,
        g_lipschitz_ok: n_g == 0,
        theta_ok,
        norm_bound,
        luong_bound,
        norm_ok: norm_bound <= 1.0 + NODE_SLACK,
        violations,
    })
}

/// A candidate coupled lower-upper solution sampled on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerUpperPair {
    pub alpha: OrderedVector,
    pub beta: OrderedVector,
}

impl LowerUpperPair {
    pub fn new(alpha: OrderedVector, beta: OrderedVector) -> Result<Self> {
        check_dims(&alpha, &beta)?;
        Ok(Self { alpha, beta })
    }

    pub fn constant(n: usize, alpha: f64, beta: f64) -> Result<Self> {
        Self::new(OrderedVector::constant(n, alpha)?, OrderedVector::constant(n, beta)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    /// `alpha(t) <= F(alpha, beta)(t)` failed.
    Lower,
    /// `beta(t) >= F(beta, alpha)(t)` failed.
    Upper,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeViolation {
    pub node: usize,
    pub t: f64,
    pub side: Side,
    pub value: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerUpperCheck {
    pub holds: bool,
    pub witnesses: Vec<NodeViolation>,
}

pub fn verify_lower_upper(p: &FredholmProblem, pair: &LowerUpperPair) -> Result<LowerUpperCheck> {
    p.discretize()?.verify_lower_upper(pair)
}

#[derive(Debug, Clone)]
pub struct FredholmSolution {
    pub nodes: Vec<f64>,
    pub solution: OrderedVector,
    /// Max-norm residual of the discretized equation at `solution`.
    pub residual: f64,
    pub report: AssumptionReport,
    pub fixed_point: CoupledFixedPoint,
    pub trace: IterationTrace,
    /// `None` when `alpha <= beta` does not hold.
    pub diagonal: Option<DiagonalReport>,
}

impl FredholmSolution {
    /// CSV with columns `t, x`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "x"])?;
        for (t, x) in self.nodes.iter().zip(self.solution.as_slice()) {
            w.write_record([t.to_string(), x.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn solve_integral_equation(p: &FredholmProblem, pair: &LowerUpperPair, cfg: &SolverConfig) -> Result<FredholmSolution> {
    solve_integral_equation_with(p, pair, cfg, &AssumptionSampler::default())
}

/// Checks the hypotheses, then iterates from `(alpha, beta)`. Refuses to
/// solve when any hypothesis fails.
pub fn solve_integral_equation_with(
    p: &FredholmProblem,
    pair: &LowerUpperPair,
    cfg: &SolverConfig,
    sampler: &AssumptionSampler,
) -> Result<FredholmSolution> {
    let disc = p.discretize()?;
    let report = check_assumptions(p, sampler)?;
    if !report.passed() {
        return Err(Error::AssumptionsUnmet { report: Box::new(report) });
    }
    let lu = disc.verify_lower_upper(pair)?;
    if !lu.holds {
        return Err(Error::NotLowerUpper { count: lu.witnesses.len() });
    }

    // classification must agree with the slack used by verify_lower_upper
    let cfg = SolverConfig { order_slack: cfg.order_slack.max(NODE_SLACK), ..cfg.clone() };
    let (fixed_point, trace) = solve(&disc.map, &pair.alpha, &pair.beta, &cfg)?;

    let diagonal = if compare(&pair.alpha, &pair.beta)?.is_le() {
        let report = diagonal_check(&fixed_point, &trace, &cfg)?;
        if !report.passed {
            return Err(Error::NotDiagonal { gap: report.gap });
        }
        Some(report)
    } else {
        None
    };

    let solution = fixed_point.point.first.clone();
    let residual = disc.equation_residual(&solution)?;
    Ok(FredholmSolution { nodes: disc.nodes, solution, residual, report, fixed_point, trace, diagonal })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trivial(f_zero: bool) -> FredholmProblem {
        let b = FredholmProblem::builder()
            .interval(0.0, 1.0)
            .kernels(|_, _| 1.0, |_, _| -1.0)
            .forcing(|t| t)
            .constants(1.0 / 6.0, 1.0 / 12.0)
            .theta(ControlFunction::theta1(0.25))
            .grid_size(11);
        if f_zero {
            b.nonlinearities(|_, _| 0.0, |_, _| 0.0).build().unwrap()
        } else {
            b.nonlinearities(|_, x| x / 24.0, |_, x| -x / 48.0).build().unwrap()
        }
    }

    fn derived(n: usize) -> FredholmProblem {
        FredholmProblem::builder()
            .interval(0.0, 1.0)
            .kernels(|_, _| 0.25, |_, _| -0.125)
            .nonlinearities(|_, x| x / 24.0, |_, x| -x / 48.0)
            .forcing(|_| 1.0)
            .constants(1.0 / 6.0, 1.0 / 12.0)
            .theta(ControlFunction::theta1(0.25))
            .grid_size(n)
            .build()
            .unwrap()
    }

    #[test]
    fn weights_two_nodes() {
        assert_eq!(trapezoid_weights(&[0.0, 1.0]), vec![0.5, 0.5]);
        assert_eq!(trapezoid_weights(&[0.0, 0.5, 1.0]), vec![0.25, 0.5, 0.25]);
    }

    #[test]
    fn builder_validation() {
        assert!(FredholmProblem::builder().interval(1.0, 0.0).build().is_err());
        assert!(derived(11).with_grid_size(1).is_err());
        assert!(derived(11).with_constants(0.0, 1.0).is_err());
        let missing_theta = FredholmProblem::builder()
            .interval(0.0, 1.0)
            .kernels(|_, _| 0.0, |_, _| 0.0)
            .nonlinearities(|_, _| 0.0, |_, _| 0.0)
            .forcing(|_| 0.0)
            .constants(1.0, 1.0)
            .grid_size(3)
            .build();
        assert!(matches!(missing_theta, Err(Error::InvalidParameter(m)) if m.contains("theta")));
    }

    #[test]
    fn cancelling_kernels_give_forcing_on_diagonal() {
        let p = trivial(true);
        let d = p.discretize().unwrap();
        let x = OrderedVector::new((0..11).map(|i| (i as f64).sin()).collect()).unwrap();
        let y = OrderedVector::constant(11, -3.0).unwrap();
        assert_eq!(d.map.eval(&x, &y).unwrap().as_slice(), p.nodes().as_slice());

        // with f, g non-zero only F(x, x) collapses to h
        let p = trivial(false);
        let d = p.discretize().unwrap();
        let fxx = d.map.eval(&x, &x).unwrap();
        for (a, t) in fxx.as_slice().iter().zip(p.nodes()) {
            assert!((a - t).abs() < 1e-15);
        }
        assert!(d.map.eval(&x, &y).unwrap().as_slice() != p.nodes().as_slice());
    }

    #[test]
    fn derived_operator_at_zero_is_forcing() {
        let d = derived(21).discretize().unwrap();
        let z = OrderedVector::constant(21, 0.0).unwrap();
        assert!(d.map.eval(&z, &z).unwrap().as_slice().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn non_finite_kernel_reports_node() {
        let p = FredholmProblem::builder()
            .interval(0.0, 1.0)
            .kernels(|t, s| 1.0 / (t - s), |_, _| 0.0)
            .nonlinearities(|_, _| 0.0, |_, _| 0.0)
            .forcing(|_| 0.0)
            .constants(1.0, 1.0)
            .theta(ControlFunction::theta2())
            .grid_size(3)
            .build()
            .unwrap();
        assert!(matches!(p.discretize(), Err(Error::NonFiniteNode { what: "K1", t, s }) if t == 0.0 && s == 0.0));
    }

    #[test]
    fn assumption_report_bound_comparison() {
        let p = FredholmProblem::builder()
            .interval(0.0, 1.0)
            .kernels(|_, _| 4.0, |_, _| 0.0)
            .nonlinearities(|_, x| x / 24.0, |_, x| -x / 48.0)
            .forcing(|_| 0.0)
            .constants(1.0 / 6.0, 1.0 / 12.0)
            .theta(ControlFunction::theta1(0.25))
            .grid_size(101)
            .build()
            .unwrap();
        let r = check_assumptions(&p, &AssumptionSampler::default()).unwrap();
        assert!((r.norm_bound - 1.0).abs() <= 1e-12, "{}", r.norm_bound);
        assert!(r.norm_ok);
        assert!((r.luong_bound - 4.0 / 3.0).abs() <= 1e-12);
        assert!(r.passed(), "{}", r.summary());
    }

    #[test]
    fn negative_k1_flagged() {
        let p = FredholmProblem::builder()
            .interval(0.0, 1.0)
            .kernels(|t, s| if t == 0.5 && s == 1.0 { -1.0 } else { 0.1 }, |_, _| 0.0)
            .nonlinearities(|_, _| 0.0, |_, _| 0.0)
            .forcing(|_| 0.0)
            .constants(1.0, 1.0)
            .theta(ControlFunction::theta2())
            .grid_size(3)
            .build()
            .unwrap();
        let r = check_assumptions(&p, &AssumptionSampler::default()).unwrap();
        assert!(!r.k1_nonneg && r.k2_nonpos);
        assert_eq!(r.violations[0].at, vec![0.5, 1.0]);
    }

    #[test]
    fn lipschitz_violations_flagged() {
        let p = derived(5).with_constants(1.0 / 12.0, 1.0 / 24.0).unwrap();
        let r = check_assumptions(&p, &AssumptionSampler::default()).unwrap();
        assert!(!r.f_lipschitz_ok && !r.g_lipschitz_ok);
        assert!(r.summary().contains("condition (ii)"));
    }

    #[test]
    fn lower_upper_examples() {
        let p = trivial(true);
        let n = p.grid_size();
        assert!(verify_lower_upper(&p, &LowerUpperPair::constant(n, 0.0, 2.0).unwrap()).unwrap().holds);

        let h = OrderedVector::new(p.nodes()).unwrap();
        assert!(verify_lower_upper(&p, &LowerUpperPair::new(h.clone(), h).unwrap()).unwrap().holds);

        let above = OrderedVector::new(p.nodes().iter().map(|t| t + 1.0).collect()).unwrap();
        let check = verify_lower_upper(&p, &LowerUpperPair::new(above, OrderedVector::constant(n, 2.0).unwrap()).unwrap()).unwrap();
        assert!(!check.holds);
        assert_eq!(check.witnesses.iter().filter(|w| w.side == Side::Lower).count(), n);

        let short = LowerUpperPair::constant(3, 0.0, 1.0).unwrap();
        assert!(verify_lower_upper(&p, &short).is_err());
    }

    #[test]
    fn solve_trivial() {
        let p = trivial(true);
        let cfg = SolverConfig::default();
        let s = solve_integral_equation(&p, &LowerUpperPair::constant(11, 0.0, 2.0).unwrap(), &cfg).unwrap();
        assert_eq!(s.solution.as_slice(), p.nodes().as_slice());
        assert!(s.residual <= 1e-12);
        assert!(s.diagonal.unwrap().passed);
    }

    #[test]
    fn solve_trivial_with_nonlinearities() {
        let p = trivial(false);
        let s = solve_integral_equation(&p, &LowerUpperPair::constant(11, -1.0, 2.0).unwrap(), &SolverConfig::default().with_tolerance(1e-13)).unwrap();
        for (x, t) in s.solution.as_slice().iter().zip(p.nodes()) {
            assert!((x - t).abs() <= 1e-12);
        }
    }

    #[test]
    fn solve_derived_constant() {
        let p = derived(101);
        let s = solve_integral_equation(&p, &LowerUpperPair::constant(101, 0.0, 2.0).unwrap(), &SolverConfig::default()).unwrap();
        for x in s.solution.as_slice() {
            assert!((x - 384.0 / 383.0).abs() <= 1e-8);
        }
    }

    #[test]
    fn refuses_when_norm_bound_exceeds_one() {
        let p = derived(11).with_constants(4.0, 2.0).unwrap();
        match solve_integral_equation(&p, &LowerUpperPair::constant(11, 0.0, 2.0).unwrap(), &SolverConfig::default()) {
            Err(Error::AssumptionsUnmet { report }) => {
                assert!(!report.norm_ok);
                assert!(report.norm_bound > 1.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn refuses_bad_lower_upper() {
        let p = derived(11);
        let r = solve_integral_equation(&p, &LowerUpperPair::constant(11, 3.0, 4.0).unwrap(), &SolverConfig::default());
        assert!(matches!(r, Err(Error::NotLowerUpper { count }) if count == 11));
    }

    #[test]
    fn solution_csv() {
        let p = trivial(true).with_grid_size(3).unwrap();
        let s = solve_integral_equation(&p, &LowerUpperPair::constant(3, 0.0, 2.0).unwrap(), &SolverConfig::default()).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "t,x\n0,0\n0.5,0.5\n1,1\n");
    }
}
