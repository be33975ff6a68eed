//! Picard iteration for coupled fixed points.
//!
//! The map `F` is lifted to `T(x, y) = (F(x, y), F(y, x))` on pairs and
//! iterated from a start satisfying either
//!
//! * rising: `x0 <= F(x0, y0)` and `y0 >= F(y0, x0)`, or
//! * falling: `x0 >= F(x0, y0)` and `y0 <= F(y0, x0)`.
//!
//! Under the contractive condition the iterates form a monotone chain in the
//! product order and the steps `delta_n = d2(Z_n, Z_{n-1})` never increase.
//! Both facts are monitored on every step.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::contraction::CoupledMap;
use crate::error::{Error, Result};
use crate::order::{bounds_pair, compare_with_slack, product_compare_with_slack, Metric, OrderedVector, PairPoint};

/// Steps larger than this abort the iteration.
pub const DIVERGENCE_LIMIT: f64 = 1e12;
/// Slack on `delta_{n+1} <= delta_n`.
pub const DELTA_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Tolerance in `d2` units.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Stop with `InvariantViolation` when a monitored invariant trips.
    pub strict_monotone: bool,
    pub metric: Metric,
    /// Componentwise slack for order comparisons; 0 is exact.
    pub order_slack: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { tolerance: 1e-10, max_iterations: 10_000, strict_monotone: false, metric: Metric::SupNorm, order_slack: 0.0 }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidParameter(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter("max_iterations must be at least 1".into()));
        }
        if !(self.order_slack >= 0.0) {
            return Err(Error::InvalidParameter("order_slack must be non-negative".into()));
        }
        Ok(())
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_metric(mut self, metric: Metric) -> Self {
        self.metric = metric;
        self
    }
}

/// Which start hypothesis holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum InitialCondition {
    /// `x0 <= F(x0, y0)`, `y0 >= F(y0, x0)`: the chain rises in the product order.
    Mic,
    /// `x0 >= F(x0, y0)`, `y0 <= F(y0, x0)`: the chain falls.
    Mare,
    Neither,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StopReason {
    Converged,
    MaxIterations,
    InvariantViolation,
}

#[derive(Debug, Clone, Serialize)]
pub struct IterationTrace {
    /// `Z_0 ..= Z_N`.
    pub points: Vec<PairPoint>,
    /// `deltas[i] = d2(points[i + 1], points[i])`.
    pub deltas: Vec<f64>,
    /// `chain_steps[i]`: the step `points[i] -> points[i + 1]` respects the chain order.
    pub chain_steps: Vec<bool>,
    pub initial_condition: InitialCondition,
    pub monotone_chain_ok: bool,
    pub delta_nonincreasing_ok: bool,
    pub stop_reason: StopReason,
    /// Metric the trace was measured in.
    pub metric: Metric,
}

impl IterationTrace {
    pub fn iterations(&self) -> usize {
        self.deltas.len()
    }

    pub fn last(&self) -> &PairPoint {
        self.points.last().expect("trace holds at least the start")
    }

    /// CSV with columns `n, x_0.., y_0.., delta_n, chain_ok`; row 0 is the start.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let dim = self.points[0].dim();
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["n".to_string()];
        header.extend((0..dim).map(|i| format!("x_{i}")));
        header.extend((0..dim).map(|i| format!("y_{i}")));
        header.push("delta_n".into());
        header.push("chain_ok".into());
        w.write_record(&header)?;
        for (n, p) in self.points.iter().enumerate() {
            let mut row = vec![n.to_string()];
            row.extend(p.first.as_slice().iter().map(f64::to_string));
            row.extend(p.second.as_slice().iter().map(f64::to_string));
            if n == 0 {
                row.push(String::new());
                row.push("true".into());
            } else {
                row.push(self.deltas[n - 1].to_string());
                row.push(self.chain_steps[n - 1].to_string());
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CoupledFixedPoint {
    pub point: PairPoint,
    /// `d2(T(Z), Z)`.
    pub residual: f64,
    /// `d(x, y) <= tolerance`.
    pub diagonal: bool,
}

pub fn apply_t(f: &CoupledMap, y: &PairPoint) -> Result<PairPoint> {
    Ok(PairPoint { first: f.eval(&y.first, &y.second)?, second: f.eval(&y.second, &y.first)? })
}

pub fn classify_initial(f: &CoupledMap, x0: &OrderedVector, y0: &OrderedVector) -> Result<InitialCondition> {
    classify_initial_with_slack(f, x0, y0, 0.0)
}

pub fn classify_initial_with_slack(
    f: &CoupledMap,
    x0: &OrderedVector,
    y0: &OrderedVector,
    slack: f64,
) -> Result<InitialCondition> {
    let fx = compare_with_slack(x0, &f.eval(x0, y0)?, slack)?;
    let fy = compare_with_slack(y0, &f.eval(y0, x0)?, slack)?;
    Ok(if fx.is_le() && fy.is_ge() {
        InitialCondition::Mic
    } else if fx.is_ge() && fy.is_le() {
        InitialCondition::Mare
    } else {
        InitialCondition::Neither
    })
}

/// A-posteriori bound on `d2(Z_N, Z*)` from the last two steps, assuming the
/// steps shrink geometrically. `None` when only one step exists.
fn tail_estimate(deltas: &[f64]) -> Option<f64> {
    match deltas {
        [.., prev, last] => {
            if *last == 0.0 {
                return Some(0.0);
            }
            let q = last / prev;
            Some(if q < 1.0 { last * q / (1.0 - q) } else { *last })
        }
        _ => None,
    }
}

/// Runs `Z_{n+1} = T(Z_n)` from `(x0, y0)`.
///
/// Converges once the step, the residual `d2(T(Z), Z)` and twice the tail
/// estimate of the distance to the limit are all within `tolerance`.
pub fn solve(
    f: &CoupledMap,
    x0: &OrderedVector,
    y0: &OrderedVector,
    cfg: &SolverConfig,
) -> Result<(CoupledFixedPoint, IterationTrace)> {
    cfg.validate()?;
    let start = PairPoint::new(x0.clone(), y0.clone())?;
    let initial = classify_initial_with_slack(f, x0, y0, cfg.order_slack)?;
    if initial == InitialCondition::Neither {
        return Err(Error::InitialConditionUnsatisfied);
    }

    let mut trace = IterationTrace {
        points: vec![start],
        deltas: Vec::new(),
        chain_steps: Vec::new(),
        initial_condition: initial,
        monotone_chain_ok: true,
        delta_nonincreasing_ok: true,
        stop_reason: StopReason::MaxIterations,
        metric: cfg.metric,
    };

    let mut current = trace.points[0].clone();
    for n in 0..cfg.max_iterations {
        let next = apply_t(f, &current)?;
        let delta = cfg.metric.d2(&next, &current)?;
        if delta > DIVERGENCE_LIMIT {
            return Err(Error::Diverged { iteration: n + 1, delta });
        }

        let order = product_compare_with_slack(&current, &next, cfg.order_slack)?;
        let chain_ok = match initial {
            InitialCondition::Mic => order.is_le(),
            _ => order.is_ge(),
        };
        let delta_ok = trace.deltas.last().is_none_or(|prev| delta <= prev + DELTA_SLACK);
        trace.monotone_chain_ok &= chain_ok;
        trace.delta_nonincreasing_ok &= delta_ok;
        trace.chain_steps.push(chain_ok);
        trace.deltas.push(delta);
        trace.points.push(next.clone());
        current = next;

        if cfg.strict_monotone && !(chain_ok && delta_ok) {
            trace.stop_reason = StopReason::InvariantViolation;
            return Err(Error::NotConverged { trace: Box::new(trace) });
        }

        if delta <= cfg.tolerance {
            let estimate_ok = tail_estimate(&trace.deltas).is_some_and(|e| 2.0 * e <= cfg.tolerance);
            let residual = cfg.metric.d2(&apply_t(f, &current)?, &current)?;
            if estimate_ok && residual <= cfg.tolerance {
                trace.stop_reason = StopReason::Converged;
                let gap = cfg.metric.distance(&current.first, &current.second)?;
                let fp = CoupledFixedPoint { point: current, residual, diagonal: gap <= cfg.tolerance };
                return Ok((fp, trace));
            }
        }
    }
    Err(Error::NotConverged { trace: Box::new(trace) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagonalReport {
    /// `x0` and `y0` were comparable, so the limit must be diagonal.
    pub applicable: bool,
    /// `d(x, y)` at the computed fixed point.
    pub gap: f64,
    pub passed: bool,
}

/// With comparable starting values the coupled fixed point must be of the
/// form `(x, x)`. Vacuously passes when `x0` and `y0` are incomparable.
pub fn diagonal_check(fp: &CoupledFixedPoint, trace: &IterationTrace, cfg: &SolverConfig) -> Result<DiagonalReport> {
    let start = &trace.points[0];
    let applicable = compare_with_slack(&start.first, &start.second, cfg.order_slack)?.is_comparable();
    let gap = cfg.metric.distance(&fp.point.first, &fp.point.second)?;
    Ok(DiagonalReport { applicable, gap, passed: !applicable || gap <= cfg.tolerance })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum UniquenessVerdict {
    /// Fewer than two fixed points to compare.
    Trivial,
    /// Every auxiliary iteration approached all compared fixed points.
    Corroborated,
    /// At least two distinct coupled fixed points coexist.
    Coexisting,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairProbe {
    pub i: usize,
    pub j: usize,
    /// Comparable element `(max, min)` the auxiliary iteration starts from.
    pub start: PairPoint,
    pub iterations: usize,
    /// `d2` from the final auxiliary iterate to fixed points `i` and `j`.
    pub distance_i: f64,
    pub distance_j: f64,
    pub corroborated: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct UniquenessReport {
    pub verdict: UniquenessVerdict,
    pub probes: Vec<PairProbe>,
}

/// Distances below `PROBE_FACTOR * tolerance` count as the same point.
pub const PROBE_FACTOR: f64 = 10.0;

/// For each pair of fixed points, starts `u_{n+1} = F(u_n, v_n)`,
/// `v_{n+1} = F(v_n, u_n)` from an element comparable to both and checks that
/// it approaches both.
pub fn uniqueness_probe(f: &CoupledMap, fixed_points: &[CoupledFixedPoint], cfg: &SolverConfig) -> Result<UniquenessReport> {
    cfg.validate()?;
    if fixed_points.len() < 2 {
        return Ok(UniquenessReport { verdict: UniquenessVerdict::Trivial, probes: Vec::new() });
    }
    let threshold = PROBE_FACTOR * cfg.tolerance;
    let mut probes = Vec::new();
    for i in 0..fixed_points.len() {
        for j in i + 1..fixed_points.len() {
            let (a, b) = (&fixed_points[i].point, &fixed_points[j].point);
            let start = bounds_pair(a, b)?;
            let mut w = start.clone();
            let mut iterations = 0;
            while iterations < cfg.max_iterations {
                let next = apply_t(f, &w)?;
                let step = cfg.metric.d2(&next, &w)?;
                if step > DIVERGENCE_LIMIT {
                    return Err(Error::Diverged { iteration: iterations + 1, delta: step });
                }
                w = next;
                iterations += 1;
                if step <= cfg.tolerance * 1e-2 {
                    break;
                }
            }
            let distance_i = cfg.metric.d2(&w, a)?;
            let distance_j = cfg.metric.d2(&w, b)?;
            let corroborated = distance_i <= threshold && distance_j <= threshold;
            probes.push(PairProbe { i, j, start, iterations, distance_i, distance_j, corroborated });
        }
    }
    let verdict = if probes.iter().all(|p| p.corroborated) {
        UniquenessVerdict::Corroborated
    } else {
        UniquenessVerdict::Coexisting
    };
    Ok(UniquenessReport { verdict, probes })
}

/// Solves from every start and probes the resulting fixed points.
pub fn uniqueness_from_starts(
    f: &CoupledMap,
    starts: &[(OrderedVector, OrderedVector)],
    cfg: &SolverConfig,
) -> Result<(Vec<CoupledFixedPoint>, UniquenessReport)> {
    let fps = starts
        .iter()
        .map(|(x0, y0)| solve(f, x0, y0, cfg).map(|(fp, _)| fp))
        .collect::<Result<Vec<_>>>()?;
    let report = uniqueness_probe(f, &fps, cfg)?;
    Ok((fps, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: f64) -> OrderedVector {
        OrderedVector::scalar(x).unwrap()
    }

    fn fp(x: f64, y: f64) -> CoupledFixedPoint {
        CoupledFixedPoint { point: PairPoint::scalars(x, y).unwrap(), residual: 0.0, diagonal: x == y }
    }

    #[test]
    fn apply_t_examples() {
        let f = CoupledMap::example1();
        assert_eq!(apply_t(&f, &PairPoint::scalars(-2.0, 3.0).unwrap()).unwrap(), PairPoint::scalars(-2.0, 1.75).unwrap());
        assert_eq!(apply_t(&f, &PairPoint::scalars(0.0, 0.0).unwrap()).unwrap(), PairPoint::scalars(0.0, 0.0).unwrap());
        let c = CoupledMap::scalar("c", |_, _| 2.5);
        assert_eq!(apply_t(&c, &PairPoint::scalars(-7.0, 9.0).unwrap()).unwrap(), PairPoint::scalars(2.5, 2.5).unwrap());
    }

    #[test]
    fn apply_t_non_finite() {
        let f = CoupledMap::scalar("inv", |x, _| 1.0 / x);
        assert!(matches!(apply_t(&f, &PairPoint::scalars(0.0, 1.0).unwrap()), Err(Error::NonFiniteOutput { .. })));
    }

    #[test]
    fn classify_examples() {
        let f = CoupledMap::example1();
        assert_eq!(classify_initial(&f, &s(-2.0), &s(3.0)).unwrap(), InitialCondition::Mic);
        // F(3,-2) = 7/4 <= 3, F(-2,3) = -2 >= -2
        assert_eq!(classify_initial(&f, &s(3.0), &s(-2.0)).unwrap(), InitialCondition::Mare);
        // F(1,0) = 0.25 < 1 rules out Mic; F(0,1) = -0.5 < 0 rules out Mare
        assert_eq!(classify_initial(&f, &s(1.0), &s(0.0)).unwrap(), InitialCondition::Neither);
        // both hold at a fixed point: report Mic
        assert_eq!(classify_initial(&f, &s(0.0), &s(0.0)).unwrap(), InitialCondition::Mic);
    }

    #[test]
    fn solve_example1() {
        let f = CoupledMap::example1();
        let cfg = SolverConfig::default().with_tolerance(1e-8);
        let (fp, trace) = solve(&f, &s(-2.0), &s(3.0), &cfg).unwrap();
        assert!(trace.iterations() <= 200);
        assert!(fp.point.first[0].abs() <= 1e-8 && fp.point.second[0].abs() <= 1e-8);
        assert!(fp.diagonal);
        assert!(trace.monotone_chain_ok && trace.delta_nonincreasing_ok);
        assert_eq!(trace.stop_reason, StopReason::Converged);
    }

    #[test]
    fn solve_constant_map() {
        let c = CoupledMap::scalar("c", |_, _| 2.5);
        // Mic needs x0 <= 2.5 <= y0
        let (fp, trace) = solve(&c, &s(-1.0), &s(4.0), &SolverConfig::default()).unwrap();
        assert!(trace.iterations() <= 2);
        assert_eq!(fp.point, PairPoint::scalars(2.5, 2.5).unwrap());
    }

    #[test]
    fn solve_half_x() {
        // F(0,1) = 0 >= 0 and F(1,0) = 0.5 <= 1
        let f = CoupledMap::scalar("x/2", |x, _| x / 2.0);
        assert_eq!(classify_initial(&f, &s(0.0), &s(1.0)).unwrap(), InitialCondition::Mic);
        let (fp, _) = solve(&f, &s(0.0), &s(1.0), &SolverConfig::default()).unwrap();
        assert!(fp.point.first[0].abs() <= 1e-10 && fp.point.second[0].abs() <= 1e-10);
    }

    #[test]
    fn solve_rejects_neither() {
        let r = solve(&CoupledMap::example1(), &s(1.0), &s(0.0), &SolverConfig::default());
        assert!(matches!(r, Err(Error::InitialConditionUnsatisfied)));
    }

    #[test]
    fn solve_detects_divergence() {
        let f = CoupledMap::scalar("2x-2y", |x, y| 2.0 * x - 2.0 * y);
        let r = solve(&f, &s(-1.0), &s(1.0), &SolverConfig::default());
        assert!(matches!(r, Err(Error::Diverged { .. })));
    }

    #[test]
    fn max_iterations_reported() {
        let f = CoupledMap::example1();
        let cfg = SolverConfig { max_iterations: 3, ..SolverConfig::default() };
        match solve(&f, &s(-2.0), &s(3.0), &cfg) {
            Err(Error::NotConverged { trace }) => {
                assert_eq!(trace.stop_reason, StopReason::MaxIterations);
                assert_eq!(trace.iterations(), 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn strict_mode_stops_on_growing_steps() {
        // mixed monotone, expanding until the clamp is reached
        let f = CoupledMap::scalar("sat", |x, _| (1.5 * x).clamp(-1.0, 1.0));
        let cfg = SolverConfig { strict_monotone: true, ..SolverConfig::default() };
        match solve(&f, &s(0.1), &s(-0.2), &cfg) {
            Err(Error::NotConverged { trace }) => {
                assert_eq!(trace.stop_reason, StopReason::InvariantViolation);
                assert!(!trace.delta_nonincreasing_ok);
            }
            other => panic!("unexpected {other:?}"),
        }
        // non-strict mode keeps going and records the diagnostic
        let (_, trace) = solve(&f, &s(0.1), &s(-0.2), &SolverConfig::default()).unwrap();
        assert!(!trace.delta_nonincreasing_ok);
    }

    #[test]
    fn invalid_config() {
        let cfg = SolverConfig { tolerance: 0.0, ..SolverConfig::default() };
        assert!(solve(&CoupledMap::example1(), &s(-2.0), &s(3.0), &cfg).is_err());
        let cfg = SolverConfig { max_iterations: 0, ..SolverConfig::default() };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn diagonal_check_cases() {
        let f = CoupledMap::example1();
        let cfg = SolverConfig::default();
        let (fp, trace) = solve(&f, &s(-2.0), &s(3.0), &cfg).unwrap();
        let r = diagonal_check(&fp, &trace, &cfg).unwrap();
        assert!(r.applicable && r.passed);

        let x0 = OrderedVector::new(vec![0.0, 1.0]).unwrap();
        let y0 = OrderedVector::new(vec![1.0, 0.0]).unwrap();
        let id = CoupledMap::new("id", 2, |x, _| x.to_vec());
        let (fp, trace) = solve(&id, &x0, &y0, &cfg).unwrap();
        let r = diagonal_check(&fp, &trace, &cfg).unwrap();
        assert!(!r.applicable && r.passed);
        assert!(r.gap > 0.5);
    }

    #[test]
    fn uniqueness_examples() {
        let f = CoupledMap::example1();
        let cfg = SolverConfig::default();
        let (fps, report) = uniqueness_from_starts(&f, &[(s(-2.0), s(3.0)), (s(-10.0), s(10.0))], &cfg).unwrap();
        assert_eq!(fps.len(), 2);
        assert_eq!(report.verdict, UniquenessVerdict::Corroborated);

        assert_eq!(uniqueness_probe(&f, &fps[..1], &cfg).unwrap().verdict, UniquenessVerdict::Trivial);

        let id = CoupledMap::scalar("F=x", |x, _| x);
        let report = uniqueness_probe(&id, &[fp(1.0, 2.0), fp(3.0, -1.0)], &cfg).unwrap();
        assert_eq!(report.verdict, UniquenessVerdict::Coexisting);
        assert_eq!(report.probes[0].start, PairPoint::scalars(3.0, -1.0).unwrap());
    }

    #[test]
    fn trace_csv_layout() {
        let (_, trace) = solve(&CoupledMap::example1(), &s(-2.0), &s(3.0), &SolverConfig::default()).unwrap();
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "n,x_0,y_0,delta_n,chain_ok");
        assert_eq!(lines.next().unwrap(), "0,-2,3,,true");
        assert_eq!(lines.next().unwrap(), "1,-2,1.75,0.625,true");
        assert_eq!(text.lines().count(), trace.points.len() + 1);
    }
}
