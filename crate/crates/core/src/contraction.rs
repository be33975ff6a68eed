//! Sampled certification and falsification of the contractive conditions and
//! of the mixed monotone property.
//!
//! Four inequalities are supported, all required for `x >= u, y <= v`:
//!
//! * `Bhaskar(k)`: `d(F(x,y), F(u,v)) <= k/2 [d(x,u) + d(y,v)]`
//! * `Luong(phi, psi)`: `phi(d(F(x,y), F(u,v))) <= phi(S)/2 - psi(S)` with `S = d(x,u) + d(y,v)`
//! * `Berinde(phi, psi)`: `phi(m_F) <= phi(m) - psi(m)` where `m = S/2` and
//!   `m_F = [d(F(x,y), F(u,v)) + d(F(y,x), F(v,u))] / 2`
//! * `BerindeCor(psi)`: `2 m_F <= S - 2 psi(m)`
//!
//! A tuple violates a condition when `lhs > rhs + 1e-12`.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::control::ControlFunction;
use crate::error::{Error, Result};
use crate::order::{compare, Metric, OrderedVector};

/// Absolute slack before `lhs > rhs` counts as a violation.
pub const VIOLATION_SLACK: f64 = 1e-12;

type PairFn = dyn Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync;

/// A map `F: X x X -> X` on vectors of a fixed dimension.
#[derive(Clone)]
pub struct CoupledMap {
    evaluator: Arc<PairFn>,
    dim: usize,
    label: String,
}

impl fmt::Debug for CoupledMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoupledMap").field("dim", &self.dim).field("label", &self.label).finish()
    }
}

impl CoupledMap {
    pub fn new(label: impl Into<String>, dim: usize, f: impl Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        Self { evaluator: Arc::new(f), dim, label: label.into() }
    }

    /// Scalar map `(x, y) -> f(x, y)` on the real line.
    pub fn scalar(label: impl Into<String>, f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(label, 1, move |x, y| vec![f(x[0], y[0])])
    }

    /// `F(x, y) = (x - 2y) / 4`.
    pub fn example1() -> Self {
        Self::scalar("example1", |x, y| (x - 2.0 * y) / 4.0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, x: &OrderedVector, y: &OrderedVector) -> Result<OrderedVector> {
        for v in [x, y] {
            if v.dim() != self.dim {
                return Err(Error::DimensionMismatch { expected: self.dim, found: v.dim() });
            }
        }
        let out = (self.evaluator)(x.as_slice(), y.as_slice());
        if out.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: out.len() });
        }
        if let Some(index) = out.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteOutput { label: self.label.clone(), index });
        }
        OrderedVector::new(out)
    }
}

#[derive(Debug, Clone)]
pub enum ConditionKind {
    Bhaskar { k: f64 },
    Luong { phi: ControlFunction, psi: ControlFunction },
    Berinde { phi: ControlFunction, psi: ControlFunction },
    BerindeCor { psi: ControlFunction },
}

impl ConditionKind {
    pub fn bhaskar(k: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&k) {
            return Err(Error::InvalidParameter(format!("Bhaskar constant k must lie in [0, 1), got {k}")));
        }
        Ok(Self::Bhaskar { k })
    }

    /// Luong with `phi = id`, `psi(t) = (1-k)/2 t`; coincides with `Bhaskar(k)`.
    pub fn luong_reducing_to_bhaskar(k: f64) -> Result<Self> {
        Self::bhaskar(k)?;
        Ok(Self::Luong { phi: ControlFunction::identity(), psi: ControlFunction::psi_linear((1.0 - k) / 2.0) })
    }

    /// `BerindeCor` with `psi(t) = (1-k)/2 t`. Whenever `Bhaskar(k)` holds at a
    /// tuple and at its swapped tuple, this one holds too.
    pub fn berinde_cor_from_bhaskar(k: f64) -> Result<Self> {
        Self::bhaskar(k)?;
        Ok(Self::BerindeCor { psi: ControlFunction::psi_linear((1.0 - k) / 2.0) })
    }

    /// `BerindeCor` with `psi(t) = (1 - k/2) t`.
    pub fn berinde_cor_scaled(k: f64) -> Result<Self> {
        Self::bhaskar(k)?;
        Ok(Self::BerindeCor { psi: ControlFunction::psi_linear(1.0 - k / 2.0) })
    }

    pub fn name(&self) -> &'static str {
        match self {
            ConditionKind::Bhaskar { .. } => "bhaskar",
            ConditionKind::Luong { .. } => "luong",
            ConditionKind::Berinde { .. } => "berinde",
            ConditionKind::BerindeCor { .. } => "berinde-cor",
        }
    }

    pub fn describe(&self) -> String {
        match self {
            ConditionKind::Bhaskar { k } => format!("bhaskar(k={k})"),
            ConditionKind::Luong { phi, psi } => format!("luong(phi={}, psi={})", phi.label(), psi.label()),
            ConditionKind::Berinde { phi, psi } => format!("berinde(phi={}, psi={})", phi.label(), psi.label()),
            ConditionKind::BerindeCor { psi } => format!("berinde-cor(psi={})", psi.label()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConditionSpec {
    pub kind: ConditionKind,
    pub metric: Metric,
}

impl ConditionSpec {
    pub fn new(kind: ConditionKind, metric: Metric) -> Self {
        Self { kind, metric }
    }
}

/// Returns `(lhs, rhs)` of the selected inequality at `(x, y, u, v)`.
/// Requires `x >= u` and `y <= v` componentwise.
pub fn evaluate_condition(
    spec: &ConditionSpec,
    f: &CoupledMap,
    x: &OrderedVector,
    y: &OrderedVector,
    u: &OrderedVector,
    v: &OrderedVector,
) -> Result<(f64, f64)> {
    if !compare(x, u)?.is_ge() || !compare(y, v)?.is_le() {
        return Err(Error::IncomparableTuple);
    }
    let d = |a: &OrderedVector, b: &OrderedVector| spec.metric.distance(a, b);
    let sum = d(x, u)? + d(y, v)?;
    let fxy = f.eval(x, y)?;
    let fuv = f.eval(u, v)?;
    let near = d(&fxy, &fuv)?;
    Ok(match &spec.kind {
        ConditionKind::Bhaskar { k } => (near, k / 2.0 * sum),
        ConditionKind::Luong { phi, psi } => (phi.eval(near), 0.5 * phi.eval(sum) - psi.eval(sum)),
        ConditionKind::Berinde { phi, psi } => {
            let far = d(&f.eval(y, x)?, &f.eval(v, u)?)?;
            let m = sum / 2.0;
            (phi.eval((near + far) / 2.0), phi.eval(m) - psi.eval(m))
        }
        ConditionKind::BerindeCor { psi } => {
            let far = d(&f.eval(y, x)?, &f.eval(v, u)?)?;
            (near + far, sum - 2.0 * psi.eval(sum / 2.0))
        }
    })
}

pub fn violates(lhs: f64, rhs: f64) -> bool {
    !(lhs <= rhs + VIOLATION_SLACK)
}

/// Which property a [`CheckReport`] is about.
#[derive(Debug, Clone)]
pub enum CheckTarget {
    Condition(ConditionSpec),
    /// Mixed monotone property: with `x >= u`, `y <= v`, expects `F(x,y) >= F(u,v)`.
    MixedMonotone,
}

impl CheckTarget {
    pub fn describe(&self) -> String {
        match self {
            CheckTarget::Condition(spec) => spec.kind.describe(),
            CheckTarget::MixedMonotone => "mixed-monotone".to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Certified,
    Falsified,
}

/// A tuple where the checked inequality fails.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub index: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub note: Option<String>,
}

impl Witness {
    fn new(index: usize, t: &Tuple, lhs: f64, rhs: f64, note: Option<String>) -> Self {
        Self {
            index,
            x: t.x.as_slice().to_vec(),
            y: t.y.as_slice().to_vec(),
            u: t.u.as_slice().to_vec(),
            v: t.v.as_slice().to_vec(),
            lhs,
            rhs,
            note,
        }
    }

    fn vectors(&self) -> Result<[OrderedVector; 4]> {
        Ok([
            OrderedVector::new(self.x.clone())?,
            OrderedVector::new(self.y.clone())?,
            OrderedVector::new(self.u.clone())?,
            OrderedVector::new(self.v.clone())?,
        ])
    }

    /// Re-evaluates the condition at the stored tuple.
    pub fn replay(&self, spec: &ConditionSpec, f: &CoupledMap) -> Result<(f64, f64)> {
        let [x, y, u, v] = self.vectors()?;
        evaluate_condition(spec, f, &x, &y, &u, &v)
    }
}

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub target: CheckTarget,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub tuples_tested: usize,
    pub seed: u64,
}

impl CheckReport {
    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::Certified
    }

    pub fn record(&self) -> WitnessRecord {
        WitnessRecord {
            condition: self.target.describe(),
            verdict: self.verdict,
            tuples_tested: self.tuples_tested,
            seed: self.seed,
            witness: self.witness.clone(),
        }
    }
}

/// Serializable form of a [`CheckReport`].
#[derive(Debug, Clone, Serialize)]
pub struct WitnessRecord {
    pub condition: String,
    pub verdict: Verdict,
    pub tuples_tested: usize,
    pub seed: u64,
    pub witness: Option<Witness>,
}

impl WitnessRecord {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// A comparable tuple: `x >= u`, `y <= v`.
#[derive(Debug, Clone)]
pub struct Tuple {
    pub x: OrderedVector,
    pub y: OrderedVector,
    pub u: OrderedVector,
    pub v: OrderedVector,
}

/// How a sampled tuple was constructed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TupleFamily {
    /// `x = u`, `y <= v`.
    FirstEqual,
    /// `y = v`, `x >= u`.
    SecondEqual,
    /// `x` slightly above `u`, `y` slightly below `v`.
    NearDiagonal,
    Uniform,
}

impl TupleFamily {
    /// 1/8 + 1/8 boundary, 1/4 near-diagonal, 1/2 uniform; index 0 is `x = u`.
    pub fn for_index(i: usize) -> Self {
        match i % 8 {
            0 => TupleFamily::FirstEqual,
            4 => TupleFamily::SecondEqual,
            2 | 6 => TupleFamily::NearDiagonal,
            _ => TupleFamily::Uniform,
        }
    }
}

/// Seeded generator of comparable tuples with coordinates in `[low, high]`.
#[derive(Debug, Clone)]
pub struct TupleSampler {
    pub low: f64,
    pub high: f64,
    /// Relative width of the near-diagonal perturbation.
    pub near_width: f64,
}

impl Default for TupleSampler {
    fn default() -> Self {
        Self::symmetric(10.0)
    }
}

impl TupleSampler {
    pub fn symmetric(radius: f64) -> Self {
        Self { low: -radius, high: radius, near_width: 1e-6 }
    }

    pub fn range(low: f64, high: f64) -> Self {
        Self { low, high, near_width: 1e-6 }
    }

    fn draw(&self, rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
        (0..dim).map(|_| rng.gen_range(self.low..=self.high)).collect()
    }

    /// Sorts two draws so that `lo <= hi` componentwise.
    fn ordered_pair(&self, rng: &mut ChaCha8Rng, dim: usize) -> (Vec<f64>, Vec<f64>) {
        let a = self.draw(rng, dim);
        let b = self.draw(rng, dim);
        a.iter().zip(&b).map(|(p, q)| (p.min(*q), p.max(*q))).unzip()
    }

    fn nudge(&self, rng: &mut ChaCha8Rng, base: &[f64], up: bool) -> Vec<f64> {
        let scale = self.near_width * (self.high - self.low);
        base.iter()
            .map(|b| {
                let e = rng.gen_range(0.0..=scale);
                let n = if up { b + e } else { b - e };
                n.clamp(self.low, self.high)
            })
            .collect()
    }

    pub fn tuple(&self, rng: &mut ChaCha8Rng, dim: usize, family: TupleFamily) -> Result<Tuple> {
        let (u, x, y, v) = match family {
            TupleFamily::FirstEqual => {
                let x = self.draw(rng, dim);
                let (y, v) = self.ordered_pair(rng, dim);
                (x.clone(), x, y, v)
            }
            TupleFamily::SecondEqual => {
                let (u, x) = self.ordered_pair(rng, dim);
                let y = self.draw(rng, dim);
                (u, x, y.clone(), y)
            }
            TupleFamily::NearDiagonal => {
                let u = self.draw(rng, dim);
                let v = self.draw(rng, dim);
                let x = self.nudge(rng, &u, true);
                let y = self.nudge(rng, &v, false);
                (u, x, y, v)
            }
            TupleFamily::Uniform => {
                let (u, x) = self.ordered_pair(rng, dim);
                let (y, v) = self.ordered_pair(rng, dim);
                (u, x, y, v)
            }
        };
        Ok(Tuple {
            x: OrderedVector::new(x)?,
            y: OrderedVector::new(y)?,
            u: OrderedVector::new(u)?,
            v: OrderedVector::new(v)?,
        })
    }

    /// The first `budget` tuples of the stream for `seed`.
    pub fn tuples(&self, dim: usize, budget: usize, seed: u64) -> impl Iterator<Item = Result<Tuple>> + '_ {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..budget).map(move |i| self.tuple(&mut rng, dim, TupleFamily::for_index(i)))
    }
}

/// Searches `budget` sampled comparable tuples for a violation of `spec`.
pub fn certify(spec: &ConditionSpec, f: &CoupledMap, budget: usize, seed: u64) -> Result<CheckReport> {
    certify_with(spec, f, budget, seed, &TupleSampler::default())
}

pub fn certify_with(
    spec: &ConditionSpec,
    f: &CoupledMap,
    budget: usize,
    seed: u64,
    sampler: &TupleSampler,
) -> Result<CheckReport> {
    if budget == 0 {
        return Err(Error::InvalidParameter("budget must be at least 1".into()));
    }
    let mut witness = None;
    let mut tested = 0;
    for (i, t) in sampler.tuples(f.dim(), budget, seed).enumerate() {
        let t = t?;
        tested += 1;
        let outcome = evaluate_condition(spec, f, &t.x, &t.y, &t.u, &t.v);
        let found = match outcome {
            Ok((lhs, rhs)) if violates(lhs, rhs) => Some(Witness::new(i, &t, lhs, rhs, None)),
            Ok(_) => None,
            Err(e @ Error::NonFiniteOutput { .. }) => {
                Some(Witness::new(i, &t, f64::INFINITY, f64::NAN, Some(e.to_string())))
            }
            Err(e) => return Err(e),
        };
        if found.is_some() {
            witness = found;
            break;
        }
    }
    Ok(CheckReport {
        target: CheckTarget::Condition(spec.clone()),
        verdict: if witness.is_some() { Verdict::Falsified } else { Verdict::Certified },
        witness,
        tuples_tested: tested,
        seed,
    })
}

/// `max_i (F(u,v)_i - F(x,y)_i)`; positive means the mixed monotone property
/// fails at the tuple.
pub fn monotone_gap(f: &CoupledMap, t: &Tuple) -> Result<f64> {
    let hi = f.eval(&t.x, &t.y)?;
    let lo = f.eval(&t.u, &t.v)?;
    Ok(lo.as_slice().iter().zip(hi.as_slice()).map(|(l, h)| l - h).fold(f64::NEG_INFINITY, f64::max))
}

/// Samples single-argument moves (`x1 <= x2` with `y` fixed, then `y1 <= y2`
/// with `x` fixed) and checks `F` rises in `x` and falls in `y`.
pub fn check_mixed_monotone(f: &CoupledMap, budget: usize, seed: u64, sampler: &TupleSampler) -> Result<CheckReport> {
    if budget == 0 {
        return Err(Error::InvalidParameter("budget must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut witness = None;
    let mut tested = 0;
    for i in 0..budget {
        let family = if i % 2 == 0 { TupleFamily::SecondEqual } else { TupleFamily::FirstEqual };
        let t = sampler.tuple(&mut rng, f.dim(), family)?;
        tested += 1;
        match monotone_gap(f, &t) {
            Ok(gap) if gap > VIOLATION_SLACK => {
                witness = Some(Witness::new(i, &t, gap, 0.0, None));
                break;
            }
            Ok(_) => {}
            Err(e @ Error::NonFiniteOutput { .. }) => {
                witness = Some(Witness::new(i, &t, f64::INFINITY, f64::NAN, Some(e.to_string())));
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(CheckReport {
        target: CheckTarget::MixedMonotone,
        verdict: if witness.is_some() { Verdict::Falsified } else { Verdict::Certified },
        witness,
        tuples_tested: tested,
        seed,
    })
}
