//! Componentwise-ordered real vectors, the product order on pairs, and the
//! metrics used by the solvers.
//!
//! Every vector is finite: NaN and infinities are rejected when an
//! [`OrderedVector`] is built, so comparisons never see them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Element of the ambient poset: a finite real vector with componentwise order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderedVector(Vec<f64>);

impl OrderedVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyVector);
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self(values))
    }

    pub fn scalar(value: f64) -> Result<Self> {
        Self::new(vec![value])
    }

    pub fn constant(dim: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Componentwise maximum.
    pub fn max(&self, other: &Self) -> Result<Self> {
        check_dims(self, other)?;
        Ok(Self(self.0.iter().zip(&other.0).map(|(a, b)| a.max(*b)).collect()))
    }

    /// Componentwise minimum.
    pub fn min(&self, other: &Self) -> Result<Self> {
        check_dims(self, other)?;
        Ok(Self(self.0.iter().zip(&other.0).map(|(a, b)| a.min(*b)).collect()))
    }
}

impl TryFrom<Vec<f64>> for OrderedVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl std::ops::Index<usize> for OrderedVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

pub(crate) fn check_dims(a: &OrderedVector, b: &OrderedVector) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    Ok(())
}

/// Outcome of comparing two elements of a partially ordered set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparison {
    LessOrEqual,
    GreaterOrEqual,
    Equal,
    Incomparable,
}

impl Comparison {
    pub fn is_le(self) -> bool {
        matches!(self, Comparison::LessOrEqual | Comparison::Equal)
    }

    pub fn is_ge(self) -> bool {
        matches!(self, Comparison::GreaterOrEqual | Comparison::Equal)
    }

    pub fn is_comparable(self) -> bool {
        self != Comparison::Incomparable
    }

    pub fn reverse(self) -> Self {
        match self {
            Comparison::LessOrEqual => Comparison::GreaterOrEqual,
            Comparison::GreaterOrEqual => Comparison::LessOrEqual,
            other => other,
        }
    }

    fn from_flags(le: bool, ge: bool) -> Self {
        match (le, ge) {
            (true, true) => Comparison::Equal,
            (true, false) => Comparison::LessOrEqual,
            (false, true) => Comparison::GreaterOrEqual,
            (false, false) => Comparison::Incomparable,
        }
    }
}

/// Componentwise comparison of `a` against `b` with exact floating-point `<=`.
pub fn compare(a: &OrderedVector, b: &OrderedVector) -> Result<Comparison> {
    compare_with_slack(a, b, 0.0)
}

/// Componentwise comparison where entries within `slack` of each other are
/// treated as equal. `slack = 0` is the strict order.
pub fn compare_with_slack(a: &OrderedVector, b: &OrderedVector, slack: f64) -> Result<Comparison> {
    check_dims(a, b)?;
    let mut le = true;
    let mut ge = true;
    for (x, y) in a.0.iter().zip(&b.0) {
        le &= *x <= *y + slack;
        ge &= *x + slack >= *y;
    }
    Ok(Comparison::from_flags(le, ge))
}

/// A point of the product space `X x X`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairPoint {
    pub first: OrderedVector,
    pub second: OrderedVector,
}

impl PairPoint {
    pub fn new(first: OrderedVector, second: OrderedVector) -> Result<Self> {
        check_dims(&first, &second)?;
        Ok(Self { first, second })
    }

    pub fn scalars(first: f64, second: f64) -> Result<Self> {
        Self::new(OrderedVector::scalar(first)?, OrderedVector::scalar(second)?)
    }

    pub fn dim(&self) -> usize {
        self.first.dim()
    }

    pub fn swapped(&self) -> Self {
        Self { first: self.second.clone(), second: self.first.clone() }
    }
}

fn check_pair_dims(a: &PairPoint, b: &PairPoint) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    Ok(())
}

/// Compares `a` against `b` in the product order, where
/// `(u, v) <= (x, y)` iff `u <= x` and `v >= y`.
///
/// The result reads "a is ... b": `LessOrEqual` means `a <= b`.
pub fn product_compare(a: &PairPoint, b: &PairPoint) -> Result<Comparison> {
    product_compare_with_slack(a, b, 0.0)
}

pub fn product_compare_with_slack(a: &PairPoint, b: &PairPoint, slack: f64) -> Result<Comparison> {
    check_pair_dims(a, b)?;
    let c1 = compare_with_slack(&a.first, &b.first, slack)?;
    // second slot is ordered the other way round
    let c2 = compare_with_slack(&a.second, &b.second, slack)?.reverse();
    Ok(Comparison::from_flags(c1.is_le() && c2.is_le(), c1.is_ge() && c2.is_ge()))
}

/// Returns `(max{Y.first, V.first}, min{Y.second, V.second})`, an element that
/// dominates both `y` and `v` in the product order.
pub fn bounds_pair(y: &PairPoint, v: &PairPoint) -> Result<PairPoint> {
    check_pair_dims(y, v)?;
    Ok(PairPoint { first: y.first.max(&v.first)?, second: y.second.min(&v.second)? })
}

/// Metric on the ambient space.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    /// `max_i |a_i - b_i|`; the grid version of the sup metric on C(I).
    #[default]
    SupNorm,
    Euclidean,
    /// `|a - b|` on one-dimensional vectors.
    AbsoluteScalar,
}

impl Metric {
    pub fn distance(self, a: &OrderedVector, b: &OrderedVector) -> Result<f64> {
        check_dims(a, b)?;
        let diffs = a.0.iter().zip(&b.0).map(|(x, y)| (x - y).abs());
        Ok(match self {
            Metric::SupNorm => diffs.fold(0.0, f64::max),
            Metric::Euclidean => diffs.map(|d| d * d).sum::<f64>().sqrt(),
            Metric::AbsoluteScalar => {
                if a.dim() != 1 {
                    return Err(Error::MetricDimension { metric: "absolute-scalar", found: a.dim() });
                }
                (a.0[0] - b.0[0]).abs()
            }
        })
    }

    /// `d2(Y, V) = (d(x, u) + d(y, v)) / 2`, the metric on pairs.
    pub fn d2(self, y: &PairPoint, v: &PairPoint) -> Result<f64> {
        check_pair_dims(y, v)?;
        Ok(0.5 * (self.distance(&y.first, &v.first)? + self.distance(&y.second, &v.second)?))
    }
}

pub fn distance(metric: Metric, a: &OrderedVector, b: &OrderedVector) -> Result<f64> {
    metric.distance(a, b)
}

pub fn d2(metric: Metric, y: &PairPoint, v: &PairPoint) -> Result<f64> {
    metric.d2(y, v)
}
