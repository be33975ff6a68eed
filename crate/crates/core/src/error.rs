use thiserror::Error;

use crate::fredholm::AssumptionReport;
use crate::solver::IterationTrace;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vector must have at least one entry")]
    EmptyVector,

    #[error("non-finite entry {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("metric {metric} requires dimension 1, found {found}")]
    MetricDimension { metric: &'static str, found: usize },

    #[error("tuple is not comparable: need x >= u and y <= v componentwise")]
    IncomparableTuple,

    #[error("map `{label}` produced a non-finite value at output index {index}")]
    NonFiniteOutput { label: String, index: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown built-in `{0}`")]
    UnknownBuiltin(String),

    #[error("initial pair satisfies neither start hypothesis (x0 <= F(x0,y0), y0 >= F(y0,x0) or the reverse)")]
    InitialConditionUnsatisfied,

    #[error("iteration diverged: step {delta:e} exceeds 1e12 at iteration {iteration}")]
    Diverged { iteration: usize, delta: f64 },

    #[error("iteration did not converge ({:?} after {} steps)", trace.stop_reason, trace.deltas.len())]
    NotConverged { trace: Box<IterationTrace> },

    #[error("non-finite {what} at node (t={t}, s={s})")]
    NonFiniteNode { what: &'static str, t: f64, s: f64 },

    #[error("integral equation hypotheses not met: {}", report.summary())]
    AssumptionsUnmet { report: Box<AssumptionReport> },

    #[error("(alpha, beta) is not a coupled lower-upper solution ({count} node violations)")]
    NotLowerUpper { count: usize },

    #[error("alpha <= beta but the computed coupled fixed point is not diagonal (gap {gap:e})")]
    NotDiagonal { gap: f64 },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
