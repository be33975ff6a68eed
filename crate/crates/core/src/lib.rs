//! Coupled fixed points of mixed monotone maps on partially ordered spaces.
//!
//! A map `F: X × X -> X` is mixed monotone when it is non-decreasing in its
//! first argument and non-increasing in its second. A coupled fixed point is
//! a pair with `F(x, y) = x` and `F(y, x) = y`.
//!
//! The crate
//!
//! * checks whether functions belong to the control classes used by the
//!   contractive conditions ([`control`]),
//! * certifies or falsifies a contractive condition on sampled comparable
//!   tuples, returning a replayable witness ([`contraction`]),
//! * runs the Picard scheme on pairs and monitors its invariants ([`solver`]),
//! * solves nonlinear Fredholm integral equations with split kernels after
//!   checking their hypotheses ([`fredholm`]).
//!
//! ```
//! use coupled_fixpoint::{solve, CoupledMap, OrderedVector, SolverConfig};
//!
//! let f = CoupledMap::example1(); // F(x, y) = (x - 2y) / 4
//! let x0 = OrderedVector::scalar(-2.0).unwrap();
//! let y0 = OrderedVector::scalar(3.0).unwrap();
//! let (fp, trace) = solve(&f, &x0, &y0, &SolverConfig::default()).unwrap();
//! assert!(fp.point.first[0].abs() < 1e-9 && fp.point.second[0].abs() < 1e-9);
//! assert!(trace.monotone_chain_ok);
//! ```

// `!(a <= b)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod contraction;
pub mod control;
pub mod error;
pub mod fredholm;
pub mod order;
pub mod solver;

pub use contraction::{
    certify, certify_with, check_mixed_monotone, evaluate_condition, CheckReport, ConditionKind, ConditionSpec, CoupledMap,
    TupleSampler, Verdict, Witness,
};
pub use control::{
    psi_from_theta, theta_from_psi, validate, validate_phi, validate_psi, validate_theta, ClassReport, ControlFunction,
    FunctionClass, SampleGrid, ValidationSettings,
};
pub use error::{Error, Result};
pub use fredholm::{
    check_assumptions, solve_integral_equation, solve_integral_equation_with, verify_lower_upper, AssumptionReport,
    AssumptionSampler, Discretization, FredholmProblem, FredholmSolution, LowerUpperPair,
};
pub use order::{bounds_pair, compare, d2, distance, product_compare, Comparison, Metric, OrderedVector, PairPoint};
pub use solver::{
    apply_t, classify_initial, diagonal_check, solve, uniqueness_from_starts, uniqueness_probe, CoupledFixedPoint,
    InitialCondition, IterationTrace, SolverConfig, UniquenessVerdict,
};
