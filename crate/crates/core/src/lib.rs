//! Explicit third-order quadratic-Taylor integration of autonomous scalar
//! ODEs `y' = f(y)`, with blow-up guards, classical baselines and a
//! global-error benchmark harness.
//!
//! Each step fits the quadratic Taylor model of `f` about the current state
//! and advances by the exact solution of that Riccati equation. The model's
//! own blow-up time bounds the admissible step.

// `!(x < y)` comparisons deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod driver;
pub mod field;
pub mod jet;
pub mod problems;
pub mod riccati;
pub mod special;
pub mod steppers;

pub use bench::{run_benchmark, BenchReport, Cell, ErrorTable, Execution, Format, RunSpec};
pub use driver::{
    apriori_h0, integrate, AprioriEstimate, GuardMode, IntegratorConfig, Termination, Trajectory,
};
pub use field::{Derivatives, FnField, ScalarField};
pub use jet::Jet2;
pub use problems::{builtin_problems, find_problem, Problem};
pub use riccati::{qt3_step, Branch, QuadraticModel, UndefinedReason};
pub use steppers::Method;
