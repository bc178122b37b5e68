//! Nonsmooth, nonconvex minimization with sampled second-order information.
//!
//! The descent method in [`solver`] models the objective around the current
//! iterate as the maximum of second-order Taylor expansions taken at sampled
//! points of a ball, minimizes that model over the ball ([`subproblem`]) and
//! refines the sample set until the step gives sufficient decrease. A
//! first-order gradient-sampling method ([`baseline`]), a library of scalable
//! test problems ([`testbed`]) and a benchmark harness ([`bench`]) complete
//! the toolkit.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baseline;
pub mod bench;
pub mod error;
pub mod model;
pub mod oracle;
pub mod solver;
pub mod subproblem;
pub mod testbed;

pub use baseline::{min_norm_element, run_gs, GradientBundle, GsParams};
pub use bench::{
    performance_profile, run_benchmark, BenchConfig, BenchReport, BenchResult, Method, ProfilePoint,
};
pub use error::{Error, Result};
pub use model::{carry_over, eval_model, ModelSet};
pub use oracle::{check_derivatives, DerivativeReport, JetElement, Objective, Oracle, OracleCounters};
pub use solver::{
    inner_refine, relative_decrease, run_descent, InnerOutcome, IterationRecord, RunContext, RunRecord, SolverParams,
    Termination, Violation,
};
pub use subproblem::{brute_force_min, solve_subproblem, solve_subproblem_warm, SolveOptions, SolveStatus, SubproblemSolution};
pub use testbed::{get_problem, ProblemSpec};
