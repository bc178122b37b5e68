//! The practical second-order descent method.
//!
//! Each outer iteration minimizes the finite model of the objective over the
//! ball `B_ε(x)`. The inner loop ([`inner_refine`]) keeps sampling jet
//! elements at the model minimizer until either the step decreases `f`
//! sufficiently, or the predicted relative decrease is too small and the
//! radius has to shrink. Elements sampled in earlier iterations are reused
//! while they stay inside the current ball.
//!
//! The guarantees the inner loop relies on are checked at run time and
//! collected in [`RunRecord::violations`]:
//!
//! * a rejected minimizer is never a base point already in the model,
//! * after inserting its jet the model is exact there,
//! * the model's optimal value does not decrease while elements are added,
//! * every accepted step satisfies `f(z̄) ≤ f(x) - c τ ε`.

use std::fmt;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{carry_over, ModelSet};
use crate::oracle::{JetElement, Oracle, OracleCounters};
use crate::subproblem::{solve_subproblem_warm, SolveOptions, SolveStatus, SubproblemSolution};
use crate::testbed::ProblemSpec;

/// Parameters of [`run_descent`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverParams {
    /// Fraction of the predicted decrease that must be realized, in (0, 1).
    pub c: f64,
    pub eps_init: f64,
    pub tau_init: f64,
    /// Radius reduction factor, in (0, 1).
    pub kappa_eps: f64,
    /// Tolerance reduction factor, in (0, 1].
    pub kappa_tau: f64,
    pub eps_min: f64,
    pub max_outer_iters: usize,
    /// Jet elements the inner loop may add before forcing a radius reduction.
    pub max_inner_iters: usize,
    /// Bound on the elements carried over to a new iterate.
    pub w_cap: Option<usize>,
    pub seed: u64,
    /// Subproblem settings; the seed field is overwritten per solve.
    pub subproblem: SolveOptions,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            c: 0.5,
            eps_init: 10.0,
            tau_init: 1e-5,
            kappa_eps: 0.1,
            kappa_tau: 1.0,
            eps_min: 1e-5,
            max_outer_iters: 1000,
            max_inner_iters: 100,
            w_cap: None,
            seed: 0,
            subproblem: SolveOptions::default(),
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.to_string()));
        if !(self.c > 0.0 && self.c < 1.0) {
            return bad("c must lie in (0, 1)");
        }
        if !(self.eps_init > 0.0 && self.eps_init.is_finite()) {
            return bad("eps_init must be positive");
        }
        if !(self.tau_init > 0.0 && self.tau_init.is_finite()) {
            return bad("tau_init must be positive");
        }
        if !(self.kappa_eps > 0.0 && self.kappa_eps < 1.0) {
            return bad("kappa_eps must lie in (0, 1)");
        }
        if !(self.kappa_tau > 0.0 && self.kappa_tau <= 1.0) {
            return bad("kappa_tau must lie in (0, 1]");
        }
        if !(self.eps_min > 0.0) {
            return bad("eps_min must be positive");
        }
        if self.max_outer_iters == 0 || self.max_inner_iters == 0 {
            return bad("iteration limits must be positive");
        }
        if self.w_cap == Some(0) {
            return bad("w_cap must be positive");
        }
        Ok(())
    }
}

/// Why a run stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    /// The radius fell below `eps_min` after a failed decrease test.
    EpsilonConverged,
    /// The radius fell below `eps_min`, the last reduction forced by the
    /// inner-loop cap.
    InnerLoopCap,
    MaxOuterIterations,
    /// Sampling failed (non-finite oracle output); the run keeps its best
    /// point.
    SubproblemFailure,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Termination::EpsilonConverged => "EpsilonConverged",
            Termination::InnerLoopCap => "InnerLoopCap",
            Termination::MaxOuterIterations => "MaxOuterIterations",
            Termination::SubproblemFailure => "SubproblemFailure",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Termination {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "EpsilonConverged" => Ok(Termination::EpsilonConverged),
            "InnerLoopCap" => Ok(Termination::InnerLoopCap),
            "MaxOuterIterations" => Ok(Termination::MaxOuterIterations),
            "SubproblemFailure" => Ok(Termination::SubproblemFailure),
            other => Err(Error::InvalidParameter(format!("unknown termination `{other}`"))),
        }
    }
}

/// One line of the run trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub i: usize,
    pub x: Vec<f64>,
    pub f: f64,
    pub eps: f64,
    pub tau: f64,
    pub w_size: usize,
    pub inner_iters: usize,
    pub n_f: u64,
    pub n_grad: u64,
    pub n_hess: u64,
}

/// A violated run-time guarantee.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Violation {
    /// A rejected minimizer coincides with a base point of the model.
    MinimizerInModel { outer: usize, distance: f64 },
    /// After inserting the jet at `z̄`, the model value there differs from `f(z̄)`.
    InsertedJetInexact { outer: usize, error: f64 },
    /// The model's optimal value dropped after an insertion.
    ThetaDecreased { outer: usize, previous: f64, current: f64 },
    /// An accepted step missed `f(z̄) ≤ f(x) - c τ ε`.
    InsufficientDecrease { outer: usize, f_new: f64, bound: f64 },
}

/// Trace and result of one run.
#[derive(Clone, Debug)]
pub struct RunRecord {
    /// One entry per inner-loop call (accepted step or radius reduction).
    pub iterates: Vec<IterationRecord>,
    pub termination: Termination,
    pub final_x: DVector<f64>,
    pub final_f: f64,
    pub counters: OracleCounters,
    pub accepted_steps: usize,
    pub violations: Vec<Violation>,
    /// Subproblem solves that fell back to the center.
    pub degenerate_solves: usize,
}

impl RunRecord {
    /// Serializes the trace as a JSON array.
    pub fn trace_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.iterates)?)
    }
}

/// Result of one call of [`inner_refine`].
#[derive(Clone, Debug)]
pub enum InnerOutcome {
    /// `z̄` passed the sufficient-decrease test; `jet` is the element at `z̄`.
    Accepted {
        z_bar: DVector<f64>,
        theta: f64,
        jet: JetElement,
        model: ModelSet,
        additions: usize,
    },
    /// The predicted relative decrease is above `-τ`.
    ReduceEpsilon { theta: f64, model: ModelSet, additions: usize },
    /// `max_inner_iters` elements were added without a decision.
    CapHit { model: ModelSet, additions: usize },
}

impl InnerOutcome {
    pub fn model(&self) -> &ModelSet {
        match self {
            InnerOutcome::Accepted { model, .. }
            | InnerOutcome::ReduceEpsilon { model, .. }
            | InnerOutcome::CapHit { model, .. } => model,
        }
    }

    pub fn additions(&self) -> usize {
        match self {
            InnerOutcome::Accepted { additions, .. }
            | InnerOutcome::ReduceEpsilon { additions, .. }
            | InnerOutcome::CapHit { additions, .. } => *additions,
        }
    }
}

/// `(θ - f(x)) / ε`, the model's predicted decrease relative to the radius.
pub fn relative_decrease(theta: f64, fx: f64, eps: f64) -> f64 {
    (theta - fx) / eps
}

/// Mutable per-run state threaded through the inner loop.
pub struct RunContext {
    rng: ChaCha8Rng,
    pub violations: Vec<Violation>,
    pub degenerate_solves: usize,
    outer: usize,
}

impl RunContext {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed), violations: Vec::new(), degenerate_solves: 0, outer: 0 }
    }

    /// Solves the subproblem warm-started from `pool`, then refreshes the
    /// pool with the best distinct points among the new end points and the
    /// old pool, ranked by the current model.
    fn solve(&mut self, w: &ModelSet, fx: f64, opts: &SolveOptions, pool: &mut Vec<DVector<f64>>) -> SubproblemSolution {
        let opts = SolveOptions { seed: self.rng.random(), ..opts.clone() };
        match solve_subproblem_warm(w, &opts, pool) {
            Ok((sol, mut candidates)) => {
                candidates.append(pool);
                let mut ranked: Vec<(f64, DVector<f64>)> = candidates
                    .into_iter()
                    .filter_map(|z| w.eval(&z).ok().map(|(v, _)| (v, z)))
                    .collect();
                ranked.sort_by(|a, b| a.0.total_cmp(&b.0));
                let min_gap = 1e-8 * w.radius();
                for (_, z) in ranked {
                    if pool.len() == POOL_SIZE {
                        break;
                    }
                    if pool.iter().all(|p| (p - &z).norm() > min_gap) {
                        pool.push(z);
                    }
                }
                sol
            }
            Err(_) => {
                self.degenerate_solves += 1;
                SubproblemSolution::degenerate(w.center(), fx)
            }
        }
    }
}

/// Local minimizers kept between the solves of one inner loop. Nested models
/// share most of their minimizers, so reusing them keeps the sequence of
/// optimal values consistent.
const POOL_SIZE: usize = 20;

/// Refines the model around `w.center()` until a step is accepted, the
/// radius must shrink, or the insertion cap is reached.
///
/// `w` must contain the jet element at its center and `fx` must be the
/// objective value there.
pub fn inner_refine(
    mut w: ModelSet,
    fx: f64,
    tau: f64,
    oracle: &mut Oracle<'_>,
    params: &SolverParams,
    ctx: &mut RunContext,
) -> Result<InnerOutcome> {
    if w.is_empty() {
        return Err(Error::EmptyModel);
    }
    let eps = w.radius();
    let c = params.c;
    let mut additions = 0;
    let mut previous_theta: Option<f64> = None;
    let mut pool = Vec::new();

    loop {
        let sol = ctx.solve(&w, fx, &params.subproblem, &mut pool);
        let theta = sol.theta;
        if let Some(prev) = previous_theta {
            if theta < prev - 1e-6 {
                ctx.violations.push(Violation::ThetaDecreased { outer: ctx.outer, previous: prev, current: theta });
            }
        }

        if sol.status == SolveStatus::Degenerate || relative_decrease(theta, fx, eps) > -tau {
            return Ok(InnerOutcome::ReduceEpsilon { theta, model: w, additions });
        }

        let jet = oracle.evaluate_jet(&sol.z_bar)?;
        if jet.fy() <= fx + c * (theta - fx) {
            return Ok(InnerOutcome::Accepted { z_bar: sol.z_bar, theta, jet, model: w, additions });
        }

        let distance = w
            .elements()
            .iter()
            .map(|e| (e.y() - &sol.z_bar).norm())
            .fold(f64::INFINITY, f64::min);
        if distance <= 1e-12 {
            ctx.violations.push(Violation::MinimizerInModel { outer: ctx.outer, distance });
        }

        let f_new = jet.fy();
        w.push(jet);
        additions += 1;
        let (model_value, _) = w.eval(&sol.z_bar)?;
        let error = (model_value - f_new).abs();
        if error > 1e-10 {
            ctx.violations.push(Violation::InsertedJetInexact { outer: ctx.outer, error });
        }
        previous_theta = Some(theta);

        if additions >= params.max_inner_iters {
            return Ok(InnerOutcome::CapHit { model: w, additions });
        }
    }
}

/// Runs the descent method from `x0`.
///
/// Oracle failures during the run end it with
/// [`Termination::SubproblemFailure`]; invalid parameters or a failing start
/// point are returned as errors.
pub fn run_descent(problem: &ProblemSpec, x0: &DVector<f64>, params: &SolverParams) -> Result<RunRecord> {
    params.validate()?;
    if x0.len() != problem.n() {
        return Err(Error::DimensionMismatch { expected: problem.n(), got: x0.len() });
    }
    let mut oracle = Oracle::new(problem);
    let mut ctx = RunContext::new(params.seed);

    let jet0 = oracle.evaluate_jet(x0)?;
    let mut x = x0.clone();
    let mut fx = jet0.fy();
    let mut eps = params.eps_init;
    let mut tau = params.tau_init;
    let mut w = carry_over(&ModelSet::empty(x.clone(), eps), &x, eps, jet0, params.w_cap);

    let mut iterates = Vec::new();
    let mut accepted = 0usize;
    let mut last_reduction_capped = false;

    let termination = loop {
        if eps < params.eps_min {
            break if last_reduction_capped { Termination::InnerLoopCap } else { Termination::EpsilonConverged };
        }
        if accepted > params.max_outer_iters {
            break Termination::MaxOuterIterations;
        }
        ctx.outer = accepted;

        let outcome = match inner_refine(w, fx, tau, &mut oracle, params, &mut ctx) {
            Ok(o) => o,
            Err(_) => break Termination::SubproblemFailure,
        };
        let counters = oracle.counters();
        iterates.push(IterationRecord {
            i: accepted,
            x: x.iter().copied().collect(),
            f: fx,
            eps,
            tau,
            w_size: outcome.model().len(),
            inner_iters: outcome.additions(),
            n_f: counters.n_f,
            n_grad: counters.n_grad,
            n_hess: counters.n_hess,
        });

        match outcome {
            InnerOutcome::Accepted { z_bar, jet, model, .. } => {
                let bound = fx - params.c * tau * eps;
                if jet.fy() > bound + 1e-14 * fx.abs().max(1.0) {
                    ctx.violations.push(Violation::InsufficientDecrease {
                        outer: accepted,
                        f_new: jet.fy(),
                        bound,
                    });
                }
                fx = jet.fy();
                x = z_bar;
                w = carry_over(&model, &x, eps, jet, params.w_cap);
                accepted += 1;
                last_reduction_capped = false;
            }
            InnerOutcome::ReduceEpsilon { mut model, .. } => {
                eps *= params.kappa_eps;
                tau *= params.kappa_tau;
                model.refilter(x.clone(), eps);
                w = model;
                last_reduction_capped = false;
            }
            InnerOutcome::CapHit { mut model, .. } => {
                eps *= params.kappa_eps;
                tau *= params.kappa_tau;
                model.refilter(x.clone(), eps);
                w = model;
                last_reduction_capped = true;
            }
        }
    };

    Ok(RunRecord {
        iterates,
        termination,
        final_x: x,
        final_f: fx,
        counters: oracle.counters(),
        accepted_steps: accepted,
        violations: ctx.violations,
        degenerate_solves: ctx.degenerate_solves,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::Objective;
    use crate::testbed::get_problem;
    use nalgebra::{dvector, DMatrix};
    use std::sync::Arc;

    struct Square;

    impl Objective for Square {
        fn value(&self, x: &DVector<f64>) -> f64 {
            x[0] * x[0]
        }
        fn second_order(&self, x: &DVector<f64>) -> (f64, DVector<f64>, DMatrix<f64>) {
            (x[0] * x[0], dvector![2.0 * x[0]], DMatrix::from_element(1, 1, 2.0))
        }
        fn branch_margin(&self, _: &DVector<f64>) -> f64 {
            f64::INFINITY
        }
    }

    fn start_model(oracle: &mut Oracle<'_>, x: f64, eps: f64) -> (ModelSet, f64) {
        let jet = oracle.evaluate_jet(&dvector![x]).unwrap();
        let fx = jet.fy();
        (ModelSet::new(dvector![x], eps, vec![jet]).unwrap(), fx)
    }

    #[test]
    fn relative_decrease_examples() {
        assert_eq!(relative_decrease(-1.0, 0.0, 0.5), -2.0);
        assert_eq!(relative_decrease(0.0, 0.0, 1.0), 0.0);
        assert!((relative_decrease(-0.099, 0.5477, 0.5) + 1.2934).abs() < 1e-3);
    }

    #[test]
    fn jet_example_first_minimizer_is_rejected() {
        let p = get_problem("paper_ex_4_7", 1).unwrap();
        let mut oracle = Oracle::new(&p);
        let (w, fx) = start_model(&mut oracle, -0.2, 0.5);
        let params = SolverParams { max_inner_iters: 1, ..SolverParams::default() };
        let mut ctx = RunContext::new(0);
        let out = inner_refine(w, fx, 1e-5, &mut oracle, &params, &mut ctx).unwrap();
        // the first model minimizer 0.3 fails the decrease test and gets sampled
        let InnerOutcome::CapHit { model, additions } = out else { panic!("{out:?}") };
        assert_eq!(additions, 1);
        assert_eq!(model.len(), 2);
        assert!((model.elements()[1].y()[0] - 0.3).abs() < 1e-3);
        assert!((model.elements()[1].fy() - 0.4f64.sqrt()).abs() < 1e-3);
        assert!(ctx.violations.is_empty());
    }

    #[test]
    fn exact_model_is_accepted_immediately() {
        let p = ProblemSpec::new("square", dvector![1.0], Some(0.0), true, Arc::new(Square));
        let mut oracle = Oracle::new(&p);
        let (w, fx) = start_model(&mut oracle, 1.0, 0.5);
        let mut ctx = RunContext::new(0);
        let out = inner_refine(w, fx, 1e-5, &mut oracle, &SolverParams::default(), &mut ctx).unwrap();
        let InnerOutcome::Accepted { z_bar, theta, additions, .. } = out else { panic!("{out:?}") };
        assert_eq!(additions, 0);
        assert!((z_bar[0] - 0.5).abs() < 1e-6);
        assert!((theta - 0.25).abs() < 1e-8);
    }

    #[test]
    fn kink_minimizer_forces_reduction() {
        let p = get_problem("absval", 1).unwrap();
        let mut oracle = Oracle::new(&p);
        let (w, fx) = start_model(&mut oracle, 0.0, 0.5);
        let mut ctx = RunContext::new(0);
        let out = inner_refine(w, fx, 1e-5, &mut oracle, &SolverParams::default(), &mut ctx).unwrap();
        assert!(
            matches!(out, InnerOutcome::ReduceEpsilon { .. } | InnerOutcome::CapHit { .. }),
            "{out:?}"
        );
        assert!(ctx.violations.is_empty());
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        let p = get_problem("absval", 2).unwrap();
        for params in [
            SolverParams { c: 1.0, ..SolverParams::default() },
            SolverParams { kappa_eps: 1.0, ..SolverParams::default() },
            SolverParams { kappa_tau: 0.0, ..SolverParams::default() },
            SolverParams { eps_init: -1.0, ..SolverParams::default() },
            SolverParams { w_cap: Some(0), ..SolverParams::default() },
        ] {
            assert!(run_descent(&p, p.x0(), &params).is_err());
        }
        assert!(run_descent(&p, &dvector![1.0], &SolverParams::default()).is_err());
    }

    #[test]
    fn termination_round_trips_through_strings() {
        for t in [
            Termination::EpsilonConverged,
            Termination::InnerLoopCap,
            Termination::MaxOuterIterations,
            Termination::SubproblemFailure,
        ] {
            assert_eq!(t.to_string().parse::<Termination>().unwrap(), t);
        }
    }
}
