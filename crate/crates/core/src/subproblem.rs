//! Minimization of the finite model over its ball.
//!
//! The problem `min_{‖z-x‖ ≤ ε} max_j q_j(z)` is solved in epigraph form
//!
//! ```text
//!     min β   s.t.   q_j(z) - β ≤ 0   for every element j,
//!                    ½(‖z - x‖²/ε² - 1) ≤ 0,
//! ```
//!
//! a linear objective with quadratic, possibly nonconvex constraints. The
//! local solver is a feasible primal-dual interior-point method: any `z`
//! strictly inside the ball paired with `β > max_j q_j(z)` is strictly
//! feasible, so iterates never leave the interior and no phase-one is
//! needed. Newton systems use the exact constraint Hessians, with a
//! diagonal shift whenever the condensed matrix is not positive definite.
//! A handful of random starts guards against poor local minima.

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelSet;

/// Options of [`solve_subproblem`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveOptions {
    /// Random starts in addition to the center.
    pub n_restarts: usize,
    /// Consecutive infeasible terminations tolerated before giving up.
    pub max_infeasible_restarts: usize,
    pub kkt_tol: f64,
    pub feas_tol: f64,
    /// Newton iterations per start.
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            n_restarts: 5,
            max_infeasible_restarts: 10,
            kkt_tol: 1e-8,
            feas_tol: 1e-8,
            max_iters: 500,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Optimal,
    MaxIterations,
    Degenerate,
}

/// Minimizer estimate `z̄` and optimal value estimate `θ` of the model over
/// its ball.
#[derive(Clone, Debug)]
pub struct SubproblemSolution {
    pub z_bar: DVector<f64>,
    /// Model value at `z_bar`, recomputed from the model.
    pub theta: f64,
    pub status: SolveStatus,
    pub restarts_used: usize,
    pub kkt_residual: f64,
}

impl SubproblemSolution {
    /// Fallback when the solver fails: stay at the center with `θ = f(x)`,
    /// which forces a radius reduction in the descent method.
    pub fn degenerate(center: &DVector<f64>, fx: f64) -> Self {
        Self {
            z_bar: center.clone(),
            theta: fx,
            status: SolveStatus::Degenerate,
            restarts_used: 0,
            kkt_residual: f64::INFINITY,
        }
    }
}

/// Approximately minimizes the model of `w` over its ball.
///
/// Starts from the center and from `opts.n_restarts` uniform points in the
/// ball; the best feasible end point wins (lowest `θ`, then the
/// lexicographically smallest `z`). A start that ends infeasible is replaced
/// by a fresh random start.
pub fn solve_subproblem(w: &ModelSet, opts: &SolveOptions) -> Result<SubproblemSolution> {
    solve_subproblem_warm(w, opts, &[]).map(|(sol, _)| sol)
}

/// Like [`solve_subproblem`], with additional starting points `warm` (in
/// original coordinates, pulled strictly inside the ball when needed).
///
/// Also returns the feasible end points of all starts, best first, so that
/// callers solving a sequence of nested models can feed them back in.
pub fn solve_subproblem_warm(
    w: &ModelSet,
    opts: &SolveOptions,
    warm: &[DVector<f64>],
) -> Result<(SubproblemSolution, Vec<DVector<f64>>)> {
    if w.is_empty() {
        return Err(Error::EmptyModel);
    }
    let x = w.center();
    let n = w.dim();
    let (theta_center, _) = w.eval(x)?;

    let Some(qcqp) = ScaledQcqp::new(w, theta_center) else {
        // the model is flat to working precision on the whole ball
        let sol = SubproblemSolution {
            z_bar: x.clone(),
            theta: theta_center,
            status: SolveStatus::Optimal,
            restarts_used: 0,
            kkt_residual: 0.0,
        };
        return Ok((sol, vec![x.clone()]));
    };

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut starts: Vec<DVector<f64>> = vec![DVector::zeros(n)];
    starts.extend((0..opts.n_restarts).map(|_| uniform_in_unit_ball(&mut rng, n)));
    let eps = w.radius();
    starts.extend(warm.iter().filter(|z| z.len() == n).map(|z| {
        let u = (z - x) / eps;
        let len = u.norm();
        if len > WARM_START_RADIUS {
            u * (WARM_START_RADIUS / len)
        } else {
            u
        }
    }));

    let mut best: Option<SubproblemSolution> = None;
    let mut ends: Vec<(f64, DVector<f64>)> = Vec::new();
    let mut restarts_used = 0;
    let mut consecutive_failures = 0;
    let mut queue = starts.into_iter();
    let mut pending: Option<DVector<f64>> = queue.next();

    while let Some(u0) = pending.take() {
        let end = qcqp.solve_from(&u0, opts);
        match end.and_then(|e| finalize(w, &e, opts.feas_tol)) {
            Some((z, theta, kkt, converged)) => {
                consecutive_failures = 0;
                let status = if converged && kkt <= opts.kkt_tol {
                    SolveStatus::Optimal
                } else {
                    SolveStatus::MaxIterations
                };
                let candidate = SubproblemSolution {
                    z_bar: z,
                    theta,
                    status,
                    restarts_used: 0,
                    kkt_residual: kkt,
                };
                ends.push((candidate.theta, candidate.z_bar.clone()));
                if best.as_ref().is_none_or(|b| better(&candidate, b)) {
                    best = Some(candidate);
                }
                pending = queue.next();
            }
            None => {
                consecutive_failures += 1;
                if consecutive_failures > opts.max_infeasible_restarts {
                    break;
                }
                restarts_used += 1;
                pending = Some(uniform_in_unit_ball(&mut rng, n));
            }
        }
    }

    match best {
        Some(mut sol) => {
            sol.restarts_used = restarts_used;
            ends.sort_by(|a, b| a.0.total_cmp(&b.0));
            Ok((sol, ends.into_iter().map(|(_, z)| z).collect()))
        }
        None => Err(Error::AllRestartsInfeasible),
    }
}

fn better(a: &SubproblemSolution, b: &SubproblemSolution) -> bool {
    match a.theta.total_cmp(&b.theta) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => {
            for (p, q) in a.z_bar.iter().zip(b.z_bar.iter()) {
                match p.total_cmp(q) {
                    std::cmp::Ordering::Less => return true,
                    std::cmp::Ordering::Greater => return false,
                    std::cmp::Ordering::Equal => {}
                }
            }
            false
        }
    }
}

/// Maps a scaled end point back, projects rounding excursions onto the ball
/// and recomputes `θ` from the model.
fn finalize(
    w: &ModelSet,
    end: &StartOutcome,
    feas_tol: f64,
) -> Option<(DVector<f64>, f64, f64, bool)> {
    let x = w.center();
    let eps = w.radius();
    let mut step = &end.u * eps;
    if !step.iter().all(|v| v.is_finite()) {
        return None;
    }
    let len = step.norm();
    if len > eps + feas_tol {
        return None;
    }
    if len > eps {
        step *= eps / len;
    }
    let z = x + step;
    let (theta, _) = w.eval(&z).ok()?;
    theta.is_finite().then_some((z, theta, end.kkt, end.converged))
}

/// Uniform sample from the open unit ball.
pub(crate) fn uniform_in_unit_ball(rng: &mut impl Rng, n: usize) -> DVector<f64> {
    loop {
        let dir = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = dir.norm();
        if norm == 0.0 {
            continue;
        }
        let r: f64 = rng.random::<f64>().powf(1.0 / n as f64);
        if r < 1.0 {
            return dir * (r / norm);
        }
    }
}

/// One quadratic piece `a + bᵀu + ½ uᵀCu` in scaled coordinates.
struct Piece {
    a: f64,
    b: DVector<f64>,
    c: Option<DMatrix<f64>>,
}

impl Piece {
    fn value_gradient(&self, u: &DVector<f64>) -> (f64, DVector<f64>) {
        match &self.c {
            Some(c) => {
                let cu = c * u;
                (self.a + self.b.dot(u) + 0.5 * u.dot(&cu), &self.b + cu)
            }
            None => (self.a + self.b.dot(u), self.b.clone()),
        }
    }
}

/// The model in coordinates `u = (z - x)/ε` with values shifted by the model
/// value at the center and divided by the variation scale of the pieces over
/// the ball, so the feasible set is the unit ball and all data are O(1).
struct ScaledQcqp {
    n: usize,
    pieces: Vec<Piece>,
}

struct StartOutcome {
    u: DVector<f64>,
    kkt: f64,
    converged: bool,
}

/// Slacks and gradients at a strictly feasible point.
struct Point {
    u: DVector<f64>,
    beta: f64,
    /// `s_j = β - piece_j(u)` for pieces, then `½(1 - ‖u‖²)` for the ball.
    slack: Vec<f64>,
    /// u-gradients of the pieces.
    grads: Vec<DVector<f64>>,
}

const MU_INIT: f64 = 1e-2;
const BETA_MARGIN: f64 = 0.1;
const MU_SAFEGUARD: f64 = 1e10;
const INTERNAL_TOL_FACTOR: f64 = 1e-3;
const WARM_START_RADIUS: f64 = 1.0 - 1e-6;

impl ScaledQcqp {
    fn new(w: &ModelSet, theta_center: f64) -> Option<Self> {
        let x = w.center();
        let eps = w.radius();
        let n = w.dim();
        let mut raw = Vec::with_capacity(w.len());
        let mut scale: f64 = 0.0;
        for e in w.elements() {
            let q = e.expand(x);
            let g = e.expand_gradient(x) * eps;
            let h = e.hessian() * (eps * eps);
            scale = scale.max(g.norm() + 0.5 * h.norm());
            raw.push((q - theta_center, g, h));
        }
        if !(scale > 1e-14 * (1.0 + theta_center.abs())) || !scale.is_finite() {
            return None;
        }
        let pieces = raw
            .into_iter()
            .map(|(a, b, h)| {
                let curved = h.iter().any(|v| *v != 0.0);
                Piece { a: a / scale, b: b / scale, c: curved.then(|| h / scale) }
            })
            .collect();
        Some(Self { n, pieces })
    }

    fn point(&self, u: DVector<f64>, beta: f64) -> Option<Point> {
        let mut slack = Vec::with_capacity(self.pieces.len() + 1);
        let mut grads = Vec::with_capacity(self.pieces.len());
        for p in &self.pieces {
            let (v, g) = p.value_gradient(&u);
            let s = beta - v;
            if !(s > 0.0) || !s.is_finite() {
                return None;
            }
            slack.push(s);
            grads.push(g);
        }
        let sb = 0.5 * (1.0 - u.norm_squared());
        if !(sb > 0.0) {
            return None;
        }
        slack.push(sb);
        Some(Point { u, beta, slack, grads })
    }

    fn barrier(&self, p: &Point, mu: f64) -> f64 {
        p.beta - mu * p.slack.iter().map(|s| s.ln()).sum::<f64>()
    }

    /// Gradient of the Lagrangian `β + Σ λ_j g_j`; the β-component comes last.
    fn lagrangian_gradient(&self, p: &Point, lambda: &[f64]) -> DVector<f64> {
        let n = self.n;
        let m = self.pieces.len();
        let mut g = DVector::zeros(n + 1);
        g[n] = 1.0;
        for (l, grad) in lambda[..m].iter().zip(&p.grads) {
            g.rows_mut(0, n).axpy(*l, grad, 1.0);
            g[n] -= l;
        }
        g.rows_mut(0, n).axpy(lambda[m], &p.u, 1.0);
        g
    }

    fn solve_from(&self, u0: &DVector<f64>, opts: &SolveOptions) -> Option<StartOutcome> {
        let n = self.n;
        let m = self.pieces.len();
        let nv = n + 1;
        // iterate well past the reporting tolerance so that optimal values of
        // nested models compare reliably
        let target = opts.kkt_tol * INTERNAL_TOL_FACTOR;
        let mu_min = target / 10.0;

        let beta0 = self
            .pieces
            .iter()
            .map(|p| p.value_gradient(u0).0)
            .fold(f64::NEG_INFINITY, f64::max)
            + BETA_MARGIN;
        let mut p = self.point(u0.clone(), beta0)?;
        let mut mu = MU_INIT;
        let mut lambda: Vec<f64> = p.slack.iter().map(|s| mu / s).collect();
        let mut shift_last = 0.0f64;
        let mut iters = 0;

        let kkt_error = |p: &Point, lambda: &[f64], mu: f64| -> f64 {
            let stat = self.lagrangian_gradient(p, lambda).amax();
            let comp = p
                .slack
                .iter()
                .zip(lambda)
                .map(|(s, l)| (s * l - mu).abs())
                .fold(0.0, f64::max);
            stat.max(comp)
        };

        let converged = loop {
            let e0 = kkt_error(&p, &lambda, 0.0);
            if e0 <= target {
                break true;
            }
            if mu > mu_min && kkt_error(&p, &lambda, mu) <= 10.0 * mu {
                mu = mu_min.max((0.2 * mu).min(mu.powf(1.5)));
                continue;
            }
            if iters >= opts.max_iters {
                break false;
            }
            iters += 1;

            // condensed primal-dual Newton system
            let mut mat = DMatrix::zeros(nv, nv);
            let mut rhs = DVector::zeros(nv);
            rhs[n] = -1.0;
            let mut full = DVector::zeros(nv);
            for (j, piece) in self.pieces.iter().enumerate() {
                let s = p.slack[j];
                if let Some(c) = &piece.c {
                    let l = lambda[j];
                    mat.view_mut((0, 0), (n, n)).zip_apply(c, |a, b| *a += l * b);
                }
                full.rows_mut(0, n).copy_from(&p.grads[j]);
                full[n] = -1.0;
                mat.ger(lambda[j] / s, &full, &full, 1.0);
                rhs.axpy(-mu / s, &full, 1.0);
            }
            let sb = p.slack[m];
            for i in 0..n {
                mat[(i, i)] += lambda[m];
            }
            full.rows_mut(0, n).copy_from(&p.u);
            full[n] = 0.0;
            mat.ger(lambda[m] / sb, &full, &full, 1.0);
            rhs.axpy(-mu / sb, &full, 1.0);

            let (dir, shift) = regularized_solve(&mat, &rhs, shift_last)?;
            shift_last = shift;
            let slope = -rhs.dot(&dir);
            if !(slope < 0.0) {
                if mu > mu_min {
                    mu = mu_min.max((0.2 * mu).min(mu.powf(1.5)));
                    continue;
                }
                break false;
            }

            // backtracking on the barrier function, staying strictly feasible
            let phi = self.barrier(&p, mu);
            let mut alpha = 1.0;
            let mut next = None;
            for _ in 0..60 {
                let u = &p.u + dir.rows(0, n) * alpha;
                let beta = p.beta + alpha * dir[n];
                if let Some(q) = self.point(u, beta) {
                    if self.barrier(&q, mu) <= phi + 1e-4 * alpha * slope {
                        next = Some(q);
                        break;
                    }
                }
                alpha *= 0.5;
            }
            let Some(q) = next else {
                if mu > mu_min {
                    mu = mu_min.max((0.2 * mu).min(mu.powf(1.5)));
                    continue;
                }
                break false;
            };

            // multiplier step from the linearized complementarity
            let du = dir.rows(0, n);
            let dlambda: Vec<f64> = (0..=m)
                .map(|j| {
                    let dg = if j < m { p.grads[j].dot(&du) - dir[n] } else { p.u.dot(&du) };
                    (mu - lambda[j] * p.slack[j] + lambda[j] * dg) / p.slack[j]
                })
                .collect();
            let mut alpha_dual: f64 = 1.0;
            for (l, dl) in lambda.iter().zip(&dlambda) {
                if *dl < 0.0 {
                    alpha_dual = alpha_dual.min(-0.99 * l / dl);
                }
            }
            for (j, l) in lambda.iter_mut().enumerate() {
                let s = q.slack[j];
                let v = *l + alpha_dual * dlambda[j];
                *l = v.clamp(mu / (MU_SAFEGUARD * s), MU_SAFEGUARD * mu / s);
            }
            p = q;
        };

        let kkt = kkt_error(&p, &lambda, 0.0);
        let converged = converged || kkt <= opts.kkt_tol;
        kkt.is_finite().then_some(StartOutcome { u: p.u, kkt, converged })
    }
}

/// Solves `(mat + δI) d = rhs` with the smallest tried shift `δ ≥ 0` making
/// the matrix positive definite.
fn regularized_solve(
    mat: &DMatrix<f64>,
    rhs: &DVector<f64>,
    shift_last: f64,
) -> Option<(DVector<f64>, f64)> {
    if let Some(ch) = Cholesky::new(mat.clone()) {
        return Some((ch.solve(rhs), 0.0));
    }
    let scale = mat.diagonal().amax().max(1.0);
    let mut shift = if shift_last > 0.0 { (shift_last / 3.0).max(1e-12 * scale) } else { 1e-8 * scale };
    for _ in 0..80 {
        let mut shifted = mat.clone();
        for i in 0..shifted.nrows() {
            shifted[(i, i)] += shift;
        }
        if let Some(ch) = Cholesky::new(shifted) {
            return Some((ch.solve(rhs), shift));
        }
        shift *= if shift_last > 0.0 { 8.0 } else { 100.0 };
    }
    None
}

/// Exhaustive minimization of the model on a uniform grid over the bounding
/// box of the ball (points outside the ball are skipped). Test oracle for
/// `n ≤ 2`.
pub fn brute_force_min(w: &ModelSet, points_per_dim: usize) -> Result<(DVector<f64>, f64)> {
    let n = w.dim();
    if n > 2 {
        return Err(Error::DimensionTooLarge(n));
    }
    if points_per_dim < 3 {
        return Err(Error::InvalidParameter(format!(
            "points_per_dim must be at least 3, got {points_per_dim}"
        )));
    }
    if w.is_empty() {
        return Err(Error::EmptyModel);
    }
    let x = w.center();
    let eps = w.radius();
    let coord = |i: usize, k: usize| x[i] - eps + 2.0 * eps * k as f64 / (points_per_dim - 1) as f64;

    let mut best: Option<(DVector<f64>, f64)> = None;
    let mut visit = |z: DVector<f64>| -> Result<()> {
        if (&z - x).norm() > eps * (1.0 + 1e-12) {
            return Ok(());
        }
        let (v, _) = w.eval(&z)?;
        if best.as_ref().is_none_or(|(_, b)| v < *b) {
            best = Some((z, v));
        }
        Ok(())
    };
    match n {
        1 => {
            for k in 0..points_per_dim {
                visit(DVector::from_element(1, coord(0, k)))?;
            }
        }
        _ => {
            for k in 0..points_per_dim {
                for l in 0..points_per_dim {
                    visit(DVector::from_vec(vec![coord(0, k), coord(1, l)]))?;
                }
            }
        }
    }
    best.ok_or(Error::EmptyModel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::JetElement;
    use nalgebra::{dmatrix, dvector};

    fn jet1(y: f64, fy: f64, g: f64, h: f64) -> JetElement {
        JetElement::new(dvector![y], fy, dvector![g], dmatrix![h]).unwrap()
    }

    fn single(center: f64, eps: f64, jets: Vec<JetElement>) -> ModelSet {
        ModelSet::new(dvector![center], eps, jets).unwrap()
    }

    #[test]
    fn convex_vertex_inside_ball() {
        let w = single(0.0, 1.0, vec![jet1(0.0, 0.0, -1.0, 2.0)]);
        let sol = solve_subproblem(&w, &SolveOptions::default()).unwrap();
        assert!((sol.z_bar[0] - 0.5).abs() < 1e-6, "{sol:?}");
        assert!((sol.theta + 0.25).abs() < 1e-8);
        assert_eq!(sol.status, SolveStatus::Optimal);
    }

    #[test]
    fn concave_minimum_on_boundary() {
        let w = single(0.0, 1.0, vec![jet1(0.0, 0.0, 0.0, -2.0)]);
        let sol = solve_subproblem(&w, &SolveOptions::default()).unwrap();
        assert!((sol.theta + 1.0).abs() < 1e-6, "{sol:?}");
        assert!((sol.z_bar[0].abs() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn jet_approximation_example_first_model() {
        let f = 0.3f64.sqrt();
        let w = single(-0.2, 0.5, vec![jet1(-0.2, f, -0.5 / f, -0.25 / (0.3 * f))]);
        let sol = solve_subproblem(&w, &SolveOptions::default()).unwrap();
        assert!((sol.z_bar[0] - 0.3).abs() < 1e-3, "{sol:?}");
        assert!((sol.theta + 0.098_894_350_660_655).abs() < 1e-6);
    }

    #[test]
    fn abs_jets_meet_at_zero() {
        let w = single(0.0, 1.0, vec![jet1(0.5, 0.5, 1.0, 0.0), jet1(-0.5, 0.5, -1.0, 0.0)]);
        let sol = solve_subproblem(&w, &SolveOptions::default()).unwrap();
        assert!(sol.z_bar[0].abs() < 1e-6 && sol.theta.abs() < 1e-6, "{sol:?}");
        let (z, t) = brute_force_min(&w, 4001).unwrap();
        assert!(z[0].abs() < 1e-12 && t.abs() < 1e-12);
    }

    #[test]
    fn reported_theta_is_the_model_value() {
        let w = ModelSet::new(
            dvector![0.0, 0.0],
            1.5,
            vec![
                JetElement::new(dvector![0.0, 0.0], 1.0, dvector![1.0, -2.0], dmatrix![1.0, 0.3; 0.3, -2.0]).unwrap(),
                JetElement::new(dvector![1.0, 0.0], 0.5, dvector![-1.0, 0.5], dmatrix![0.5, 0.0; 0.0, 0.5]).unwrap(),
            ],
        )
        .unwrap();
        let sol = solve_subproblem(&w, &SolveOptions::default()).unwrap();
        assert_eq!(sol.theta, w.eval(&sol.z_bar).unwrap().0);
        assert!((&sol.z_bar - w.center()).norm() <= 1.5 + 1e-8);
    }

    #[test]
    fn empty_model_errors() {
        let w = ModelSet::empty(dvector![0.0], 1.0);
        assert!(matches!(solve_subproblem(&w, &SolveOptions::default()), Err(Error::EmptyModel)));
    }

    #[test]
    fn flat_model_returns_center() {
        let w = single(0.3, 1.0, vec![jet1(0.3, 2.0, 0.0, 0.0)]);
        let sol = solve_subproblem(&w, &SolveOptions::default()).unwrap();
        assert_eq!(sol.z_bar[0], 0.3);
        assert_eq!(sol.theta, 2.0);
    }

    #[test]
    fn brute_force_examples() {
        let w = single(0.0, 1.0, vec![jet1(0.0, 0.0, -1.0, 2.0)]);
        let (_, t) = brute_force_min(&w, 4001).unwrap();
        assert!((t + 0.25).abs() < 1e-6);

        let f = 0.3f64.sqrt();
        let w = single(-0.2, 0.5, vec![jet1(-0.2, f, -0.5 / f, -0.25 / (0.3 * f))]);
        let (z, _) = brute_force_min(&w, 4001).unwrap();
        assert!((z[0] - 0.3).abs() < 2.5e-4);

        let w = single(0.0, 1.0, vec![jet1(0.0, 0.0, -10.0, 2.0)]);
        let (z, _) = brute_force_min(&w, 4001).unwrap();
        assert!((z[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn brute_force_rejects_bad_input() {
        let w = ModelSet::new(
            dvector![0.0, 0.0, 0.0],
            1.0,
            vec![JetElement::new(DVector::zeros(3), 0.0, DVector::zeros(3), DMatrix::zeros(3, 3)).unwrap()],
        )
        .unwrap();
        assert!(matches!(brute_force_min(&w, 11), Err(Error::DimensionTooLarge(3))));
        let w = single(0.0, 1.0, vec![jet1(0.0, 0.0, 1.0, 0.0)]);
        assert!(brute_force_min(&w, 2).is_err());
    }

    #[test]
    fn identical_inputs_identical_outputs() {
        let w = ModelSet::new(
            dvector![0.2, -0.1],
            0.8,
            vec![
                JetElement::new(dvector![0.2, -0.1], 0.0, dvector![0.4, 0.1], dmatrix![-1.0, 0.2; 0.2, 0.5]).unwrap(),
                JetElement::new(dvector![0.5, 0.2], 0.3, dvector![-0.6, 0.9], dmatrix![2.0, 0.0; 0.0, -0.5]).unwrap(),
            ],
        )
        .unwrap();
        let opts = SolveOptions { seed: 17, ..SolveOptions::default() };
        let a = solve_subproblem(&w, &opts).unwrap();
        let b = solve_subproblem(&w, &opts).unwrap();
        assert_eq!(a.z_bar, b.z_bar);
        assert_eq!(a.theta.to_bits(), b.theta.to_bits());
    }
}
