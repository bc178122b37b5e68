//! A minimal gradient-sampling method, the first-order comparator of the
//! benchmark.
//!
//! Each iteration samples gradients at `x` and at `m - 1` uniform points of
//! `B_ε(x)`, takes the negative minimum-norm element of their convex hull as
//! search direction and runs an Armijo backtracking search along it. When the
//! direction is (numerically) zero or the search fails, `ε` shrinks.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::Oracle;
use crate::solver::{IterationRecord, RunRecord, Termination};
use crate::subproblem::uniform_in_unit_ball;
use crate::testbed::ProblemSpec;

/// Sampled gradients with the points they were taken at.
#[derive(Clone, Debug)]
pub struct GradientBundle {
    gradients: Vec<DVector<f64>>,
    base_points: Vec<DVector<f64>>,
}

impl GradientBundle {
    pub fn new(gradients: Vec<DVector<f64>>, base_points: Vec<DVector<f64>>) -> Result<Self> {
        let Some(first) = gradients.first() else {
            return Err(Error::InvalidParameter("empty gradient bundle".into()));
        };
        let n = first.len();
        if base_points.len() != gradients.len() {
            return Err(Error::DimensionMismatch { expected: gradients.len(), got: base_points.len() });
        }
        for v in gradients.iter().chain(&base_points) {
            if v.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: v.len() });
            }
        }
        Ok(Self { gradients, base_points })
    }

    /// A bundle whose base points are irrelevant (all set to the origin).
    pub fn from_gradients(gradients: Vec<DVector<f64>>) -> Result<Self> {
        let zeros = gradients.iter().map(|g| DVector::zeros(g.len())).collect();
        Self::new(gradients, zeros)
    }

    pub fn gradients(&self) -> &[DVector<f64>] {
        &self.gradients
    }

    pub fn base_points(&self) -> &[DVector<f64>] {
        &self.base_points
    }

    pub fn len(&self) -> usize {
        self.gradients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gradients.is_empty()
    }
}

/// Minimum-norm point of the convex hull of the bundle's gradients.
///
/// Wolfe's algorithm: grow a corral of affinely independent points, move to
/// the affine minimizer of the corral and drop points whose weight would
/// turn negative.
pub fn min_norm_element(g: &GradientBundle) -> DVector<f64> {
    let pts = g.gradients();
    let scale = pts.iter().map(|p| p.norm_squared()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let tol = 1e-14 * scale;

    let start = (0..pts.len())
        .min_by(|&a, &b| pts[a].norm_squared().total_cmp(&pts[b].norm_squared()))
        .unwrap_or(0);
    let mut corral = vec![start];
    let mut weights = vec![1.0];
    let mut x = pts[start].clone();

    let max_major = 10 * (pts.len() + x.len()) + 10;
    for _ in 0..max_major {
        let (j, xp) = (0..pts.len())
            .map(|j| (j, x.dot(&pts[j])))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("bundle is nonempty");
        if x.norm_squared() - xp <= tol || corral.contains(&j) {
            break;
        }
        corral.push(j);
        weights.push(0.0);

        loop {
            let Some(alpha) = affine_minimizer(pts, &corral) else {
                corral.pop();
                weights.pop();
                return x;
            };
            if alpha.iter().all(|&a| a > 1e-15) {
                weights = alpha;
                break;
            }
            // step from the current weights towards alpha until one hits zero
            let mut theta = 1.0f64;
            for (l, a) in weights.iter().zip(&alpha) {
                if *a <= 1e-15 {
                    theta = theta.min(l / (l - a));
                }
            }
            for (l, a) in weights.iter_mut().zip(&alpha) {
                *l = (1.0 - theta) * *l + theta * a;
            }
            let mut k = 0;
            while k < corral.len() {
                if weights[k] <= 1e-15 {
                    corral.remove(k);
                    weights.remove(k);
                } else {
                    k += 1;
                }
            }
            let total: f64 = weights.iter().sum();
            weights.iter_mut().for_each(|l| *l /= total);
            if corral.len() == 1 {
                break;
            }
        }
        x = combine(pts, &corral, &weights);
    }
    x
}

fn combine(pts: &[DVector<f64>], idx: &[usize], w: &[f64]) -> DVector<f64> {
    let mut x = DVector::zeros(pts[0].len());
    for (&i, &l) in idx.iter().zip(w) {
        x.axpy(l, &pts[i], 1.0);
    }
    x
}

/// Weights of the minimum-norm point of the affine hull of `pts[idx]`.
fn affine_minimizer(pts: &[DVector<f64>], idx: &[usize]) -> Option<Vec<f64>> {
    let k = idx.len();
    let mut kkt = DMatrix::zeros(k + 1, k + 1);
    for a in 0..k {
        for b in 0..k {
            kkt[(a, b)] = pts[idx[a]].dot(&pts[idx[b]]);
        }
        kkt[(a, k)] = 1.0;
        kkt[(k, a)] = 1.0;
    }
    let mut rhs = DVector::zeros(k + 1);
    rhs[k] = 1.0;
    let sol = kkt.clone().lu().solve(&rhs).or_else(|| kkt.svd(true, true).solve(&rhs, 1e-14).ok())?;
    let alpha: Vec<f64> = sol.rows(0, k).iter().copied().collect();
    alpha.iter().all(|a| a.is_finite()).then_some(alpha)
}

/// Parameters of [`run_gs`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GsParams {
    /// Gradients per iteration; `None` means `2n`.
    pub m: Option<usize>,
    pub eps_init: f64,
    pub kappa_eps: f64,
    pub eps_min: f64,
    /// Step shrink factor of the line search.
    pub armijo_beta: f64,
    /// Sufficient-decrease constant of the line search.
    pub armijo_gamma: f64,
    /// Directions shorter than this count as stationary.
    pub stationarity_tol: f64,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for GsParams {
    fn default() -> Self {
        Self {
            m: None,
            eps_init: 0.1,
            kappa_eps: 0.1,
            eps_min: 1e-5,
            armijo_beta: 0.5,
            armijo_gamma: 1e-4,
            stationarity_tol: 1e-6,
            max_iters: 1000,
            seed: 0,
        }
    }
}

const MAX_BACKTRACKS: usize = 60;

/// Runs gradient sampling from `x0`.
pub fn run_gs(problem: &ProblemSpec, x0: &DVector<f64>, params: &GsParams) -> Result<RunRecord> {
    let n = problem.n();
    if x0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x0.len() });
    }
    let m = params.m.unwrap_or(2 * n);
    if m < n + 1 {
        return Err(Error::InvalidParameter(format!("m = {m} must be at least n + 1 = {}", n + 1)));
    }
    let valid = params.eps_init > 0.0
        && params.eps_min > 0.0
        && params.kappa_eps > 0.0
        && params.kappa_eps < 1.0
        && params.armijo_beta > 0.0
        && params.armijo_beta < 1.0
        && params.armijo_gamma > 0.0
        && params.armijo_gamma < 1.0
        && params.stationarity_tol >= 0.0
        && params.max_iters > 0;
    if !valid {
        return Err(Error::InvalidParameter("invalid gradient-sampling parameters".into()));
    }

    let mut oracle = Oracle::new(problem);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut x = x0.clone();
    let mut fx = oracle.value(&x)?;
    let mut eps = params.eps_init;
    let mut iterates = Vec::new();
    let mut accepted = 0usize;
    let mut iter = 0usize;

    let termination = loop {
        if eps < params.eps_min {
            break Termination::EpsilonConverged;
        }
        if iter >= params.max_iters {
            break Termination::MaxOuterIterations;
        }
        iter += 1;

        let step = gs_iteration(&mut oracle, &mut rng, &x, fx, eps, m, params);
        let (next, backtracks) = match step {
            Ok(s) => s,
            Err(_) => break Termination::SubproblemFailure,
        };
        let counters = oracle.counters();
        iterates.push(IterationRecord {
            i: accepted,
            x: x.iter().copied().collect(),
            f: fx,
            eps,
            tau: params.stationarity_tol,
            w_size: m,
            inner_iters: backtracks,
            n_f: counters.n_f,
            n_grad: counters.n_grad,
            n_hess: counters.n_hess,
        });
        match next {
            Some((y, fy)) => {
                x = y;
                fx = fy;
                accepted += 1;
            }
            None => eps *= params.kappa_eps,
        }
    };

    Ok(RunRecord {
        iterates,
        termination,
        final_x: x,
        final_f: fx,
        counters: oracle.counters(),
        accepted_steps: accepted,
        violations: Vec::new(),
        degenerate_solves: 0,
    })
}

type Point = (DVector<f64>, f64);

/// One sampling step. Returns the accepted point (if any) and the number of
/// step reductions.
fn gs_iteration(
    oracle: &mut Oracle<'_>,
    rng: &mut ChaCha8Rng,
    x: &DVector<f64>,
    fx: f64,
    eps: f64,
    m: usize,
    params: &GsParams,
) -> Result<(Option<Point>, usize)> {
    let n = x.len();
    let mut points = vec![x.clone()];
    points.extend((1..m).map(|_| x + uniform_in_unit_ball(rng, n) * eps));
    let gradients = points.iter().map(|p| oracle.gradient(p)).collect::<Result<Vec<_>>>()?;
    let bundle = GradientBundle::new(gradients, points)?;
    let d = min_norm_element(&bundle);
    let norm = d.norm();
    if norm <= params.stationarity_tol {
        return Ok((None, 0));
    }

    let dir = -d / norm;
    let mut t = eps;
    for k in 0..MAX_BACKTRACKS {
        let y = x + &dir * t;
        let fy = oracle.value(&y)?;
        if fy <= fx - params.armijo_gamma * t * norm {
            return Ok((Some((y, fy)), k));
        }
        t *= params.armijo_beta;
    }
    Ok((None, MAX_BACKTRACKS))
}
