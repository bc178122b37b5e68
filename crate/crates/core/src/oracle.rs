//! Jet-element evaluation and derivative checking.
//!
//! A jet element is the 4-tuple `(y, f(y), ξ, H)` collecting the coefficients
//! of one second-order Taylor expansion of the objective. At points where the
//! objective is twice differentiable it is simply value, gradient and Hessian;
//! at kinks the test problems return the limiting element of the first active
//! branch.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::testbed::ProblemSpec;

/// Analytic first- and second-order information of a nonsmooth objective.
///
/// Implementations evaluate their branches in a fixed order and pick the
/// first branch attaining the maximum, so repeated calls are bit-identical.
pub trait Objective: Send + Sync {
    fn value(&self, x: &DVector<f64>) -> f64;

    /// Value, one (limiting) gradient and one (limiting) Hessian at `x`.
    fn second_order(&self, x: &DVector<f64>) -> (f64, DVector<f64>, DMatrix<f64>);

    fn value_gradient(&self, x: &DVector<f64>) -> (f64, DVector<f64>) {
        let (f, g, _) = self.second_order(x);
        (f, g)
    }

    /// Smallest distance (in value or argument, whichever the problem uses)
    /// between the active branch and the nearest switch. Large margins mean
    /// a finite-difference stencil around `x` stays on one branch.
    fn branch_margin(&self, x: &DVector<f64>) -> f64;
}

/// One element of the second-order ε-jet: base point, value, subgradient and
/// symmetric Hessian.
#[derive(Clone, Debug, PartialEq)]
pub struct JetElement {
    y: DVector<f64>,
    fy: f64,
    xi: DVector<f64>,
    h: DMatrix<f64>,
}

impl JetElement {
    /// Builds a jet element, symmetrizing `h` and rejecting non-finite data.
    pub fn new(y: DVector<f64>, fy: f64, xi: DVector<f64>, h: DMatrix<f64>) -> Result<Self> {
        let n = y.len();
        if xi.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: xi.len() });
        }
        if h.nrows() != n || h.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: h.nrows().max(h.ncols()) });
        }
        let finite = fy.is_finite()
            && y.iter().all(|v| v.is_finite())
            && xi.iter().all(|v| v.is_finite())
            && h.iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::NonFiniteValue {
                problem: String::from("<jet>"),
                point: y.iter().copied().collect(),
            });
        }
        let h = symmetrize(h);
        Ok(Self { y, fy, xi, h })
    }

    pub fn y(&self) -> &DVector<f64> {
        &self.y
    }

    pub fn fy(&self) -> f64 {
        self.fy
    }

    pub fn xi(&self) -> &DVector<f64> {
        &self.xi
    }

    pub fn hessian(&self) -> &DMatrix<f64> {
        &self.h
    }

    pub fn dim(&self) -> usize {
        self.y.len()
    }

    /// Second-order Taylor expansion `f(y) + ξᵀ(z-y) + ½ (z-y)ᵀH(z-y)`.
    pub fn expand(&self, z: &DVector<f64>) -> f64 {
        let d = z - &self.y;
        self.fy + self.xi.dot(&d) + 0.5 * d.dot(&(&self.h * &d))
    }

    /// Gradient of [`JetElement::expand`] at `z`.
    pub fn expand_gradient(&self, z: &DVector<f64>) -> DVector<f64> {
        let d = z - &self.y;
        &self.xi + &self.h * d
    }
}

fn symmetrize(h: DMatrix<f64>) -> DMatrix<f64> {
    let n = h.nrows();
    let mut s = h.clone();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (h[(i, j)] + h[(j, i)]);
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    s
}

/// Oracle-call bookkeeping for one run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleCounters {
    pub n_f: u64,
    pub n_grad: u64,
    pub n_hess: u64,
}

/// Counting front-end to a problem's objective. Owned by a single run.
pub struct Oracle<'a> {
    problem: &'a ProblemSpec,
    counters: OracleCounters,
}

impl<'a> Oracle<'a> {
    pub fn new(problem: &'a ProblemSpec) -> Self {
        Self { problem, counters: OracleCounters::default() }
    }

    pub fn problem(&self) -> &'a ProblemSpec {
        self.problem
    }

    pub fn counters(&self) -> OracleCounters {
        self.counters
    }

    /// Evaluates one element of the jet at `y`, counting one value, one
    /// gradient and one Hessian evaluation.
    pub fn evaluate_jet(&mut self, y: &DVector<f64>) -> Result<JetElement> {
        self.check_dim(y)?;
        let (fy, xi, h) = self.problem.objective().second_order(y);
        self.counters.n_f += 1;
        self.counters.n_grad += 1;
        self.counters.n_hess += 1;
        JetElement::new(y.clone(), fy, xi, h).map_err(|e| self.tag(e, y))
    }

    pub fn value(&mut self, y: &DVector<f64>) -> Result<f64> {
        self.check_dim(y)?;
        let f = self.problem.objective().value(y);
        self.counters.n_f += 1;
        if !f.is_finite() {
            return Err(self.non_finite(y));
        }
        Ok(f)
    }

    /// Evaluates a subgradient at `y`; the value comes for free and is not
    /// counted as a separate function evaluation.
    pub fn gradient(&mut self, y: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_dim(y)?;
        let (_, g) = self.problem.objective().value_gradient(y);
        self.counters.n_grad += 1;
        if !g.iter().all(|v| v.is_finite()) {
            return Err(self.non_finite(y));
        }
        Ok(g)
    }

    fn check_dim(&self, y: &DVector<f64>) -> Result<()> {
        if y.len() != self.problem.n() {
            return Err(Error::DimensionMismatch { expected: self.problem.n(), got: y.len() });
        }
        Ok(())
    }

    fn non_finite(&self, y: &DVector<f64>) -> Error {
        Error::NonFiniteValue {
            problem: self.problem.name().to_string(),
            point: y.iter().copied().collect(),
        }
    }

    fn tag(&self, e: Error, y: &DVector<f64>) -> Error {
        match e {
            Error::NonFiniteValue { .. } => self.non_finite(y),
            other => other,
        }
    }
}

/// Max-norm relative errors of the analytic derivatives against central
/// differences.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivativeReport {
    pub grad_rel_err: f64,
    pub hess_rel_err: f64,
}

/// Compares the analytic gradient and Hessian at `y` against central
/// differences with step `h`.
///
/// The gradient is differenced from values, the Hessian from analytic
/// gradients. Errors are `‖fd - exact‖∞ / max(1, ‖exact‖∞)`. Only meaningful
/// where the objective is smooth in a neighbourhood of radius `h`.
pub fn check_derivatives(problem: &ProblemSpec, y: &DVector<f64>, h: f64) -> DerivativeReport {
    let obj = problem.objective();
    let n = y.len();
    let (_, grad, hess) = obj.second_order(y);

    let mut fd_grad = DVector::zeros(n);
    let mut fd_hess = DMatrix::zeros(n, n);
    let mut probe = y.clone();
    for i in 0..n {
        probe[i] = y[i] + h;
        let (fp, gp) = obj.value_gradient(&probe);
        probe[i] = y[i] - h;
        let (fm, gm) = obj.value_gradient(&probe);
        probe[i] = y[i];
        fd_grad[i] = (fp - fm) / (2.0 * h);
        fd_hess.set_column(i, &((gp - gm) / (2.0 * h)));
    }
    let fd_hess = symmetrize(fd_hess);

    let rel = |diff: f64, scale: f64| {
        if diff.is_nan() {
            f64::INFINITY
        } else {
            diff / scale.max(1.0)
        }
    };
    DerivativeReport {
        grad_rel_err: rel((&fd_grad - &grad).amax(), grad.amax()),
        hess_rel_err: rel((&fd_hess - &hess).amax(), hess.amax()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testbed::get_problem;
    use nalgebra::{dmatrix, dvector};

    #[test]
    fn maxq_unique_active_index() {
        let p = get_problem("maxq", 2).unwrap();
        let mut oracle = Oracle::new(&p);
        let jet = oracle.evaluate_jet(&dvector![1.0, 0.0]).unwrap();
        assert_eq!(jet.fy(), 1.0);
        assert_eq!(jet.xi(), &dvector![2.0, 0.0]);
        assert_eq!(jet.hessian(), &dmatrix![2.0, 0.0; 0.0, 0.0]);
        assert_eq!(oracle.counters(), OracleCounters { n_f: 1, n_grad: 1, n_hess: 1 });
    }

    #[test]
    fn sqrt_example_on_negative_branch() {
        let p = get_problem("paper_ex_4_7", 1).unwrap();
        let mut oracle = Oracle::new(&p);
        let jet = oracle.evaluate_jet(&dvector![-0.2]).unwrap();
        assert!((jet.fy() - 0.547_722_557_505_166).abs() < 1e-12);
        assert!((jet.xi()[0] + 0.912_870_929_175_277).abs() < 1e-12);
        assert!((jet.hessian()[(0, 0)] + 1.521_451_548_625_461_6).abs() < 1e-12);

        // independent check by central differences
        let f = |x: f64| (x.abs() + 0.1).sqrt();
        let h = 1e-6;
        let fd1 = (f(-0.2 + h) - f(-0.2 - h)) / (2.0 * h);
        let fd2 = (f(-0.2 + 1e-4) - 2.0 * f(-0.2) + f(-0.2 - 1e-4)) / 1e-8;
        assert!((fd1 - jet.xi()[0]).abs() < 1e-8);
        assert!((fd2 - jet.hessian()[(0, 0)]).abs() < 1e-5);
    }

    #[test]
    fn absval_tie_selects_nonnegative_branch() {
        let p = get_problem("absval", 1).unwrap();
        let mut oracle = Oracle::new(&p);
        let jet = oracle.evaluate_jet(&dvector![0.0]).unwrap();
        assert_eq!(jet.fy(), 0.0);
        assert_eq!(jet.xi()[0], 1.0);
        assert_eq!(jet.hessian()[(0, 0)], 0.0);
    }

    #[test]
    fn hessian_is_symmetrized() {
        let jet = JetElement::new(
            dvector![0.0, 0.0],
            0.0,
            dvector![0.0, 0.0],
            dmatrix![1.0, 2.0; 0.0, 1.0],
        )
        .unwrap();
        assert_eq!(jet.hessian(), &jet.hessian().transpose());
        assert_eq!(jet.hessian()[(0, 1)], 1.0);
    }

    #[test]
    fn non_finite_entries_are_rejected() {
        let err = JetElement::new(dvector![0.0], f64::NAN, dvector![0.0], dmatrix![0.0]);
        assert!(matches!(err, Err(Error::NonFiniteValue { .. })));
        let err = JetElement::new(dvector![0.0], 0.0, dvector![f64::INFINITY], dmatrix![0.0]);
        assert!(matches!(err, Err(Error::NonFiniteValue { .. })));
    }

    #[test]
    fn wrong_dimension_is_rejected() {
        let p = get_problem("maxq", 3).unwrap();
        let mut oracle = Oracle::new(&p);
        assert!(matches!(
            oracle.evaluate_jet(&dvector![1.0]),
            Err(Error::DimensionMismatch { expected: 3, got: 1 })
        ));
        assert_eq!(oracle.counters(), OracleCounters::default());
    }

    #[test]
    fn derivative_check_examples() {
        let p = get_problem("maxq", 3).unwrap();
        let r = check_derivatives(&p, &dvector![3.0, 1.0, 2.0], 1e-6);
        assert!(r.grad_rel_err < 1e-5, "{r:?}");

        let p = get_problem("paper_ex_4_7", 1).unwrap();
        let r = check_derivatives(&p, &dvector![0.5], 1e-6);
        assert!(r.grad_rel_err < 1e-5 && r.hess_rel_err < 1e-4, "{r:?}");

        let p = get_problem("chained_lq", 2).unwrap();
        let r = check_derivatives(&p, &dvector![0.9, 0.9], 1e-6);
        assert!(r.grad_rel_err < 1e-5, "{r:?}");
    }

    #[test]
    fn evaluation_is_deterministic() {
        let p = get_problem("active_faces", 4).unwrap();
        let y = dvector![0.3, -1.2, 0.0, 2.5];
        let mut a = Oracle::new(&p);
        let mut b = Oracle::new(&p);
        assert_eq!(a.evaluate_jet(&y).unwrap(), b.evaluate_jet(&y).unwrap());
    }
}
