//! Scalable nonsmooth test problems with analytic first and second
//! derivatives on every branch.
//!
//! Piecewise problems evaluate their branches in the order they are listed
//! in each doc comment and select the first branch attaining the maximum;
//! absolute values `|t|` take the `t >= 0` branch at `t = 0`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::oracle::Objective;

/// A registered test problem instantiated at dimension `n`.
#[derive(Clone)]
pub struct ProblemSpec {
    name: String,
    n: usize,
    x0: DVector<f64>,
    f_star: Option<f64>,
    convex: bool,
    objective: Arc<dyn Objective>,
}

impl ProblemSpec {
    /// Wraps a custom objective.
    pub fn new(
        name: impl Into<String>,
        x0: DVector<f64>,
        f_star: Option<f64>,
        convex: bool,
        objective: Arc<dyn Objective>,
    ) -> Self {
        Self { name: name.into(), n: x0.len(), x0, f_star, convex, objective }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Standard starting point.
    pub fn x0(&self) -> &DVector<f64> {
        &self.x0
    }

    /// Known minimal value, if any.
    pub fn f_star(&self) -> Option<f64> {
        self.f_star
    }

    pub fn is_convex(&self) -> bool {
        self.convex
    }

    pub fn objective(&self) -> &dyn Objective {
        self.objective.as_ref()
    }

    /// Objective value, bypassing oracle counters.
    pub fn value(&self, x: &DVector<f64>) -> f64 {
        self.objective.value(x)
    }
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("f_star", &self.f_star)
            .field("convex", &self.convex)
            .finish_non_exhaustive()
    }
}

/// Registry metadata for `sojet problems --list`.
#[derive(Clone, Copy, Debug)]
pub struct ProblemInfo {
    pub name: &'static str,
    pub min_n: usize,
    pub convex: bool,
    pub f_star: &'static str,
}

pub const REGISTRY: &[ProblemInfo] = &[
    ProblemInfo { name: "maxq", min_n: 1, convex: true, f_star: "0" },
    ProblemInfo { name: "mxhilb", min_n: 1, convex: true, f_star: "0" },
    ProblemInfo { name: "chained_lq", min_n: 2, convex: true, f_star: "-(n-1)*sqrt(2)" },
    ProblemInfo { name: "chained_cb3", min_n: 2, convex: true, f_star: "2*(n-1)" },
    ProblemInfo { name: "active_faces", min_n: 1, convex: false, f_star: "0" },
    ProblemInfo { name: "chained_mifflin2", min_n: 2, convex: false, f_star: "unknown" },
    ProblemInfo { name: "chained_crescent1", min_n: 2, convex: false, f_star: "0" },
    ProblemInfo { name: "paper_ex_3_6", min_n: 1, convex: false, f_star: "unknown" },
    ProblemInfo { name: "paper_ex_4_7", min_n: 1, convex: false, f_star: "sqrt(0.1)" },
    ProblemInfo { name: "absval", min_n: 1, convex: true, f_star: "0" },
];

/// Names of all registered problems, in registry order.
pub fn problem_names() -> impl Iterator<Item = &'static str> {
    REGISTRY.iter().map(|p| p.name)
}

/// Instantiates a registered problem at dimension `n`.
pub fn get_problem(name: &str, n: usize) -> Result<ProblemSpec> {
    let info = REGISTRY
        .iter()
        .find(|p| p.name == name)
        .ok_or_else(|| Error::UnknownProblem(name.to_string()))?;
    if n < info.min_n {
        return Err(Error::DimensionTooSmall { name: name.to_string(), n, min: info.min_n });
    }
    let nf = n as f64;
    let (x0, f_star, objective): (DVector<f64>, Option<f64>, Arc<dyn Objective>) = match name {
        "maxq" => (
            DVector::from_fn(n, |i, _| {
                let k = (i + 1) as f64;
                if i < n / 2 { k } else { -k }
            }),
            Some(0.0),
            Arc::new(MaxQ),
        ),
        "mxhilb" => (DVector::from_element(n, 1.0), Some(0.0), Arc::new(MxHilb)),
        "chained_lq" => (
            DVector::from_element(n, -0.5),
            Some(-(nf - 1.0) * 2f64.sqrt()),
            Arc::new(ChainedLq),
        ),
        "chained_cb3" => (DVector::from_element(n, 2.0), Some(2.0 * (nf - 1.0)), Arc::new(ChainedCb3)),
        "active_faces" => (DVector::from_element(n, 1.0), Some(0.0), Arc::new(ActiveFaces)),
        "chained_mifflin2" => (alternating_start(n), None, Arc::new(ChainedMifflin2)),
        "chained_crescent1" => (alternating_start(n), Some(0.0), Arc::new(ChainedCrescent1)),
        "paper_ex_3_6" => (diagonal_point(n, 0.1), None, Arc::new(SqrtOrQuintic)),
        "paper_ex_4_7" => (diagonal_point(n, -0.2), Some(0.1f64.sqrt()), Arc::new(ShiftedSqrt)),
        "absval" => (DVector::from_fn(n, |i, _| (i + 1) as f64 / nf), Some(0.0), Arc::new(AbsSum)),
        _ => unreachable!("registry and constructor table out of sync"),
    };
    Ok(ProblemSpec { name: name.to_string(), n, x0, f_star, convex: info.convex, objective })
}

/// The point at signed distance `t` from the origin along `(1, …, 1)`.
fn diagonal_point(n: usize, t: f64) -> DVector<f64> {
    DVector::from_element(n, t / (n as f64).sqrt())
}

/// `x_i = -1.5` for odd (1-based) `i`, `2.0` for even `i`.
fn alternating_start(n: usize) -> DVector<f64> {
    DVector::from_fn(n, |i, _| if i % 2 == 0 { -1.5 } else { 2.0 })
}

/// `+1` for `t >= 0`, `-1` otherwise.
fn branch_sign(t: f64) -> f64 {
    if t >= 0.0 { 1.0 } else { -1.0 }
}

/// Index of the first maximal entry and the gap to the runner-up.
fn first_argmax(values: impl IntoIterator<Item = f64>) -> (usize, f64, f64) {
    let mut best = (0usize, f64::NEG_INFINITY);
    let mut second = f64::NEG_INFINITY;
    for (i, v) in values.into_iter().enumerate() {
        if v > best.1 {
            second = best.1;
            best = (i, v);
        } else if v > second {
            second = v;
        }
    }
    (best.0, best.1, best.1 - second)
}

/// `max_i x_i²`.
struct MaxQ;

impl Objective for MaxQ {
    fn value(&self, x: &DVector<f64>) -> f64 {
        x.iter().map(|v| v * v).fold(f64::NEG_INFINITY, f64::max)
    }

    fn second_order(&self, x: &DVector<f64>) -> (f64, DVector<f64>, DMatrix<f64>) {
        let n = x.len();
        let (k, f, _) = first_argmax(x.iter().map(|v| v * v));
        let mut g = DVector::zeros(n);
        let mut h = DMatrix::zeros(n, n);
        g[k] = 2.0 * x[k];
        h[(k, k)] = 2.0;
        (f, g, h)
    }

    fn branch_margin(&self, x: &DVector<f64>) -> f64 {
        first_argmax(x.iter().map(|v| v * v)).2
    }
}

/// `max_i |Σ_j x_j / (i + j - 1)|` (1-based indices).
struct MxHilb;

impl MxHilb {
    fn rows(x: &DVector<f64>) -> Vec<f64> {
        let n = x.len();
        (0..n)
            .map(|i| (0..n).map(|j| x[j] / (i + j + 1) as f64).sum())
            .collect()
    }
}

impl Objective for MxHilb {
    fn value(&self, x: &DVector<f64>) -> f64 {
        Self::rows(x).into_iter().map(f64::abs).fold(f64::NEG_INFINITY, f64::max)
    }

    fn second_order(&self, x: &DVector<f64>) -> (f64, DVector<f64>, DMatrix<f64>) {
        let n = x.len();
        let rows = Self::rows(x);
        let (k, f, _) = first_argmax(rows.iter().map(|v| v.abs()));
        let s = branch_sign(rows[k]);
        let g = DVector::from_fn(n, |j, _| s / (k + j + 1) as f64);
        (f, g, DMatrix::zeros(n, n))
    }

    fn branch_margin(&self, x: &DVector<f64>) -> f64 {
        let rows = Self::rows(x);
        let (k, _, gap) = first_argmax(rows.iter().map(|v| v.abs()));
        gap.min(rows[k].abs())
    }
}

/// `Σ_{i<n} max{-x_i - x_{i+1}, -x_i - x_{i+1} + x_i² + x_{i+1}² - 1}`.
struct ChainedLq;

impl Objective for ChainedLq {
    fn value(&self, x: &DVector<f64>) -> f64 {
        x.as_slice()
            .windows(2)
            .map(|w| {
                let lin = -w[0] - w[1];
                lin.max(lin + w[0] * w[0] + w[1] * w[1] - 1.0)
            })
            .sum()
    }

    fn second_order(&self, x: &DVector<f64>) -> (f64, DVector<f64>, DMatrix<f64>) {
        let n = x.len();
        let mut f = 0.0;
        let mut g = DVector::zeros(n);
        let mut h = DMatrix::zeros(n, n);
        for i in 0..n - 1 {
            let (a, b) = (x[i], x[i + 1]);
            let lin = -a - b;
            let quad = lin + a * a + b * b - 1.0;
            g[i] -= 1.0;
            g[i + 1] -= 1.0;
            if quad > lin {
                f += quad;
                g[i] += 2.0 * a;
                g[i + 1] += 2.0 * b;
                h[(i, i)] += 2.0;
                h[(i + 1, i + 1)] += 2.0;
            } else {
                f += lin;
            }
        }
        (f, g, h)
    }

    fn branch_margin(&self, x: &DVector<f64>) -> f64 {
        x.as_slice()
            .windows(2)
            .map(|w| (w[0] * w[0] + w[1] * w[1] - 1.0).abs())
            .fold(f64::INFINITY, f64::min)
    }
}

/// `Σ_{i<n} max{x_i⁴ + x_{i+1}², (2-x_i)² + (2-x_{i+1})², 2 exp(x_{i+1} - x_i)}`.
struct ChainedCb3;

impl ChainedCb3 {
    fn pieces(a: f64, b: f64) -> [f64; 3] {
        [
            a.powi(4) + b * b,
            (2.0 - a).powi(2) + (2.0 - b).powi(2),
            2.0 * (b - a).exp(),
        ]
    }
}

impl Objective for ChainedCb3 {
    fn value(&self, x: &DVector<f64>) -> f64 {
        x.as_slice()
            .windows(2)
            .map(|w| Self::pieces(w[0], w[1]).into_iter().fold(f64::NEG_INFINITY, f64::max))
            .sum()
    }

    fn second_order(&self, x: &DVector<f64>) -> (f64, DVector<f64>, DMatrix<f64>) {
        let n = x.len();
        let mut f = 0.0;
        let mut g = DVector::zeros(n);
        let mut h = DMatrix::zeros(n, n);
        for i in 0..n - 1 {
            let (a, b) = (x[i], x[i + 1]);
            let (k, v, _) = first_argmax(Self::pieces(a, b));
            f += v;
            match k {
                0 => {
                    g[i] += 4.0 * a.powi(3);
                    g[i + 1] += 2.0 * b;
                    h[(i, i)] += 12.0 * a * a;
                    h[(i + 1, i + 1)] += 2.0;
                }
                1 => {
                    g[i] -= 2.0 * (2.0 - a);
                    g[i + 1] -= 2.0 * (2.0 - b);
                    h[(i, i)] += 2.0;
                    h[(i + 1, i + 1)] += 2.0;
                }
                _ => {
                    g[i] -= v;
                    g[i + 1] += v;
                    h[(i, i)] += v;
                    h[(i + 1, i + 1)] += v;
                    h[(i, i + 1)] -= v;
                    h[(i + 1, i)] -= v;
                }
            }
        }
        (f, g, h)
    }

    fn branch_margin(&self, x: &DVector<f64>) -> f64 {
        x.as_slice()
            .windows(2)
            .map(|w| first_argmax(Self::pieces(w[0], w[1])).2)
            .fold(f64::INFINITY, f64::min)
    }
}

/// `max{g(-Σ x_i), g(x_1), …, g(x_n)}` with `g(t) = ln(|t| + 1)`.
struct ActiveFaces;

impl ActiveFaces {
    fn args(x: &DVector<f64>) -> impl Iterator<Item = f64> + '_ {
        std::iter::once(-x.sum()).chain(x.iter().copied())
    }
}

impl Objective for ActiveFaces {
    fn value(&self, x: &DVector<f64>) -> f64 {
        Self::args(x).map(|t| t.abs().ln_1p()).fold(f64::NEG_INFINITY, f64::max)
    }

    fn second_order(&self, x: &DVector<f64>) -> (f64, DVector<f64>, DMatrix<f64>) {
        let n = x.len();
        let (k, f, _) = first_argmax(Self::args(x).map(|t| t.abs().ln_1p()));
        let t = if k == 0 { -x.sum() } else { x[k - 1] };
        let d1 = branch_sign(t) / (t.abs() + 1.0);
        let d2 = -1.0 / (t.abs() + 1.0).powi(2);
        if k == 0 {
            (f, DVector::from_element(n, -d1), DMatrix::from_element(n, n, d2))
        } else {
            let mut g = DVector::zeros(n);
            let mut h = DMatrix::zeros(n, n);
            g[k - 1] = d1;
            h[(k - 1, k - 1)] = d2;
            (f, g, h)
        }
    }

    fn branch_margin(&self, x: &DVector<f64>) -> f64 {
        let (k, _, gap) = first_argmax(Self::args(x).map(|t| t.abs().ln_1p()));
        let t = if k == 0 { -x.sum() } else { x[k - 1] };
        gap.min(t.abs())
    }
}

/// `Σ_{i<n} -x_i + 2(x_i² + x_{i+1}² - 1) + 1.75 |x_i² + x_{i+1}² - 1|`.
struct ChainedMifflin2;

impl Objective for ChainedMifflin2 {
    fn value(&self, x: &DVector<f64>) -> f64 {
        x.as_slice()
            .windows(2)
            .map(|w| {
                let r = w[0] * w[0] + w[1] * w[1] - 1.0;
                -w[0] + 2.0 * r + 1.75 * r.abs()
            })
            .sum()
    }

    fn second_order(&self, x: &DVector<f64>) -> (f64, DVector<f64>, DMatrix<f64>) {
        let n = x.len();
        let mut f = 0.0;
        let mut g = DVector::zeros(n);
        let mut h = DMatrix::zeros(n, n);
        for i in 0..n - 1 {
            let (a, b) = (x[i], x[i + 1]);
            let r = a * a + b * b - 1.0;
            let w = 2.0 + 1.75 * branch_sign(r);
            f += -a + 2.0 * r + 1.75 * r.abs();
            g[i] += -1.0 + 2.0 * w * a;
            g[i + 1] += 2.0 * w * b;
            h[(i, i)] += 2.0 * w;
            h[(i + 1, i + 1)] += 2.0 * w;
        }
        (f, g, h)
    }

    fn branch_margin(&self, x: &DVector<f64>) -> f64 {
        x.as_slice()
            .windows(2)
            .map(|w| (w[0] * w[0] + w[1] * w[1] - 1.0).abs())
            .fold(f64::INFINITY, f64::min)
    }
}

/// `max{Σ_{i<n} x_i² + (x_{i+1}-1)² + x_{i+1} - 1, Σ_{i<n} -x_i² - (x_{i+1}-1)² + x_{i+1} + 1}`.
struct ChainedCrescent1;

impl ChainedCrescent1 {
    fn sums(x: &DVector<f64>) -> (f64, f64) {
        x.as_slice().windows(2).fold((0.0, 0.0), |(p, q), w| {
            let a = w[0] * w[0] + (w[1] - 1.0).powi(2);
            (p + a + w[1] - 1.0, q - a + w[1] + 1.0)
        })
    }
}

impl Objective for ChainedCrescent1 {
    fn value(&self, x: &DVector<f64>) -> f64 {
        let (p, q) = Self::sums(x);
        p.max(q)
    }

    fn second_order(&self, x: &DVector<f64>) -> (f64, DVector<f64>, DMatrix<f64>) {
        let n = x.len();
        let (p, q) = Self::sums(x);
        let (s, f) = if p >= q { (1.0, p) } else { (-1.0, q) };
        let mut g = DVector::zeros(n);
        let mut h = DMatrix::zeros(n, n);
        for i in 0..n - 1 {
            g[i] += s * 2.0 * x[i];
            g[i + 1] += s * 2.0 * (x[i + 1] - 1.0) + 1.0;
            h[(i, i)] += s * 2.0;
            h[(i + 1, i + 1)] += s * 2.0;
        }
        (f, g, h)
    }

    fn branch_margin(&self, x: &DVector<f64>) -> f64 {
        let (p, q) = Self::sums(x);
        (p - q).abs()
    }
}

/// Radius `r = ‖x‖` and unit direction of `x`; the direction at the origin
/// is the first coordinate axis.
fn polar(x: &DVector<f64>) -> (f64, DVector<f64>) {
    let r = x.norm();
    if r > 0.0 {
        (r, x / r)
    } else {
        let mut u = DVector::zeros(x.len());
        u[0] = 1.0;
        (0.0, u)
    }
}

/// Hessian `a uuᵀ + b (I - uuᵀ)` of a radial function.
fn radial_hessian(u: &DVector<f64>, radial: f64, tangential: f64) -> DMatrix<f64> {
    let n = u.len();
    let mut h = DMatrix::identity(n, n) * tangential;
    h.ger(radial - tangential, u, u, 1.0);
    h
}

/// `max{√r, -4 r^2.5 + s + 1}` with `r = ‖x‖` and `s = Σ_i x_i / √n`; for
/// `n = 1` this is `max{√|x|, -4|x|^2.5 + x + 1}`, the model-comparison example.
struct SqrtOrQuintic;

impl SqrtOrQuintic {
    fn pieces(x: &DVector<f64>) -> [f64; 2] {
        let r = x.norm();
        let s = x.sum() / (x.len() as f64).sqrt();
        [r.sqrt(), -4.0 * r.powf(2.5) + s + 1.0]
    }
}

impl Objective for SqrtOrQuintic {
    fn value(&self, x: &DVector<f64>) -> f64 {
        let [p, q] = Self::pieces(x);
        p.max(q)
    }

    fn second_order(&self, x: &DVector<f64>) -> (f64, DVector<f64>, DMatrix<f64>) {
        let n = x.len();
        let [p, q] = Self::pieces(x);
        let (r, u) = polar(x);
        if p >= q {
            // p > q forces r > 0.28, so the root branch is smooth here
            let g = &u * (0.5 / r.sqrt());
            let h = radial_hessian(&u, -0.25 / r.powf(1.5), 0.5 / r.powf(1.5));
            (p, g, h)
        } else {
            let e = DVector::from_element(n, 1.0 / (n as f64).sqrt());
            let g = &u * (-10.0 * r.powf(1.5)) + e;
            let h = radial_hessian(&u, -15.0 * r.sqrt(), -10.0 * r.sqrt());
            (q, g, h)
        }
    }

    fn branch_margin(&self, x: &DVector<f64>) -> f64 {
        let [p, q] = Self::pieces(x);
        (p - q).abs()
    }
}

/// `√(‖x‖ + 0.1)`; for `n = 1` this is the jet-approximation example. At the
/// origin the element of the first coordinate direction is returned without
/// the (unbounded) tangential curvature.
struct ShiftedSqrt;

impl Objective for ShiftedSqrt {
    fn value(&self, x: &DVector<f64>) -> f64 {
        (x.norm() + 0.1).sqrt()
    }

    fn second_order(&self, x: &DVector<f64>) -> (f64, DVector<f64>, DMatrix<f64>) {
        let (r, u) = polar(x);
        let f = (r + 0.1).sqrt();
        let d1 = 0.5 / f;
        let d2 = -0.25 / (f * f * f);
        let tangential = if r > 0.0 { d1 / r } else { 0.0 };
        (f, &u * d1, radial_hessian(&u, d2, tangential))
    }

    fn branch_margin(&self, x: &DVector<f64>) -> f64 {
        x.norm()
    }
}

/// `Σ_i |x_i|`.
struct AbsSum;

impl Objective for AbsSum {
    fn value(&self, x: &DVector<f64>) -> f64 {
        x.iter().map(|t| t.abs()).sum()
    }

    fn second_order(&self, x: &DVector<f64>) -> (f64, DVector<f64>, DMatrix<f64>) {
        let n = x.len();
        (self.value(x), x.map(branch_sign), DMatrix::zeros(n, n))
    }

    fn branch_margin(&self, x: &DVector<f64>) -> f64 {
        x.iter().map(|t| t.abs()).fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    #[test]
    fn maxq_registry_entry() {
        let p = get_problem("maxq", 10).unwrap();
        assert_eq!(
            p.x0().as_slice(),
            &[1.0, 2.0, 3.0, 4.0, 5.0, -6.0, -7.0, -8.0, -9.0, -10.0]
        );
        assert_eq!(p.f_star(), Some(0.0));
        assert!(p.is_convex());
        assert_eq!(p.value(&DVector::zeros(10)), 0.0);
    }

    #[test]
    fn model_comparison_example() {
        let p = get_problem("paper_ex_3_6", 1).unwrap();
        assert_eq!(p.x0()[0], 0.1);
        assert_eq!(p.f_star(), None);
        let x = 0.7f64;
        let expected = x.sqrt().max(-4.0 * x.powf(2.5) + x + 1.0);
        assert_eq!(p.value(&dvector![0.7]), expected);
        // near zero the polynomial branch dominates
        assert_eq!(p.value(&dvector![0.0]), 1.0);
    }

    #[test]
    fn chained_lq_minimum_by_grid() {
        let p = get_problem("chained_lq", 2).unwrap();
        let mut best = f64::INFINITY;
        let steps = 2000;
        for i in 0..=steps {
            for j in 0..=steps {
                let a = -2.0 + 4.0 * i as f64 / steps as f64;
                let b = -2.0 + 4.0 * j as f64 / steps as f64;
                best = best.min(p.value(&dvector![a, b]));
            }
        }
        let f_star = p.f_star().unwrap();
        assert!((f_star + 2f64.sqrt()).abs() < 1e-15);
        assert!(best >= f_star - 1e-12 && best - f_star < 1e-3, "{best}");
        let c = 1.0 / 2f64.sqrt();
        let p10 = get_problem("chained_lq", 10).unwrap();
        let at_candidate = p10.value(&DVector::from_element(10, c));
        assert!((at_candidate - p10.f_star().unwrap()).abs() < 1e-12);
    }

    #[test]
    fn shifted_sqrt_is_even() {
        let p = get_problem("paper_ex_4_7", 1).unwrap();
        assert_eq!(p.value(&dvector![0.0]), 0.1f64.sqrt());
        for t in [0.01, 0.3, 2.5] {
            assert_eq!(p.value(&dvector![t]), p.value(&dvector![-t]));
        }
    }

    #[test]
    fn unknown_and_small_dimensions() {
        assert!(matches!(get_problem("nope", 3), Err(Error::UnknownProblem(_))));
        assert!(matches!(
            get_problem("chained_cb3", 1),
            Err(Error::DimensionTooSmall { min: 2, .. })
        ));
        assert!(get_problem("paper_ex_4_7", 1).is_ok());
    }

    #[test]
    fn standard_starting_points() {
        let p = get_problem("chained_crescent1", 4).unwrap();
        assert_eq!(p.x0().as_slice(), &[-1.5, 2.0, -1.5, 2.0]);
        let p = get_problem("absval", 4).unwrap();
        assert_eq!(p.x0().as_slice(), &[0.25, 0.5, 0.75, 1.0]);
        assert_eq!(get_problem("chained_cb3", 3).unwrap().x0().as_slice(), &[2.0; 3]);
        assert_eq!(get_problem("chained_lq", 3).unwrap().x0().as_slice(), &[-0.5; 3]);
    }

    #[test]
    fn every_start_is_finite() {
        for name in problem_names() {
            for n in [2, 10] {
                let p = get_problem(name, n).unwrap();
                assert!(p.value(p.x0()).is_finite(), "{name}");
            }
        }
    }

    #[test]
    fn value_matches_second_order_value() {
        let y = dvector![0.3, -1.1, 0.8, 2.0];
        for name in problem_names() {
            let p = get_problem(name, 4).unwrap();
            let (f, _, _) = p.objective().second_order(&y);
            assert!((f - p.value(&y)).abs() <= 1e-12 * (1.0 + f.abs()), "{name}");
        }
    }
}
