#![allow(dead_code)]

use std::path::PathBuf;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use sojet::{check_derivatives, get_problem, JetElement, ModelSet};

pub const REGISTRY_NAMES: [&str; 10] = [
    "maxq",
    "mxhilb",
    "chained_lq",
    "chained_cb3",
    "active_faces",
    "chained_mifflin2",
    "chained_crescent1",
    "paper_ex_3_6",
    "paper_ex_4_7",
    "absval",
];

pub fn default_config_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/default.json")
}

/// Random symmetric matrix with eigenvalues in [-3, 3].
pub fn random_hessian(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    if n == 1 {
        return DMatrix::from_element(1, 1, rng.random_range(-3.0..=3.0));
    }
    let angle: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let q = DMatrix::from_row_slice(2, 2, &[angle.cos(), -angle.sin(), angle.sin(), angle.cos()]);
    let d = DMatrix::from_diagonal(&DVector::from_fn(2, |_, _| rng.random_range(-3.0..=3.0)));
    &q * d * q.transpose()
}

/// A 1-D or 2-D model with up to five random elements inside a random ball.
pub fn random_instance(rng: &mut ChaCha8Rng) -> ModelSet {
    let n = rng.random_range(1..=2);
    let eps = rng.random_range(0.1..=2.0);
    let x = DVector::from_fn(n, |_, _| rng.random_range(-1.0..=1.0));
    let size = rng.random_range(1..=5);
    let mut elements = Vec::new();
    while elements.len() < size {
        let offset = DVector::from_fn(n, |_, _| rng.random_range(-1.0..=1.0)) * eps;
        if offset.norm() > eps {
            continue;
        }
        let y = &x + offset;
        let xi = DVector::from_fn(n, |_, _| rng.random_range(-2.0..=2.0));
        let fy = rng.random_range(-1.0..=1.0);
        elements.push(JetElement::new(y, fy, xi, random_hessian(rng, n)).unwrap());
    }
    ModelSet::new(x, eps, elements).unwrap()
}

/// Up to eight random gradients in dimension at most five.
pub fn random_bundle(rng: &mut ChaCha8Rng) -> Vec<DVector<f64>> {
    let n = rng.random_range(1..=5);
    let k = rng.random_range(1..=8);
    (0..k).map(|_| DVector::from_fn(n, |_, _| rng.random_range(-3.0..=3.0))).collect()
}

/// Worst gradient and Hessian errors over 100 random points of each problem
/// (n = 4) that lie at least `min_margin` away from a branch switch.
pub fn worst_derivative_errors(rng: &mut ChaCha8Rng, name: &str, min_margin: f64) -> (f64, f64) {
    let p = get_problem(name, 4).unwrap();
    let mut worst = (0.0f64, 0.0f64);
    let mut accepted = 0;
    while accepted < 100 {
        let y = DVector::from_fn(4, |_, _| rng.random_range(-2.0..=2.0));
        if p.objective().branch_margin(&y) < min_margin {
            continue;
        }
        accepted += 1;
        let r = check_derivatives(&p, &y, 1e-6);
        worst.0 = worst.0.max(r.grad_rel_err);
        worst.1 = worst.1.max(r.hess_rel_err);
    }
    worst
}
