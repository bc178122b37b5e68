//! The finite second-order model: the pointwise maximum of the Taylor
//! expansions of a set of jet elements, restricted to a ball.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::oracle::JetElement;

/// Slack on ball membership of base points.
pub const BALL_MEMBERSHIP_TOL: f64 = 1e-12;

/// A finite set `W` of jet elements around a center `x` with radius `ε`.
#[derive(Clone, Debug)]
pub struct ModelSet {
    center: DVector<f64>,
    radius: f64,
    elements: Vec<JetElement>,
}

impl ModelSet {
    pub fn empty(center: DVector<f64>, radius: f64) -> Self {
        Self { center, radius, elements: Vec::new() }
    }

    /// Builds a model set, checking dimensions, ball membership and
    /// distinctness of base points.
    pub fn new(center: DVector<f64>, radius: f64, elements: Vec<JetElement>) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!("radius must be positive, got {radius}")));
        }
        let set = Self { center, radius, elements };
        for (i, e) in set.elements.iter().enumerate() {
            if e.dim() != set.dim() {
                return Err(Error::DimensionMismatch { expected: set.dim(), got: e.dim() });
            }
            if !set.contains(e.y()) {
                return Err(Error::InvalidParameter(format!(
                    "element {i} lies outside the ball of radius {radius}"
                )));
            }
            if set.elements[..i].iter().any(|o| o.y() == e.y()) {
                return Err(Error::InvalidParameter(format!("element {i} duplicates a base point")));
            }
        }
        Ok(set)
    }

    pub fn center(&self) -> &DVector<f64> {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn elements(&self) -> &[JetElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Whether `y` lies in the closed ball (with [`BALL_MEMBERSHIP_TOL`] slack).
    pub fn contains(&self, y: &DVector<f64>) -> bool {
        (y - &self.center).norm() <= self.radius + BALL_MEMBERSHIP_TOL
    }

    /// Appends an element. The caller guarantees ball membership; a base
    /// point already present is replaced.
    pub fn push(&mut self, jet: JetElement) {
        debug_assert!(self.contains(jet.y()));
        if let Some(slot) = self.elements.iter_mut().find(|e| e.y() == jet.y()) {
            *slot = jet;
        } else {
            self.elements.push(jet);
        }
    }

    /// Shrinks or moves the ball, dropping elements that fall outside it.
    pub fn refilter(&mut self, center: DVector<f64>, radius: f64) {
        self.center = center;
        self.radius = radius;
        let (c, r) = (&self.center, self.radius);
        self.elements.retain(|e| (e.y() - c).norm() <= r + BALL_MEMBERSHIP_TOL);
    }

    /// Model value at `z` together with the lowest index attaining it.
    pub fn eval(&self, z: &DVector<f64>) -> Result<(f64, usize)> {
        let mut best: Option<(f64, usize)> = None;
        for (i, e) in self.elements.iter().enumerate() {
            let v = e.expand(z);
            if best.is_none_or(|(b, _)| v > b) {
                best = Some((v, i));
            }
        }
        best.ok_or(Error::EmptyModel)
    }
}

/// `max_{J ∈ W} f(y) + ξᵀ(z-y) + ½(z-y)ᵀH(z-y)` and its first active index.
pub fn eval_model(w: &ModelSet, z: &DVector<f64>) -> Result<(f64, usize)> {
    w.eval(z)
}

/// Builds the model set for a new center: the fresh jet at `x_new` plus
/// every previous element within `radius` of `x_new`.
///
/// With `cap = Some(k)` at most `k` elements are kept; the survivors
/// farthest from `x_new` are evicted first and `fresh` is never evicted.
pub fn carry_over(
    w_prev: &ModelSet,
    x_new: &DVector<f64>,
    radius: f64,
    fresh: JetElement,
    cap: Option<usize>,
) -> ModelSet {
    debug_assert_eq!(fresh.y(), x_new);
    let mut kept: Vec<(f64, JetElement)> = w_prev
        .elements
        .iter()
        .filter(|e| e.y() != fresh.y())
        .map(|e| ((e.y() - x_new).norm(), e))
        .filter(|(d, _)| *d <= radius + BALL_MEMBERSHIP_TOL)
        .map(|(d, e)| (d, e.clone()))
        .collect();

    if let Some(cap) = cap {
        let room = cap.max(1) - 1;
        if kept.len() > room {
            // stable: among equal distances the older element survives
            let mut order: Vec<usize> = (0..kept.len()).collect();
            order.sort_by(|&a, &b| kept[a].0.total_cmp(&kept[b].0));
            let mut keep = vec![false; kept.len()];
            for &i in order.iter().take(room) {
                keep[i] = true;
            }
            let mut flags = keep.into_iter();
            kept.retain(|_| flags.next().unwrap_or(false));
        }
    }

    let mut elements = Vec::with_capacity(kept.len() + 1);
    elements.push(fresh);
    elements.extend(kept.into_iter().map(|(_, e)| e));
    ModelSet { center: x_new.clone(), radius, elements }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{dmatrix, dvector};

    fn jet1(y: f64, fy: f64, g: f64, h: f64) -> JetElement {
        JetElement::new(dvector![y], fy, dvector![g], dmatrix![h]).unwrap()
    }

    #[test]
    fn single_quadratic_by_substitution() {
        let w = ModelSet::new(dvector![0.0], 2.0, vec![jet1(0.0, 1.0, 2.0, 4.0)]).unwrap();
        assert_eq!(eval_model(&w, &dvector![1.0]).unwrap(), (5.0, 0));
    }

    #[test]
    fn abs_jets_tie_at_the_kink() {
        let w = ModelSet::new(
            dvector![0.0],
            1.0,
            vec![jet1(0.5, 0.5, 1.0, 0.0), jet1(-0.5, 0.5, -1.0, 0.0)],
        )
        .unwrap();
        assert_eq!(eval_model(&w, &dvector![0.0]).unwrap(), (0.0, 0));
    }

    #[test]
    fn shifted_sqrt_jet_at_the_right_boundary() {
        let f = 0.3f64.sqrt();
        let g = -0.5 / f;
        let h = -0.25 / (0.3f64 * f);
        let w = ModelSet::new(dvector![-0.2], 0.5, vec![jet1(-0.2, f, g, h)]).unwrap();
        let (v, _) = eval_model(&w, &dvector![0.3]).unwrap();
        let independent = 0.547_722_557_505_166_1 - 0.912_870_929_175_276_9 * 0.5
            - 0.5 * 1.521_451_548_625_461_6 * 0.25;
        assert!((v - independent).abs() < 1e-12);
        assert!((v + 0.0990).abs() < 5e-4);
    }

    #[test]
    fn empty_model_errors() {
        let w = ModelSet::empty(dvector![0.0], 1.0);
        assert!(matches!(eval_model(&w, &dvector![0.0]), Err(Error::EmptyModel)));
    }

    #[test]
    fn constructor_checks_invariants() {
        assert!(ModelSet::new(dvector![0.0], 0.1, vec![jet1(0.5, 0.0, 0.0, 0.0)]).is_err());
        assert!(ModelSet::new(
            dvector![0.0],
            1.0,
            vec![jet1(0.5, 0.0, 0.0, 0.0), jet1(0.5, 1.0, 0.0, 0.0)]
        )
        .is_err());
        assert!(ModelSet::new(dvector![0.0], 0.0, vec![]).is_err());
    }

    #[test]
    fn carry_over_first_iteration() {
        let prev = ModelSet::empty(dvector![0.0], 1.0);
        let w = carry_over(&prev, &dvector![0.3], 1.0, jet1(0.3, 0.0, 0.0, 0.0), None);
        assert_eq!(w.len(), 1);
        assert_eq!(w.elements()[0].y()[0], 0.3);
    }

    #[test]
    fn carry_over_drops_points_outside_ball() {
        let prev = ModelSet::new(
            dvector![0.0],
            2.0,
            vec![jet1(0.1, 0.0, 0.0, 0.0), jet1(0.9, 0.0, 0.0, 0.0)],
        )
        .unwrap();
        let w = carry_over(&prev, &dvector![0.0], 0.5, jet1(0.0, 0.0, 0.0, 0.0), None);
        let ys: Vec<f64> = w.elements().iter().map(|e| e.y()[0]).collect();
        assert_eq!(ys, vec![0.0, 0.1]);
    }

    #[test]
    fn carry_over_cap_evicts_farthest() {
        // distances from the new center are a permutation of 1..=60 / 100
        let dists: Vec<f64> = (0..60).map(|k| ((k * 37) % 60 + 1) as f64 / 100.0).collect();
        let elems: Vec<JetElement> = dists.iter().map(|&d| jet1(d, 0.0, 0.0, 0.0)).collect();
        let prev = ModelSet::new(dvector![0.0], 1.0, elems).unwrap();
        let w = carry_over(&prev, &dvector![0.0], 1.0, jet1(0.0, 0.0, 0.0, 0.0), Some(50));
        assert_eq!(w.len(), 50);
        assert_eq!(w.elements()[0].y()[0], 0.0);

        // sort oracle: the 49 nearest survive
        let mut sorted = dists.clone();
        sorted.sort_by(f64::total_cmp);
        let mut expected: Vec<f64> = sorted[..49].to_vec();
        let mut got: Vec<f64> = w.elements()[1..].iter().map(|e| e.y()[0]).collect();
        expected.sort_by(f64::total_cmp);
        got.sort_by(f64::total_cmp);
        assert_eq!(got, expected);
    }

    #[test]
    fn refilter_keeps_invariants() {
        let mut w = ModelSet::new(
            dvector![0.0],
            2.0,
            vec![jet1(0.0, 0.0, 0.0, 0.0), jet1(1.5, 0.0, 0.0, 0.0)],
        )
        .unwrap();
        w.refilter(dvector![0.0], 0.2);
        assert_eq!(w.len(), 1);
        assert!(ModelSet::new(w.center().clone(), w.radius(), w.elements().to_vec()).is_ok());
    }

    #[test]
    fn singleton_model_is_exact_on_a_quadratic() {
        let h = dmatrix![2.0, 0.5; 0.5, -1.0];
        let jet = JetElement::new(dvector![0.1, 0.2], 1.5, dvector![0.3, -0.4], h.clone()).unwrap();
        let w = ModelSet::new(dvector![0.0, 0.0], 3.0, vec![jet]).unwrap();
        for k in 0..1000 {
            let t = k as f64 * 0.01;
            let z = dvector![t.sin() * 2.0, (1.7 * t).cos()];
            let d: DVector<f64> = &z - dvector![0.1, 0.2];
            let closed = 1.5 + 0.3 * d[0] - 0.4 * d[1]
                + 0.5 * (2.0 * d[0] * d[0] + 2.0 * 0.5 * d[0] * d[1] - d[1] * d[1]);
            let (v, _) = w.eval(&z).unwrap();
            assert!((v - closed).abs() <= 1e-12 * closed.abs().max(1.0));
        }
    }
}
