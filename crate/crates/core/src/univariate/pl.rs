//! Continuous piecewise-linear functions and their exact EUAF realization.
//!
//! On `[0, 2]` the EUAF is the tent `1 - |t - 1|`, so for `|y - c| ≤ R`
//!
//! ```text
//! |y - c| = R (1 - σ((y - c) / R + 1)).
//! ```
//!
//! A piecewise-linear function that is flat outside its knots is a constant
//! plus a combination of such absolute values, one hidden neuron per knot.

use crate::error::{Error, Result};
use crate::network::{AffineLayer, FeedforwardNetwork};
use crate::Network;

/// Piecewise-linear interpolant through `(knots[j], values[j])`, constant
/// beyond the first and last knot.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    knots: Vec<f64>,
    values: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.is_empty() || knots.len() != values.len() {
            return Err(Error::InvalidArgument(format!(
                "{} knots with {} values",
                knots.len(),
                values.len()
            )));
        }
        if !knots.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument("knots must be strictly increasing".into()));
        }
        if knots.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "piecewise-linear parameters".into(),
            });
        }
        Ok(Self { knots, values })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eval(&self, x: f64) -> f64 {
        let j = self.knots.partition_point(|&c| c <= x);
        if j == 0 {
            return self.values[0];
        }
        if j == self.knots.len() {
            return self.values[j - 1];
        }
        let (c0, c1) = (self.knots[j - 1], self.knots[j]);
        let (v0, v1) = (self.values[j - 1], self.values[j]);
        v0 + (v1 - v0) * ((x - c0) / (c1 - c0))
    }

    /// Range of the function (attained at knots).
    pub fn range(&self) -> (f64, f64) {
        let lo = self.values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    /// Realizes the function as a one-hidden-layer network, exact for inputs in
    /// `[lo, hi]`. Uses one neuron per knot (none for a single knot).
    pub fn to_network(&self, lo: f64, hi: f64) -> Result<Network> {
        let m = self.knots.len();
        if m == 1 {
            return FeedforwardNetwork::constant(1, self.values[0]);
        }
        let left = lo.min(self.knots[0]);
        let right = hi.max(self.knots[m - 1]);
        let radius = right - left;
        // slopes[j] is the slope right of knot j; flat outside.
        let mut slopes = vec![0.0; m + 1];
        for j in 0..m - 1 {
            slopes[j + 1] = (self.values[j + 1] - self.values[j]) / (self.knots[j + 1] - self.knots[j]);
        }
        let gammas: Vec<f64> = (0..m).map(|j| slopes[j + 1] - slopes[j]).collect();
        // g(y) = v_0 - Σ γ_j c_j / 2 + Σ γ_j |y - c_j| / 2
        let mut constant = self.values[0];
        for (g, c) in gammas.iter().zip(&self.knots) {
            constant += g * (radius - c) / 2.0;
        }
        let hidden_w = vec![1.0 / radius; m];
        let hidden_b: Vec<f64> = self.knots.iter().map(|c| 1.0 - c / radius).collect();
        let out_w: Vec<f64> = gammas.iter().map(|g| -g * radius / 2.0).collect();
        let layers = vec![
            AffineLayer::new(m, 1, hidden_w, hidden_b, true)?,
            AffineLayer::new(1, m, out_w, vec![constant], false)?,
        ];
        FeedforwardNetwork::new(1, layers)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn flat_extension() {
        let p = PiecewiseLinear::new(vec![0.0, 1.0], vec![2.0, 4.0]).unwrap();
        assert_eq!(p.eval(-3.0), 2.0);
        assert_eq!(p.eval(0.5), 3.0);
        assert_eq!(p.eval(9.0), 4.0);
    }

    #[test]
    fn rejects_unsorted() {
        assert!(PiecewiseLinear::new(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(PiecewiseLinear::new(vec![0.0], vec![]).is_err());
    }

    #[test]
    fn single_knot_is_constant() {
        let net = PiecewiseLinear::new(vec![0.5], vec![0.3]).unwrap().to_network(0.0, 1.0).unwrap();
        assert_eq!(net.depth(), 0);
        assert_eq!(net.evaluate_scalar(0.9).unwrap(), 0.3);
    }

    proptest! {
        #[test]
        fn network_matches_interpolant(
            raw in prop::collection::vec((0.01f64..1.0, -3.0f64..3.0), 1..20),
            probe in prop::collection::vec(0.0f64..1.0, 20),
        ) {
            let mut x = -2.0;
            let mut knots = Vec::new();
            let mut values = Vec::new();
            for (dx, v) in raw {
                x += dx;
                knots.push(x);
                values.push(v);
            }
            let p = PiecewiseLinear::new(knots.clone(), values).unwrap();
            let (lo, hi) = (-3.0, x + 1.0);
            let net = p.to_network(lo, hi).unwrap();
            for t in probe {
                let y = lo + (hi - lo) * t;
                let want = p.eval(y);
                let got = net.evaluate_scalar(y).unwrap();
                prop_assert!((want - got).abs() < 1e-9, "y={} want={} got={}", y, want, got);
            }
        }
    }
}
