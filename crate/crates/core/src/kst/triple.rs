//! Synthetic representation triples `(g, h, λ)` that define a `d`-variate target.

use std::fmt;
use std::sync::Arc;

use super::compose::{rescale_maps, validate_lambda};
use crate::error::{Error, Result};
use crate::width_bound::ScalarFn;

const CHECK_POINTS: usize = 1001;

/// `f(x) = Σ_{i=1}^{2d+1} g(Σ_j λ_j h_i(x_j))` for `x ∈ [0, 1]^d`.
#[derive(Clone)]
pub struct SyntheticKstTriple {
    g: ScalarFn,
    h: Vec<ScalarFn>,
    lambda: Vec<f64>,
}

impl fmt::Debug for SyntheticKstTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SyntheticKstTriple")
            .field("d", &self.d())
            .field("lambda", &self.lambda)
            .finish_non_exhaustive()
    }
}

impl SyntheticKstTriple {
    /// Validates `λ`, the branch count, and that each `h_i` is strictly
    /// increasing with values in `[0, 1]` on a check grid.
    pub fn new(g: ScalarFn, h: Vec<ScalarFn>, lambda: Vec<f64>) -> Result<Self> {
        validate_lambda(&lambda)?;
        let d = lambda.len();
        if h.len() != 2 * d + 1 {
            return Err(Error::DimensionMismatch {
                expected: 2 * d + 1,
                got: h.len(),
                context: "inner function count".into(),
            });
        }
        for (i, hi) in h.iter().enumerate() {
            let mut prev = f64::NEG_INFINITY;
            for k in 0..CHECK_POINTS {
                let x = k as f64 / (CHECK_POINTS - 1) as f64;
                let y = hi(x);
                if !(-1e-12..=1.0 + 1e-12).contains(&y) {
                    return Err(Error::InvalidArgument(format!("h_{i}({x}) = {y} is outside [0, 1]")));
                }
                if y <= prev {
                    return Err(Error::InvalidArgument(format!("h_{i} is not strictly increasing near {x}")));
                }
                prev = y;
            }
        }
        for k in 0..CHECK_POINTS {
            let z = k as f64 / (CHECK_POINTS - 1) as f64;
            if !g(z).is_finite() {
                return Err(Error::NonFinite {
                    context: format!("g({z})"),
                });
            }
        }
        Ok(Self { g, h, lambda })
    }

    /// `g(z) = z`, `h_i(x) = x`, `λ_j = 1/d`. Induced `f(x) = (2d + 1)·mean(x)`.
    pub fn identity(d: usize) -> Result<Self> {
        let id: ScalarFn = Arc::new(|x| x);
        Self::new(id.clone(), vec![id; 2 * d + 1], vec![1.0 / d.max(1) as f64; d])
    }

    /// `g(z) = z²`, `h_i(x) = x^{1 + i/6}` for `i = 1, ..., 2d + 1`, `λ_j = 1/d`.
    pub fn power(d: usize) -> Result<Self> {
        let h = (1..=2 * d + 1)
            .map(|i| {
                let p = 1.0 + i as f64 / 6.0;
                Arc::new(move |x: f64| x.max(0.0).powf(p)) as ScalarFn
            })
            .collect();
        Self::new(Arc::new(|z| z * z), h, vec![1.0 / d.max(1) as f64; d])
    }

    pub fn d(&self) -> usize {
        self.lambda.len()
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn g(&self, z: f64) -> f64 {
        (self.g)(z)
    }

    pub fn h(&self, i: usize, x: f64) -> f64 {
        (self.h[i])(x)
    }

    pub fn g_fn(&self) -> ScalarFn {
        self.g.clone()
    }

    pub fn h_fn(&self, i: usize) -> ScalarFn {
        self.h[i].clone()
    }

    /// Branch arguments `Σ_j λ_j h_i(x_j)` for `x ∈ [0, 1]^d`.
    pub fn arguments(&self, x: &[f64]) -> Vec<f64> {
        (0..self.h.len())
            .map(|i| self.lambda.iter().zip(x).map(|(l, &t)| l * self.h(i, t)).sum())
            .collect()
    }

    /// Induced function on `[0, 1]^d`.
    pub fn induced(&self, x: &[f64]) -> f64 {
        self.arguments(x).into_iter().map(|s| self.g(s)).sum()
    }

    /// Induced function on `[a, b]^d`, reached through the forward rescaling.
    pub fn induced_on(&self, x: &[f64], a: f64, b: f64) -> Result<f64> {
        let (forward, _) = rescale_maps(a, b)?;
        let unit: Vec<f64> = x.iter().map(|&t| forward.apply(t)).collect();
        Ok(self.induced(&unit))
    }
}
