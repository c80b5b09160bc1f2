//! Uniform partition of `[a, b]` driven by the modulus of continuity.

use serde::Serialize;

use super::modulus::{modulus_of_samples, sample_uniform};
use crate::error::{Error, Result};

/// Default cap on the number of sub-intervals.
pub const DEFAULT_MAX_INTERVALS: usize = 4096;

/// Minimum number of sample points per sub-interval when estimating the modulus.
const SAMPLES_PER_INTERVAL: usize = 8;
/// Minimum total sample count.
const BASE_SAMPLES: usize = 2000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionPlan {
    pub a: f64,
    pub b: f64,
    pub n: usize,
    pub breakpoints: Vec<f64>,
    /// `f` at each sub-interval midpoint.
    pub values: Vec<f64>,
}

impl PartitionPlan {
    /// Uniform plan with `n` cells and midpoint values of `f`.
    pub fn uniform<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> Result<Self> {
        if n == 0 || !(a < b) {
            return Err(Error::InvalidArgument(format!("bad partition n={n} on [{a}, {b}]")));
        }
        let h = (b - a) / n as f64;
        let breakpoints = (0..=n)
            .map(|k| if k == n { b } else { a + h * k as f64 })
            .collect();
        let values = (0..n)
            .map(|k| {
                let x = a + h * (k as f64 + 0.5);
                let y = f(x);
                if y.is_finite() {
                    Ok(y)
                } else {
                    Err(Error::NonFinite {
                        context: format!("f({x}) = {y}"),
                    })
                }
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            a,
            b,
            n,
            breakpoints,
            values,
        })
    }

    pub fn width(&self) -> f64 {
        (self.b - self.a) / self.n as f64
    }
}

/// Smallest `n ≤ max_intervals` with `ω_f((b - a) / n) < ε / 2`.
///
/// The modulus for each candidate `n` is estimated on a grid aligned with the
/// partition (a whole number of samples per cell, at least
/// `SAMPLES_PER_INTERVAL`). A modulus equal to `ε / 2` up to rounding does not
/// pass.
pub fn choose_partition<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    eps: f64,
    max_intervals: usize,
) -> Result<PartitionPlan> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {eps}")));
    }
    if !(a < b) {
        return Err(Error::InvalidArgument(format!("empty interval [{a}, {b}]")));
    }
    let budget = eps / 2.0;
    let slack = 1e-12 * budget.max(1.0);
    let mut cache: Option<(usize, Vec<f64>)> = None;
    for n in 1..=max_intervals {
        let per_cell = SAMPLES_PER_INTERVAL.max(BASE_SAMPLES.div_ceil(n));
        let samples = n * per_cell + 1;
        // Reuse the sample set while the grid is unchanged.
        if cache.as_ref().is_none_or(|(s, _)| *s != samples) {
            cache = Some((samples, sample_uniform(&f, a, b, samples)?));
        }
        let values = &cache.as_ref().expect("filled").1;
        let omega = modulus_of_samples(values, per_cell);
        if omega + slack < budget {
            return PartitionPlan::uniform(&f, a, b, n);
        }
    }
    Err(Error::Infeasible(format!(
        "no partition with at most {max_intervals} cells reaches modulus < {budget}"
    )))
}
