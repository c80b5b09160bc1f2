//! Empirical modulus of continuity.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Samples `f` on `samples` uniform points of `[a, b]`.
pub fn sample_uniform<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, samples: usize) -> Result<Vec<f64>> {
    let last = (samples - 1) as f64;
    (0..samples)
        .map(|i| {
            let x = a + (b - a) * (i as f64 / last);
            let y = f(x);
            if y.is_finite() {
                Ok(y)
            } else {
                Err(Error::NonFinite {
                    context: format!("f({x}) = {y}"),
                })
            }
        })
        .collect()
}

/// `max |f(u) - f(v)|` over pairs of sample points at most `window` indices apart.
///
/// Uses monotone deques for the sliding maximum and minimum, so the cost is
/// linear in the number of samples.
pub fn modulus_of_samples(values: &[f64], window: usize) -> f64 {
    let mut maxq: VecDeque<usize> = VecDeque::new();
    let mut minq: VecDeque<usize> = VecDeque::new();
    let mut best = 0.0_f64;
    for (j, &v) in values.iter().enumerate() {
        while maxq.back().is_some_and(|&i| values[i] <= v) {
            maxq.pop_back();
        }
        maxq.push_back(j);
        while minq.back().is_some_and(|&i| values[i] >= v) {
            minq.pop_back();
        }
        minq.push_back(j);
        let lo = j.saturating_sub(window);
        while maxq.front().is_some_and(|&i| i < lo) {
            maxq.pop_front();
        }
        while minq.front().is_some_and(|&i| i < lo) {
            minq.pop_front();
        }
        best = best.max(values[maxq[0]] - values[minq[0]]);
    }
    best
}

/// Number of grid steps of size `(b - a) / (samples - 1)` that fit in `delta`.
pub(crate) fn window_steps(a: f64, b: f64, delta: f64, samples: usize) -> usize {
    let step = (b - a) / (samples - 1) as f64;
    // Relative slack so that delta equal to a whole number of steps is included.
    ((delta / step) * (1.0 + 1e-12)).floor() as usize
}

/// Estimates `ω_f(δ) = sup { |f(u) - f(v)| : |u - v| ≤ δ }` from `samples`
/// uniform points of `[a, b]`. Nondecreasing in `delta` for a fixed sample set.
pub fn estimate_modulus<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    delta: f64,
    samples: usize,
) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    if samples < 2 {
        return Err(Error::InvalidArgument("need at least 2 samples".into()));
    }
    if !(a < b) {
        return Err(Error::InvalidArgument(format!("empty interval [{a}, {b}]")));
    }
    let values = sample_uniform(f, a, b, samples)?;
    Ok(modulus_of_samples(&values, window_steps(a, b, delta, samples)))
}
