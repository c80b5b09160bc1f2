//! Error budget derived from the uniform continuity of the outer function.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::univariate::modulus::{modulus_of_samples, sample_uniform};

/// Default number of samples of `g` on `[0, 1]`.
pub const BUDGET_SAMPLES: usize = 10_000;
/// Smallest usable `δ`.
pub const MIN_DELTA: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorBudget {
    pub epsilon: f64,
    /// `ε / (2(2d + 1))`, the tolerance for the outer network.
    pub per_term_outer_tol: f64,
    /// Tolerance for each inner network: `|g(z₁) - g(z₂)| < per_term_outer_tol`
    /// whenever `|z₁ - z₂| ≤ delta` (empirically).
    pub delta: f64,
}

/// Splits `eps` across the `2d + 1` branches and finds the largest sampled
/// `δ ≤ 1` whose empirical modulus of `g` stays below the per-term tolerance.
pub fn compute_budget<G: Fn(f64) -> f64>(g: G, d: usize, eps: f64, samples: usize) -> Result<ErrorBudget> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {eps}")));
    }
    if d == 0 {
        return Err(Error::InvalidArgument("d must be at least 1".into()));
    }
    if samples < 2 {
        return Err(Error::InvalidArgument("need at least two samples".into()));
    }
    let per_term = eps / (2.0 * (2 * d + 1) as f64);
    let values = sample_uniform(&g, 0.0, 1.0, samples)?;
    let step = 1.0 / (samples - 1) as f64;
    let passes = |w: usize| modulus_of_samples(&values, w) + 1e-12 * per_term.max(1.0) < per_term;

    let mut lo = 0;
    let mut hi = samples - 1;
    if passes(hi) {
        lo = hi;
    } else {
        // Invariant: passes(lo) and !passes(hi).
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if passes(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    let delta = (lo as f64 * step).min(1.0);
    if delta < MIN_DELTA {
        return Err(Error::Infeasible(format!(
            "g varies by more than {per_term} within one sample step {step}; no usable delta"
        )));
    }
    Ok(ErrorBudget {
        epsilon: eps,
        per_term_outer_tol: per_term,
        delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn per_term_split() {
        let b = compute_budget(|z| z, 2, 0.1, BUDGET_SAMPLES).unwrap();
        assert!((b.per_term_outer_tol - 0.01).abs() < 1e-15);
    }

    #[test]
    fn constant_caps_delta() {
        let b = compute_budget(|_| 0.4, 3, 0.1, BUDGET_SAMPLES).unwrap();
        assert_eq!(b.delta, 1.0);
    }

    #[test]
    fn lipschitz_inversion() {
        let b = compute_budget(|z| z, 1, 0.6, BUDGET_SAMPLES).unwrap();
        assert!((b.per_term_outer_tol - 0.1).abs() < 1e-15);
        assert!((b.delta - 0.1).abs() < 1e-3, "delta {}", b.delta);
        assert!(b.delta < 0.1);
    }

    #[test]
    fn delta_respects_modulus() {
        let g = |z: f64| z * z;
        let b = compute_budget(g, 2, 0.3, BUDGET_SAMPLES).unwrap();
        let omega = crate::univariate::estimate_modulus(g, 0.0, 1.0, b.delta, 100_001).unwrap();
        assert!(omega < b.per_term_outer_tol + 1e-4);
        assert!(b.delta > 0.01);
    }

    #[test]
    fn errors() {
        assert!(compute_budget(|z| z, 1, 0.0, 100).is_err());
        assert!(compute_budget(|z| z, 0, 0.1, 100).is_err());
        let steep = |z: f64| (z * 1e7).sin();
        assert!(matches!(compute_budget(steep, 1, 0.01, BUDGET_SAMPLES), Err(Error::Infeasible(_))));
    }
}
