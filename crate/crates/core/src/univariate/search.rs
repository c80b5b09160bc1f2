//! Multi-start coordinate pattern search.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Budget for derivative-free search, counted in objective evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_evals: usize,
    /// Number of random restarts in addition to the deterministic starts.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            max_evals: 200_000,
            restarts: 4,
            seed: 0,
        }
    }
}

impl SearchBudget {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub best: Vec<f64>,
    pub value: f64,
    pub evals: usize,
}

/// Options for [`pattern_search`].
#[derive(Debug, Clone, Copy)]
pub struct PatternOptions {
    pub initial_step: f64,
    pub min_step: f64,
    /// Stop as soon as the objective drops strictly below this value.
    pub target: f64,
    pub max_evals: usize,
}

/// Minimizes `objective` from each start in turn, splitting the evaluation
/// budget evenly. Each run is a compass search: every coordinate is probed at
/// `±step`, non-worsening moves are accepted greedily, and the step halves
/// after a sweep without strict progress.
pub fn pattern_search<F>(mut objective: F, starts: &[Vec<f64>], opts: PatternOptions) -> SearchOutcome
where
    F: FnMut(&[f64]) -> f64,
{
    assert!(!starts.is_empty(), "pattern_search needs a start");
    let mut evals = 0;
    let mut best: Option<(Vec<f64>, f64)> = None;
    for (s, start) in starts.iter().enumerate() {
        let remaining_starts = starts.len() - s;
        let share = (opts.max_evals.saturating_sub(evals)) / remaining_starts;
        if share == 0 {
            break;
        }
        let limit = evals + share;
        let mut x = start.clone();
        let mut fx = objective(&x);
        evals += 1;
        let mut step = opts.initial_step;
        while fx >= opts.target && step >= opts.min_step && evals < limit {
            let mut improved = false;
            for i in 0..x.len() {
                if evals >= limit || fx < opts.target {
                    break;
                }
                for dir in [1.0, -1.0] {
                    let old = x[i];
                    x[i] = old + dir * step;
                    let f = objective(&x);
                    evals += 1;
                    // Sideways moves are kept so ties in max-type objectives can break;
                    // only strict decreases count as progress.
                    if f <= fx {
                        improved |= f < fx;
                        fx = f;
                        break;
                    }
                    x[i] = old;
                    if evals >= limit {
                        break;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        if best.as_ref().is_none_or(|(_, fb)| fx < *fb) {
            best = Some((x, fx));
        }
        if best.as_ref().is_some_and(|(_, fb)| *fb < opts.target) {
            break;
        }
    }
    let (best, value) = best.expect("at least one start ran");
    SearchOutcome { best, value, evals }
}

/// `count` copies of `base` with uniform jitter of half-width `scale`.
pub fn jittered_starts(base: &[f64], count: usize, scale: f64, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| base.iter().map(|v| v + rng.gen_range(-scale..=scale)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(target: f64, max_evals: usize) -> PatternOptions {
        PatternOptions {
            initial_step: 0.5,
            min_step: 1e-10,
            target,
            max_evals,
        }
    }

    #[test]
    fn minimizes_quadratic() {
        let f = |x: &[f64]| (x[0] - 1.5).powi(2) + (x[1] + 0.25).powi(2);
        let out = pattern_search(f, &[vec![0.0, 0.0]], opts(1e-12, 10_000));
        assert!(out.value < 1e-12);
        assert!((out.best[0] - 1.5).abs() < 1e-6);
        assert!(out.evals <= 10_000);
    }

    #[test]
    fn respects_budget() {
        let f = |x: &[f64]| x.iter().map(|v| v.abs()).sum::<f64>();
        let out = pattern_search(f, &[vec![3.0; 5], vec![-2.0; 5]], opts(-1.0, 57));
        assert!(out.evals <= 57);
    }

    #[test]
    fn minimax_objective() {
        // max |x_i - i| is nonsmooth
        let f = |x: &[f64]| x.iter().enumerate().map(|(i, v)| (v - i as f64).abs()).fold(0.0, f64::max);
        let out = pattern_search(f, &[vec![0.0; 4]], opts(1e-6, 50_000));
        assert!(out.value < 1e-6, "{}", out.value);
    }

    #[test]
    fn deterministic_jitter() {
        let b = SearchBudget::with_seed(7);
        let a1 = jittered_starts(&[0.0, 1.0], 3, 0.1, &mut b.rng(1));
        let a2 = jittered_starts(&[0.0, 1.0], 3, 0.1, &mut b.rng(1));
        assert_eq!(a1, a2);
        assert_ne!(a1, jittered_starts(&[0.0, 1.0], 3, 0.1, &mut b.rng(2)));
    }
}
