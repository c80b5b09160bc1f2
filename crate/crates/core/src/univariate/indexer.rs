//! Sub-interval indexer: maps `x` in cell `k` of a uniform partition to `≈ k`.
//!
//! With `y = n (x - a) / (b - a)` the indexer computes `I = y - q(y)` where `q`
//! is a period-1 correction approximating the sawtooth that makes `I` flat on
//! the middle of every cell. `q` is a fixed combination of triangle waves
//! `σ(2 m y + s)`, `m = 1..=HARMONICS`, `s ∈ {0, 1/2}`, so the same coefficients
//! serve every `n` and the network has width `1 + 2 HARMONICS` and depth 1.

use nalgebra::{DMatrix, DVector};

use super::partition::PartitionPlan;
use super::search::{pattern_search, PatternOptions, SearchBudget};
use crate::activation::euaf;
use crate::error::{Error, Result, Shortfall};
use crate::network::{AffineLayer, FeedforwardNetwork};
use crate::Network;

pub const HARMONICS: usize = 8;
/// Fraction of each cell on which the indexer must be within [`MIDDLE_TOL`] of `k`.
pub const MIDDLE_FRACTION: f64 = 0.8;
pub const MIDDLE_TOL: f64 = 0.25;

const COLLAR: f64 = (1.0 - MIDDLE_FRACTION) / 2.0;
const FIT_POINTS: usize = 2000;
const PHASES: [f64; 2] = [0.0, 0.5];
const CORRECTION_EVALS: usize = 4000;

/// The staircase residual `y - S(y)` on one period, where `S` equals `k` on
/// the middle of cell `k` and ramps linearly across the collars.
fn sawtooth_target(p: f64) -> f64 {
    let p = p.rem_euclid(1.0);
    let top = 1.0 - COLLAR;
    let drop = (top - COLLAR) / (2.0 * COLLAR);
    if p > top {
        top - drop * (p - top)
    } else if p < COLLAR {
        top - drop * (p + 1.0 - top)
    } else {
        p
    }
}

fn basis(p: f64) -> impl Iterator<Item = f64> {
    std::iter::once(1.0).chain(
        (1..=HARMONICS).flat_map(move |m| PHASES.iter().map(move |s| euaf(2.0 * m as f64 * p + s))),
    )
}

/// Coefficients `[c_0, c_{1,0}, c_{1,1/2}, ...]` of the periodic correction, and
/// the number of search evaluations spent refining them.
pub fn periodic_correction(search: &SearchBudget) -> (Vec<f64>, usize) {
    let grid: Vec<f64> = (0..FIT_POINTS).map(|i| i as f64 / FIT_POINTS as f64).collect();
    let cols = 1 + 2 * HARMONICS;
    let rows: Vec<Vec<f64>> = grid.iter().map(|&p| basis(p).collect()).collect();
    let a = DMatrix::from_fn(grid.len(), cols, |i, j| rows[i][j]);
    let rhs = DVector::from_iterator(grid.len(), grid.iter().map(|&p| sawtooth_target(p)));
    let coeffs: Vec<f64> = a
        .svd(true, true)
        .solve(&rhs, 1e-12)
        .expect("svd with both factors")
        .iter()
        .copied()
        .collect();

    // Least squares leaves a nonuniform error; refine toward the minimax fit.
    let objective = |c: &[f64]| {
        rows.iter()
            .zip(&grid)
            .map(|(row, &p)| {
                let q: f64 = row.iter().zip(c).map(|(b, w)| b * w).sum();
                (q - sawtooth_target(p)).abs()
            })
            .fold(0.0, f64::max)
    };
    let out = pattern_search(
        objective,
        &[coeffs],
        PatternOptions {
            initial_step: 1e-2,
            min_step: 1e-6,
            target: 0.0,
            max_evals: CORRECTION_EVALS.min(search.max_evals),
        },
    );
    (out.best, out.evals)
}

/// Builds the indexer network for `plan` (input `x`, output `≈ k`).
pub fn build_indexer(plan: &PartitionPlan, search: &SearchBudget) -> Result<Network> {
    build_indexer_counted(plan, search).map(|(net, _)| net)
}

/// [`build_indexer`] that also reports the search evaluations spent.
pub fn build_indexer_counted(plan: &PartitionPlan, search: &SearchBudget) -> Result<(Network, usize)> {
    let n = plan.n;
    if n == 1 {
        let net = FeedforwardNetwork::constant(1, 0.0)?;
        return Ok((net.with_metadata("role", "indexer"), 0));
    }
    let (coeffs, evals) = periodic_correction(search);
    let net = indexer_network(plan, &coeffs)?;
    let (deviation, collar_ok) = check_indexer(&net, plan);
    if deviation < MIDDLE_TOL && collar_ok {
        Ok((net, evals))
    } else {
        Err(Error::Shortfall(Box::new(Shortfall {
            network: net,
            deviation,
            evals,
        })))
    }
}

fn indexer_network(plan: &PartitionPlan, coeffs: &[f64]) -> Result<Network> {
    let n = plan.n as f64;
    let inv_len = 1.0 / (plan.b - plan.a);
    let mut w = vec![inv_len];
    let mut bias = vec![-plan.a * inv_len];
    let mut out = vec![n];
    for m in 1..=HARMONICS {
        for (s_idx, s) in PHASES.iter().enumerate() {
            let scale = 2.0 * m as f64 * n * inv_len;
            w.push(scale);
            bias.push(s - scale * plan.a);
            out.push(-coeffs[1 + 2 * (m - 1) + s_idx]);
        }
    }
    let width = w.len();
    let layers = vec![
        AffineLayer::new(width, 1, w, bias, true)?,
        AffineLayer::new(1, width, out, vec![-coeffs[0]], false)?,
    ];
    Ok(FeedforwardNetwork::new(1, layers)?.with_metadata("role", "indexer"))
}

/// Max deviation `|I(x) - k|` on the middle of each cell, and whether
/// `round(I(x)) ∈ {k - 1, k, k + 1}` on the collars.
pub fn check_indexer(net: &Network, plan: &PartitionPlan) -> (f64, bool) {
    const MIDDLE_PROBES: usize = 9;
    const COLLAR_PROBES: usize = 3;
    let h = plan.width();
    let mut deviation = 0.0_f64;
    let mut collar_ok = true;
    for k in 0..plan.n {
        let left = plan.a + h * k as f64;
        let kf = k as f64;
        for i in 0..MIDDLE_PROBES {
            let t = COLLAR + (1.0 - 2.0 * COLLAR) * i as f64 / (MIDDLE_PROBES - 1) as f64;
            let v = net.evaluate_scalar(left + h * t).unwrap_or(f64::INFINITY);
            deviation = deviation.max((v - kf).abs());
        }
        for i in 0..=COLLAR_PROBES {
            let t = COLLAR * i as f64 / COLLAR_PROBES as f64;
            for x in [left + h * t, left + h * (1.0 - t)] {
                let v = net.evaluate_scalar(x.min(plan.b)).unwrap_or(f64::INFINITY);
                if (v.round() - kf).abs() > 1.0 {
                    collar_ok = false;
                }
            }
        }
    }
    (deviation, collar_ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(n: usize) -> PartitionPlan {
        PartitionPlan::uniform(|x| x, 0.0, 1.0, n).unwrap()
    }

    #[test]
    fn single_cell_is_constant_zero() {
        let net = build_indexer(&plan(1), &SearchBudget::default()).unwrap();
        assert_eq!(net.depth(), 0);
        assert_eq!(net.evaluate_scalar(0.7).unwrap(), 0.0);
    }

    #[test]
    fn two_cells() {
        let net = build_indexer(&plan(2), &SearchBudget::default()).unwrap();
        assert!(net.evaluate_scalar(0.2).unwrap().abs() < 0.25);
        assert!((net.evaluate_scalar(0.8).unwrap() - 1.0).abs() < 0.25);
        assert!(net.width() <= 36 && net.depth() <= 2);
    }

    #[test]
    fn eight_cells_round_at_midpoints() {
        let p = plan(8);
        let net = build_indexer(&p, &SearchBudget::default()).unwrap();
        for k in 0..8 {
            let mid = (k as f64 + 0.5) / 8.0;
            assert_eq!(net.evaluate_scalar(mid).unwrap().round() as usize, k);
        }
    }

    #[test]
    fn large_partition_on_shifted_domain() {
        let p = PartitionPlan::uniform(|x| x, -3.0, 5.0, 1000).unwrap();
        let net = build_indexer(&p, &SearchBudget::default()).unwrap();
        let (dev, collar) = check_indexer(&net, &p);
        assert!(dev < MIDDLE_TOL && collar, "dev={dev}");
    }

    #[test]
    fn correction_is_accurate() {
        let (c, evals) = periodic_correction(&SearchBudget::default());
        assert!(evals <= CORRECTION_EVALS);
        let worst = (0..1000)
            .map(|i| i as f64 / 1000.0)
            .map(|p| (basis(p).zip(&c).map(|(b, w)| b * w).sum::<f64>() - sawtooth_target(p)).abs())
            .fold(0.0, f64::max);
        assert!(worst < 0.05, "{worst}");
    }
}
