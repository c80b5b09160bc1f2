//! Index-to-value decoder.

use super::pl::PiecewiseLinear;
use super::search::{pattern_search, PatternOptions, SearchBudget};
use crate::error::{Error, Result, Shortfall};
use crate::network::{AffineLayer, FeedforwardNetwork};
use crate::Network;

/// Maximum hidden width available to the decoder.
pub const DECODER_WIDTH: usize = 36;
/// Inputs within this distance of an integer `k` must decode to `values[k]`.
pub const NOISE_RADIUS: f64 = 0.25;

/// Largest `n` the exact plateau construction handles: `2 (n - 1)` knots.
pub const fn plateau_capacity() -> usize {
    DECODER_WIDTH / 2 + 1
}

/// Offsets probed around each integer when checking the decoder.
const PROBES: [f64; 5] = [-NOISE_RADIUS, -NOISE_RADIUS / 2.0, 0.0, NOISE_RADIUS / 2.0, NOISE_RADIUS];

/// Builds `D` with `|D(y) - values[k]| < tol` whenever `|y - k| ≤ 1/4`.
///
/// Up to [`plateau_capacity`] values the decoder is an exact plateau function:
/// constant on `[k - 1/4, k + 1/4]`, linear in between. Beyond that the
/// 36-knot interpolant is refined by pattern search and may fall short, in
/// which case the best network is returned inside [`Error::Shortfall`].
pub fn fit_point_values(values: &[f64], tol: f64, search: &SearchBudget) -> Result<Network> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    if values.is_empty() {
        return Err(Error::InvalidArgument("no values to decode".into()));
    }
    if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::InvalidArgument(format!("value {v} outside [0, 1]")));
    }
    let n = values.len();
    if values.iter().all(|&v| v == values[0]) {
        // One neuron σ(v) = v, valid since v ∈ [0, 1].
        let layers = vec![
            AffineLayer::new(1, 1, vec![0.0], vec![values[0]], true)?,
            AffineLayer::new(1, 1, vec![1.0], vec![0.0], false)?,
        ];
        return Ok(FeedforwardNetwork::new(1, layers)?.with_metadata("role", "decoder"));
    }
    let (lo, hi) = (-2.0, n as f64 + 1.0);
    if n <= plateau_capacity() {
        let mut knots = Vec::with_capacity(2 * (n - 1));
        let mut vals = Vec::with_capacity(2 * (n - 1));
        for (k, &v) in values.iter().enumerate() {
            if k > 0 {
                knots.push(k as f64 - NOISE_RADIUS);
                vals.push(v);
            }
            if k + 1 < n {
                knots.push(k as f64 + NOISE_RADIUS);
                vals.push(v);
            }
        }
        let net = PiecewiseLinear::new(knots, vals)?.to_network(lo, hi)?;
        let dev = decoder_deviation(&net, values);
        let net = net.with_metadata("role", "decoder");
        return if dev < tol {
            Ok(net)
        } else {
            Err(Error::Shortfall(Box::new(Shortfall {
                network: net,
                deviation: dev,
                evals: 0,
            })))
        };
    }

    // Best effort: DECODER_WIDTH uniformly placed knots, values refined by search.
    let last = (n - 1) as f64;
    let knots: Vec<f64> = (0..DECODER_WIDTH)
        .map(|j| last * j as f64 / (DECODER_WIDTH - 1) as f64)
        .collect();
    let interp = |y: f64| {
        let k = (y.floor() as usize).min(n - 2);
        let t = y - k as f64;
        values[k] * (1.0 - t) + values[k + 1] * t
    };
    let start: Vec<f64> = knots.iter().map(|&y| interp(y)).collect();
    let probes: Vec<(f64, f64)> = values
        .iter()
        .enumerate()
        .flat_map(|(k, &v)| PROBES.iter().map(move |o| (k as f64 + o, v)))
        .collect();
    let objective = |vals: &[f64]| match PiecewiseLinear::new(knots.clone(), vals.to_vec()) {
        Ok(p) => probes.iter().map(|&(y, v)| (p.eval(y) - v).abs()).fold(0.0, f64::max),
        Err(_) => f64::INFINITY,
    };
    let out = pattern_search(
        objective,
        &[start],
        PatternOptions {
            initial_step: 0.1,
            min_step: 1e-9,
            target: tol,
            max_evals: search.max_evals,
        },
    );
    let best: Vec<f64> = out.best.iter().map(|v| v.clamp(0.0, 1.0)).collect();
    let net = PiecewiseLinear::new(knots, best)?
        .to_network(lo, hi)?
        .with_metadata("role", "decoder");
    let dev = decoder_deviation(&net, values);
    if dev < tol {
        Ok(net)
    } else {
        Err(Error::Shortfall(Box::new(Shortfall {
            network: net,
            deviation: dev,
            evals: out.evals,
        })))
    }
}

/// `max |D(k + t) - values[k]|` over `|t| ≤ 1/4` (probed at five offsets).
pub fn decoder_deviation(net: &Network, values: &[f64]) -> f64 {
    values
        .iter()
        .enumerate()
        .flat_map(|(k, &v)| {
            PROBES
                .iter()
                .map(move |o| (net.evaluate_scalar(k as f64 + o).unwrap_or(f64::INFINITY) - v).abs())
        })
        .fold(0.0, f64::max)
}
