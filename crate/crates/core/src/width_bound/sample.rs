//! Seeded generators of test matrices and narrow networks.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::family::ExampleFamily;
use super::matrix::Matrix;
use crate::error::Result;
use crate::network::{AffineLayer, FeedforwardNetwork};
use crate::univariate::{pattern_search, PatternOptions};
use crate::{Network, Rational};

/// Random `rows × cols` rational matrix with small numerators and denominators.
///
/// About one draw in ten is the zero matrix and one in five has a row copied
/// as a multiple of another, so degenerate and rank-deficient shapes occur.
pub fn random_rational_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> Matrix<Rational> {
    let kind = rng.gen_range(0..10);
    let mut entries: Vec<Rational> = (0..rows * cols)
        .map(|_| {
            if kind == 0 || rng.gen_bool(0.15) {
                Rational::from_integer(0.into())
            } else {
                Rational::new(rng.gen_range(-9..=9).into(), rng.gen_range(1..=6).into())
            }
        })
        .collect();
    if (kind == 1 || kind == 2) && rows >= 2 {
        let factor = Rational::new(rng.gen_range(-3..=3).into(), rng.gen_range(1..=3).into());
        for c in 0..cols {
            entries[(rows - 1) * cols + c] = entries[c].clone() * factor.clone();
        }
    }
    Matrix::new(rows, cols, entries).expect("shape matches entry count")
}

/// Weights as multiples of 1/8, so they are exact in binary floating point.
fn eighths<R: Rng>(rng: &mut R, range: i32) -> f64 {
    rng.gen_range(-range..=range) as f64 / 8.0
}

/// Random network on `d` inputs whose first layer has `d - 1` rows, followed by
/// up to two hidden layers of width 1..=6.
pub fn random_narrow_network<R: Rng>(d: usize, rng: &mut R) -> Result<Network> {
    let w = d.saturating_sub(1).max(1);
    let mut layers = Vec::new();
    let zero_first = rng.gen_bool(0.05);
    let weights = (0..w * d).map(|_| if zero_first { 0.0 } else { eighths(rng, 16) }).collect();
    let bias = (0..w).map(|_| eighths(rng, 8)).collect();
    layers.push(AffineLayer::new(w, d, weights, bias, true)?);
    let mut cols = w;
    for _ in 0..rng.gen_range(0..=2) {
        let rows = rng.gen_range(1..=6);
        let weights = (0..rows * cols).map(|_| eighths(rng, 16)).collect();
        let bias = (0..rows).map(|_| eighths(rng, 8)).collect();
        layers.push(AffineLayer::new(rows, cols, weights, bias, true)?);
        cols = rows;
    }
    let weights = (0..cols).map(|_| eighths(rng, 16)).collect();
    layers.push(AffineLayer::new(1, cols, weights, vec![eighths(rng, 8)], false)?);
    Ok(FeedforwardNetwork::new(d, layers)?.with_metadata("role", "narrow"))
}

/// Hidden width of the second layer of trained narrow networks.
const TRAINED_HIDDEN: usize = 6;
const TRAINING_POINTS: usize = 256;

/// Network `[d, d-1, 6, 1]` fitted to `family` on `[-1/2, 1/2]^d` by pattern
/// search on the sup error over random sample points (plus the origin and the
/// corners' midpoints), using at most `max_evals` objective evaluations.
pub fn train_narrow_network(family: &ExampleFamily, rng: &mut ChaCha8Rng, max_evals: usize) -> Result<Network> {
    let d = family.d();
    let w = d.saturating_sub(1).max(1);
    let shapes = [(w, d), (TRAINED_HIDDEN, w), (1, TRAINED_HIDDEN)];
    let mut points: Vec<Vec<f64>> = vec![vec![0.0; d]];
    for j in 0..d {
        let mut e = vec![0.0; d];
        e[j] = 0.5;
        points.push(e);
    }
    points.push(vec![0.5; d]);
    while points.len() < TRAINING_POINTS {
        points.push((0..d).map(|_| rng.gen_range(-0.5..=0.5)).collect());
    }
    let targets: Vec<f64> = points.iter().map(|p| family.eval(p)).collect();

    let build = |p: &[f64]| -> Result<Network> {
        let mut layers = Vec::with_capacity(shapes.len());
        let mut at = 0;
        for (k, &(rows, cols)) in shapes.iter().enumerate() {
            let weights = p[at..at + rows * cols].to_vec();
            at += rows * cols;
            let bias = p[at..at + rows].to_vec();
            at += rows;
            layers.push(AffineLayer::new(rows, cols, weights, bias, k + 1 < shapes.len())?);
        }
        FeedforwardNetwork::new(d, layers)
    };
    let objective = |p: &[f64]| -> f64 {
        let Ok(net) = build(p) else {
            return f64::INFINITY;
        };
        points
            .iter()
            .zip(&targets)
            .map(|(x, &t)| net.evaluate(x).map_or(f64::INFINITY, |y| (y[0] - t).abs()))
            .fold(0.0, f64::max)
    };
    let n_params: usize = shapes.iter().map(|&(r, c)| r * c + r).sum();
    let starts: Vec<Vec<f64>> = (0..2)
        .map(|_| (0..n_params).map(|_| rng.gen_range(-1.0..=1.0)).collect())
        .collect();
    let outcome = pattern_search(
        objective,
        &starts,
        PatternOptions {
            initial_step: 0.25,
            min_step: 1e-9,
            target: 0.0,
            max_evals,
        },
    );
    Ok(build(&outcome.best)?.with_metadata("role", "trained-narrow"))
}
