//! Kernel witness for a first layer with fewer rows than inputs.
//!
//! Given `W₀` of shape `(d - 1) × d`, the construction finds `x̃` with
//! `W₀ x̃ = 0` exactly, `|x̃_j| ≤ 1/2` for every `j`, and some coordinate equal
//! to exactly `+1/2`. Any network whose first layer is `W₀` then takes the same
//! value at `0` and at `x̃`.

use std::collections::BTreeMap;

use serde::Serialize;

use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::scalar::ExactField;
use crate::Rational;

/// Variable classification read off the RREF of `W₀` (all indices 0-based).
#[derive(Debug, Clone, PartialEq)]
pub struct IndexClasses<T> {
    /// Pivot variables whose row has no free-variable dependence (forced to 0).
    pub forced_zero: Vec<usize>,
    /// Remaining pivot variables.
    pub pivot_columns: Vec<usize>,
    /// Free variables.
    pub free_columns: Vec<usize>,
    /// `c_{ik}` with `x_i = Σ_k c_{ik} x_k`, nonzero entries only, keyed by
    /// `(pivot column i, free column k)`.
    pub coeffs: BTreeMap<(usize, usize), T>,
}

/// Classifies variables given an RREF and its pivot columns.
pub fn classify_indices<T: ExactField>(rref: &Matrix<T>, pivots: &[usize]) -> IndexClasses<T> {
    let d = rref.cols();
    let free_columns: Vec<usize> = (0..d).filter(|c| !pivots.contains(c)).collect();
    let mut coeffs = BTreeMap::new();
    let mut forced_zero = Vec::new();
    let mut pivot_columns = Vec::new();
    for (row, &p) in pivots.iter().enumerate() {
        let mut dependent = false;
        for &k in &free_columns {
            let entry = rref.get(row, k);
            if !entry.is_zero() {
                coeffs.insert((p, k), -entry.clone());
                dependent = true;
            }
        }
        if dependent {
            pivot_columns.push(p);
        } else {
            forced_zero.push(p);
        }
    }
    IndexClasses {
        forced_zero,
        pivot_columns,
        free_columns,
        coeffs,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessReport<T: ExactField> {
    pub rref: Matrix<T>,
    pub classes: IndexClasses<T>,
    /// Coefficient of largest magnitude, absent when no coefficient exists.
    pub mu_tilde: Option<T>,
    /// Free column that carries the nonzero value.
    pub k_tilde: usize,
    pub x_tilde: Vec<T>,
    pub degenerate: bool,
    /// Coordinate with `x̃_i = +1/2`.
    pub half_coordinate: usize,
}

/// Builds the witness for `W₀` of shape `(d - 1) × d`.
///
/// With `μ̃` the coefficient of largest magnitude (ties: smallest free column,
/// then smallest pivot row) in free column `k̃`, the free variable `x̃_k̃` is
/// `sign(μ̃) / (2|μ̃|)` when `|μ̃| ≥ 1` and `1/2` otherwise; other free variables
/// are 0 and pivot variables follow from the coefficients. Without any
/// coefficient, the first free variable is set to `1/2`.
pub fn construct_witness<T: ExactField>(w0: &Matrix<T>) -> Result<WitnessReport<T>> {
    let d = w0.cols();
    if d < 2 || w0.rows() + 1 != d {
        return Err(Error::InvalidArgument(format!(
            "witness needs a (d-1) x d matrix, got {}x{d}",
            w0.rows()
        )));
    }
    let (rref, pivots) = w0.rref();
    let classes = classify_indices(&rref, &pivots);
    let half = T::half();
    let mut x = vec![T::zero(); d];

    // Ascending (pivot row, free column) keys; scan free columns first to break ties.
    let mut chosen: Option<(usize, usize, T)> = None;
    for &k in &classes.free_columns {
        for &p in &pivots {
            if let Some(c) = classes.coeffs.get(&(p, k)) {
                if chosen.as_ref().is_none_or(|(_, _, best)| c.abs() > best.abs()) {
                    chosen = Some((p, k, c.clone()));
                }
            }
        }
    }

    let Some((pivot, k_tilde, mu)) = chosen else {
        let k = classes.free_columns[0];
        x[k] = half;
        return Ok(WitnessReport {
            rref,
            classes,
            mu_tilde: None,
            k_tilde: k,
            x_tilde: x,
            degenerate: true,
            half_coordinate: k,
        });
    };

    let (value, half_coordinate) = if mu.abs() >= T::one() {
        (mu.signum() / ((T::one() + T::one()) * mu.abs()), pivot)
    } else {
        (half, k_tilde)
    };
    x[k_tilde] = value.clone();
    for ((p, k), c) in &classes.coeffs {
        if *k == k_tilde {
            x[*p] = c.clone() * value.clone();
        }
    }
    Ok(WitnessReport {
        rref,
        classes,
        mu_tilde: Some(mu),
        k_tilde,
        x_tilde: x,
        degenerate: false,
        half_coordinate,
    })
}

impl<T: ExactField> WitnessReport<T> {
    /// Checks the three witness guarantees against `w0`.
    pub fn verify(&self, w0: &Matrix<T>) -> bool {
        let half = T::half();
        let kernel = w0
            .mul_vec(&self.x_tilde)
            .map(|v| v.iter().all(|e| e.is_zero()))
            .unwrap_or(false);
        kernel && self.x_tilde.iter().all(|v| v.abs() <= half) && self.x_tilde[self.half_coordinate] == half
    }
}

/// Formats a rational as `p/q`.
pub fn rational_string(v: &Rational) -> String {
    format!("{}/{}", v.numer(), v.denom())
}

#[derive(Serialize)]
struct WitnessRecord {
    rref: Vec<Vec<String>>,
    forced_zero: Vec<usize>,
    pivot_columns: Vec<usize>,
    free_columns: Vec<usize>,
    coeffs: Vec<(usize, usize, String)>,
    mu_tilde: Option<String>,
    k_tilde: usize,
    x_tilde: Vec<String>,
    degenerate: bool,
    half_coordinate: usize,
}

impl WitnessReport<Rational> {
    /// JSON value with exact rationals as `"p/q"` strings; indices are 0-based.
    pub fn to_json_value(&self) -> serde_json::Value {
        let rec = WitnessRecord {
            rref: (0..self.rref.rows())
                .map(|r| self.rref.row(r).iter().map(rational_string).collect())
                .collect(),
            forced_zero: self.classes.forced_zero.clone(),
            pivot_columns: self.classes.pivot_columns.clone(),
            free_columns: self.classes.free_columns.clone(),
            coeffs: self
                .classes
                .coeffs
                .iter()
                .map(|((i, k), c)| (*i, *k, rational_string(c)))
                .collect(),
            mu_tilde: self.mu_tilde.as_ref().map(rational_string),
            k_tilde: self.k_tilde,
            x_tilde: self.x_tilde.iter().map(rational_string).collect(),
            degenerate: self.degenerate,
            half_coordinate: self.half_coordinate,
        };
        serde_json::to_value(rec).expect("serializable record")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn mat(rows: &[&[(i64, i64)]]) -> Matrix<Rational> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&(n, d)| q(n, d)).collect()).collect()).unwrap()
    }

    #[test]
    fn classify_full_dependence() {
        let m = mat(&[&[(1, 1), (0, 1), (-2, 1)], &[(0, 1), (1, 1), (3, 1)]]);
        let (r, p) = m.rref();
        let c = classify_indices(&r, &p);
        assert_eq!(c.pivot_columns, vec![0, 1]);
        assert_eq!(c.free_columns, vec![2]);
        assert!(c.forced_zero.is_empty());
        assert_eq!(c.coeffs[&(0, 2)], q(2, 1));
        assert_eq!(c.coeffs[&(1, 2)], q(-3, 1));
    }

    #[test]
    fn classify_zero_matrix() {
        let m = Matrix::<Rational>::zeros(1, 2).unwrap();
        let (r, p) = m.rref();
        let c = classify_indices(&r, &p);
        assert!(c.pivot_columns.is_empty());
        assert_eq!(c.free_columns, vec![0, 1]);
        assert!(c.coeffs.is_empty());
    }

    #[test]
    fn classify_forced_zero() {
        let m = mat(&[&[(1, 1), (0, 1), (0, 1)], &[(0, 1), (1, 1), (-1, 1)]]);
        let (r, p) = m.rref();
        let c = classify_indices(&r, &p);
        assert_eq!(c.forced_zero, vec![0]);
        assert_eq!(c.pivot_columns, vec![1]);
        assert_eq!(c.free_columns, vec![2]);
        assert_eq!(c.coeffs.len(), 1);
        assert_eq!(c.coeffs[&(1, 2)], q(1, 1));
    }

    #[test]
    fn witness_large_coefficient() {
        let m = mat(&[&[(1, 1), (0, 1), (-2, 1)], &[(0, 1), (1, 1), (3, 1)]]);
        let w = construct_witness(&m).unwrap();
        assert_eq!(w.x_tilde, vec![q(-1, 3), q(1, 2), q(-1, 6)]);
        assert_eq!(w.mu_tilde, Some(q(-3, 1)));
        assert_eq!(w.k_tilde, 2);
        assert_eq!(w.half_coordinate, 1);
        assert!(!w.degenerate);
        assert!(w.verify(&m));
    }

    #[test]
    fn witness_small_coefficient() {
        let m = mat(&[&[(1, 1), (0, 1), (-1, 2)], &[(0, 1), (1, 1), (1, 4)]]);
        let w = construct_witness(&m).unwrap();
        assert_eq!(w.mu_tilde, Some(q(1, 2)));
        assert_eq!(w.x_tilde, vec![q(1, 4), q(-1, 8), q(1, 2)]);
        assert_eq!(w.half_coordinate, 2);
        assert!(w.verify(&m));
    }

    #[test]
    fn witness_degenerate() {
        let m = Matrix::<Rational>::zeros(1, 2).unwrap();
        let w = construct_witness(&m).unwrap();
        assert!(w.degenerate);
        assert_eq!(w.x_tilde, vec![q(1, 2), q(0, 1)]);
        assert!(w.verify(&m));
    }

    #[test]
    fn witness_tie_break_prefers_first_pivot_row() {
        // x1 = 2 x3, x2 = -2 x3: both |c| = 2, pick pivot row 0.
        let m = mat(&[&[(1, 1), (0, 1), (-2, 1)], &[(0, 1), (1, 1), (2, 1)]]);
        let w = construct_witness(&m).unwrap();
        assert_eq!(w.mu_tilde, Some(q(2, 1)));
        assert_eq!(w.half_coordinate, 0);
        assert_eq!(w.x_tilde, vec![q(1, 2), q(-1, 2), q(1, 4)]);
    }

    #[test]
    fn shape_mismatch() {
        assert!(construct_witness(&Matrix::<Rational>::zeros(2, 2).unwrap()).is_err());
        assert!(construct_witness(&Matrix::<Rational>::zeros(1, 1).unwrap()).is_err());
    }

    #[test]
    fn json_uses_fraction_strings() {
        let m = mat(&[&[(1, 1), (0, 1), (-2, 1)], &[(0, 1), (1, 1), (3, 1)]]);
        let v = construct_witness(&m).unwrap().to_json_value();
        assert_eq!(v["x_tilde"][0], "-1/3");
        assert_eq!(v["mu_tilde"], "-3/1");
    }
}
