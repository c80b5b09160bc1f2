//! Functions `f(x) = Σ_j c_j h_j(x_j)` on `[-1/2, 1/2]^d` that no width-`(d-1)`
//! network approximates to arbitrary accuracy.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct ExampleFamily {
    d: usize,
    c: Vec<f64>,
    h: Vec<ScalarFn>,
    c_star: f64,
}

const NONNEG_PROBES: usize = 201;

/// Builds the family. Each `h_j` must be nonnegative on `[-1/2, 1/2]` (checked
/// on a grid) with `h_j(0) = 0` and `h_j(1/2) ≠ 0`; every `c_j` must be positive.
pub fn example_family(d: usize, c: Vec<f64>, h: Vec<ScalarFn>) -> Result<ExampleFamily> {
    if d == 0 || c.len() != d || h.len() != d {
        return Err(Error::InvalidArgument(format!(
            "family of dimension {d} needs {d} coefficients and functions, got {} and {}",
            c.len(),
            h.len()
        )));
    }
    if let Some(cj) = c.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidArgument(format!("coefficient {cj} is not positive")));
    }
    for (j, hj) in h.iter().enumerate() {
        if hj(0.0) != 0.0 {
            return Err(Error::InvalidArgument(format!("h_{j}(0) = {} ≠ 0", hj(0.0))));
        }
        if !(hj(0.5) > 0.0) {
            return Err(Error::InvalidArgument(format!("h_{j}(1/2) = {} must be nonzero", hj(0.5))));
        }
        for i in 0..NONNEG_PROBES {
            let x = -0.5 + i as f64 / (NONNEG_PROBES - 1) as f64;
            let v = hj(x);
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!("h_{j}({x}) = {v} is not nonnegative")));
            }
        }
    }
    let c_min = c.iter().copied().fold(f64::INFINITY, f64::min);
    let h_min = h.iter().map(|hj| hj(0.5)).fold(f64::INFINITY, f64::min);
    Ok(ExampleFamily {
        d,
        c,
        h,
        c_star: c_min * h_min,
    })
}

impl ExampleFamily {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.c
    }

    /// `(min_j c_j)(min_j h_j(1/2))`: lower bound on `f` whenever some `x_j = 1/2`.
    pub fn c_star(&self) -> f64 {
        self.c_star
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.d);
        self.c.iter().zip(&self.h).zip(x).map(|((c, h), &v)| c * h(v)).sum()
    }
}

impl fmt::Debug for ExampleFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExampleFamily")
            .field("d", &self.d)
            .field("c", &self.c)
            .field("c_star", &self.c_star)
            .finish_non_exhaustive()
    }
}

/// `h(x) = 2|x|`.
pub fn twice_abs() -> ScalarFn {
    Arc::new(|x: f64| 2.0 * x.abs())
}
