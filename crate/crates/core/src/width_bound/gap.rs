//! Two-point error certificate for width-`(d-1)` networks.

use serde::Serialize;

use super::family::ExampleFamily;
use super::matrix::Matrix;
use super::witness::{construct_witness, WitnessReport};
use crate::activation::euaf;
use crate::error::{Error, Result};
use crate::{Network, Rational};

/// Slack allowed below the analytic floor `c_star / 2`.
pub const GAP_SLACK: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct GapCertificate {
    pub witness: WitnessReport<Rational>,
    /// `|f(0) - net(0)|`.
    pub e0: f64,
    /// `|f(x̃) - net(x̃)|`.
    pub e1: f64,
    /// Common network value `net(0) = net(x̃)`.
    pub b_value: f64,
    pub gap: f64,
    /// `c_star / 2`.
    pub floor: f64,
    pub certified: bool,
}

#[derive(Serialize)]
pub struct GapRow {
    pub e0: f64,
    pub e1: f64,
    pub b_value: f64,
    pub gap: f64,
    pub floor: f64,
    pub certified: bool,
}

impl GapCertificate {
    pub fn row(&self) -> GapRow {
        GapRow {
            e0: self.e0,
            e1: self.e1,
            b_value: self.b_value,
            gap: self.gap,
            floor: self.floor,
            certified: self.certified,
        }
    }
}

/// Exact rational copy of the first-layer weights.
pub fn first_layer_rational(net: &Network) -> Result<Matrix<Rational>> {
    let layer = &net.layers()[0];
    let entries = layer
        .weights()
        .iter()
        .map(|&w| {
            Rational::from_float(w).ok_or_else(|| Error::NonFinite {
                context: format!("weight {w}"),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Matrix::new(layer.rows(), layer.cols(), entries)
}

/// [`two_point_gap_with`] using the EUAF.
pub fn two_point_gap(family: &ExampleFamily, net: &Network) -> Result<GapCertificate> {
    two_point_gap_with(family, net, euaf)
}

/// Evaluates `net` at the origin and at the kernel witness of its first layer.
///
/// The first-layer pre-activation at `x̃` is computed in exact arithmetic; since
/// `W₀ x̃ = 0` it equals `b₀` exactly, so both evaluations share the value `B`
/// bit for bit regardless of the activation. For the family,
/// `max(|B|, |f(x̃) - B|) ≥ c_star / 2`.
pub fn two_point_gap_with<F: Fn(f64) -> f64>(
    family: &ExampleFamily,
    net: &Network,
    activation: F,
) -> Result<GapCertificate> {
    let d = family.d();
    if net.input_dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: net.input_dim(),
            context: "network input vs family dimension".into(),
        });
    }
    let first = &net.layers()[0];
    if first.rows() + 1 != d {
        return Err(Error::WidthMismatch {
            expected: d - 1,
            got: first.rows(),
        });
    }
    let w0 = first_layer_rational(net)?;
    let witness = construct_witness(&w0)?;

    let bias: Vec<Rational> = first
        .bias()
        .iter()
        .map(|&b| Rational::from_float(b).expect("finite bias"))
        .collect();
    let kernel = w0.mul_vec(&witness.x_tilde)?;
    let pre_witness: Vec<f64> = kernel
        .iter()
        .zip(&bias)
        .map(|(k, b)| to_f64(&(k + b)))
        .collect();
    let pre_origin = first.bias().to_vec();

    let at_origin = net.evaluate_from_first_preactivation(pre_origin, &activation)?[0];
    let at_witness = net.evaluate_from_first_preactivation(pre_witness, &activation)?[0];
    let x_float: Vec<f64> = witness.x_tilde.iter().map(to_f64).collect();
    let e0 = (family.eval(&vec![0.0; d]) - at_origin).abs();
    let e1 = (family.eval(&x_float) - at_witness).abs();
    let gap = e0.max(e1);
    let floor = family.c_star() / 2.0;
    Ok(GapCertificate {
        witness,
        e0,
        e1,
        b_value: at_origin,
        gap,
        floor,
        certified: gap >= floor - GAP_SLACK,
    })
}

/// Nearest `f64` to an exact rational.
pub fn to_f64(v: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    v.to_f64().unwrap_or(f64::NAN)
}
