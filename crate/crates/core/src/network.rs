//! Layered affine + activation networks.
//!
//! A network is `L_last ∘ σ ∘ … ∘ σ ∘ L_0` where every layer but the last is
//! followed by the elementwise EUAF. Networks are immutable once built.

use std::collections::BTreeMap;

use crate::activation::euaf;
use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// One affine map `y -> W y + b`, optionally followed by the activation.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineLayer<T> {
    rows: usize,
    cols: usize,
    /// Row-major, `rows * cols` entries.
    weights: Vec<T>,
    bias: Vec<T>,
    activated: bool,
}

impl<T: Scalar> AffineLayer<T> {
    pub fn new(rows: usize, cols: usize, weights: Vec<T>, bias: Vec<T>, activated: bool) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Malformed(format!("layer shape {rows}x{cols} is empty")));
        }
        if weights.len() != rows * cols {
            return Err(Error::Malformed(format!(
                "layer {rows}x{cols} has {} weights",
                weights.len()
            )));
        }
        if bias.len() != rows {
            return Err(Error::Malformed(format!(
                "layer with {rows} rows has bias of length {}",
                bias.len()
            )));
        }
        if let Some(v) = weights.iter().chain(bias.iter()).find(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: format!("layer parameter {v}"),
            });
        }
        Ok(Self {
            rows,
            cols,
            weights,
            bias,
            activated,
        })
    }

    /// Builds a layer from nested rows.
    pub fn from_rows(rows: &[Vec<T>], bias: Vec<T>, activated: bool) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Malformed("ragged weight rows".into()));
        }
        let weights = rows.iter().flatten().copied().collect();
        Self::new(rows.len(), cols, weights, bias, activated)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn weight(&self, r: usize, c: usize) -> T {
        self.weights[r * self.cols + c]
    }

    pub fn bias(&self) -> &[T] {
        &self.bias
    }

    pub fn activated(&self) -> bool {
        self.activated
    }

    /// `W y + b` without activation.
    pub fn apply_affine(&self, y: &[T]) -> Vec<T> {
        debug_assert_eq!(y.len(), self.cols);
        self.weights
            .chunks_exact(self.cols)
            .zip(&self.bias)
            .map(|(row, &b)| row.iter().zip(y).fold(b, |acc, (&w, &v)| acc + w * v))
            .collect()
    }

    fn max_abs(&self) -> T {
        self.weights
            .iter()
            .chain(&self.bias)
            .fold(T::zero(), |m, v| m.max(v.abs()))
    }
}

/// A feedforward EUAF network.
#[derive(Debug, Clone, PartialEq)]
pub struct FeedforwardNetwork<T> {
    input_dim: usize,
    layers: Vec<AffineLayer<T>>,
    metadata: BTreeMap<String, String>,
}

impl<T: Scalar> FeedforwardNetwork<T> {
    /// Validates the layer chain: consecutive shapes agree, every layer but the
    /// last is activated and the last is not.
    pub fn new(input_dim: usize, layers: Vec<AffineLayer<T>>) -> Result<Self> {
        if input_dim == 0 {
            return Err(Error::Malformed("input_dim must be positive".into()));
        }
        if layers.is_empty() {
            return Err(Error::Malformed("network has no layers".into()));
        }
        let mut dim = input_dim;
        let last = layers.len() - 1;
        for (i, layer) in layers.iter().enumerate() {
            if layer.cols != dim {
                return Err(Error::Malformed(format!(
                    "layer {i} expects {} inputs but receives {dim}",
                    layer.cols
                )));
            }
            if layer.activated != (i != last) {
                return Err(Error::Malformed(format!(
                    "layer {i}: only the final layer may (and must) skip the activation"
                )));
            }
            dim = layer.rows;
        }
        Ok(Self {
            input_dim,
            layers,
            metadata: BTreeMap::new(),
        })
    }

    pub fn with_metadata(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.metadata.insert(key.into(), value.into());
        self
    }

    pub(crate) fn with_metadata_map(mut self, metadata: BTreeMap<String, String>) -> Self {
        self.metadata = metadata;
        self
    }

    /// The single-layer affine network `x -> w·x + b`.
    pub fn affine(weights: Vec<T>, bias: T) -> Result<Self> {
        let n = weights.len();
        Self::new(n, vec![AffineLayer::new(1, n, weights, vec![bias], false)?])
    }

    /// Scalar network returning `value` everywhere.
    pub fn constant(input_dim: usize, value: T) -> Result<Self> {
        Self::affine(vec![T::zero(); input_dim], value)
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(0, |l| l.rows)
    }

    pub fn layers(&self) -> &[AffineLayer<T>] {
        &self.layers
    }

    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    /// Number of activation applications.
    pub fn depth(&self) -> usize {
        self.layers.len() - 1
    }

    /// Hidden-layer widths, in order.
    pub fn hidden_widths(&self) -> Vec<usize> {
        self.layers[..self.layers.len() - 1].iter().map(|l| l.rows).collect()
    }

    /// Maximum hidden width (0 for a purely affine network).
    pub fn width(&self) -> usize {
        self.hidden_widths().into_iter().max().unwrap_or(0)
    }

    /// Number of activated neurons.
    pub fn hidden_neurons(&self) -> usize {
        self.hidden_widths().iter().sum()
    }

    /// `[input_dim, hidden widths.., output_dim]`.
    pub fn fingerprint(&self) -> Vec<usize> {
        std::iter::once(self.input_dim)
            .chain(self.layers.iter().map(|l| l.rows))
            .collect()
    }

    /// Largest absolute weight or bias.
    pub fn max_abs_param(&self) -> T {
        self.layers.iter().fold(T::zero(), |m, l| m.max(l.max_abs()))
    }

    /// Evaluates the network with the EUAF.
    pub fn evaluate(&self, x: &[T]) -> Result<Vec<T>> {
        self.evaluate_with(x, euaf)
    }

    /// Evaluates a scalar-in/scalar-out network.
    pub fn evaluate_scalar(&self, x: T) -> Result<T> {
        Ok(self.evaluate(&[x])?[0])
    }

    /// Evaluates with an arbitrary activation.
    pub fn evaluate_with<F: Fn(T) -> T>(&self, x: &[T], activation: F) -> Result<Vec<T>> {
        if x.len() != self.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim,
                got: x.len(),
                context: "network input".into(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "network input".into(),
            });
        }
        let pre = self.layers[0].apply_affine(x);
        self.evaluate_from_first_preactivation(pre, activation)
    }

    /// Continues evaluation given the pre-activation of the first layer, i.e.
    /// `W_0 x + b_0` computed by the caller (possibly exactly).
    pub fn evaluate_from_first_preactivation<F: Fn(T) -> T>(
        &self,
        pre: Vec<T>,
        activation: F,
    ) -> Result<Vec<T>> {
        if pre.len() != self.layers[0].rows {
            return Err(Error::DimensionMismatch {
                expected: self.layers[0].rows,
                got: pre.len(),
                context: "first-layer pre-activation".into(),
            });
        }
        let mut y = pre;
        for (i, layer) in self.layers.iter().enumerate() {
            if i > 0 {
                y = layer.apply_affine(&y);
            }
            if layer.activated {
                y.iter_mut().for_each(|v| *v = activation(*v));
            }
            if y.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFiniteLayer { layer: i });
            }
        }
        Ok(y)
    }

    /// Feeds the output of `self` into `next`, merging the final affine map of
    /// `self` with the first affine map of `next`. The result has
    /// `self.depth() + next.depth()` activation layers.
    pub fn then(&self, next: &Self) -> Result<Self> {
        let inner = self.layers.last().expect("non-empty");
        let outer = &next.layers[0];
        if inner.rows != outer.cols {
            return Err(Error::DimensionMismatch {
                expected: outer.cols,
                got: inner.rows,
                context: "network composition".into(),
            });
        }
        let mut weights = Vec::with_capacity(outer.rows * inner.cols);
        for r in 0..outer.rows {
            for c in 0..inner.cols {
                let v = (0..inner.rows).fold(T::zero(), |acc, k| {
                    acc + outer.weight(r, k) * inner.weight(k, c)
                });
                weights.push(v);
            }
        }
        let bias = outer.apply_affine(&inner.bias);
        let merged = AffineLayer::new(outer.rows, inner.cols, weights, bias, outer.activated)?;
        let mut layers = self.layers[..self.layers.len() - 1].to_vec();
        layers.push(merged);
        layers.extend_from_slice(&next.layers[1..]);
        Self::new(self.input_dim, layers)
    }

    /// Casts every parameter to another scalar type.
    pub fn cast<U: Scalar>(&self) -> FeedforwardNetwork<U> {
        let conv = |v: &T| U::from(*v).expect("finite parameter");
        FeedforwardNetwork {
            input_dim: self.input_dim,
            layers: self
                .layers
                .iter()
                .map(|l| AffineLayer {
                    rows: l.rows,
                    cols: l.cols,
                    weights: l.weights.iter().map(conv).collect(),
                    bias: l.bias.iter().map(conv).collect(),
                    activated: l.activated,
                })
                .collect(),
            metadata: self.metadata.clone(),
        }
    }
}

/// Three-neuron network computing `min(max(t, 0), 1)` for every `t` in `[-1, 2]`:
/// `(3/2) σ(t/3 + 1/3) - (1/2) σ(t + 1)`.
pub fn clip01_fragment<T: Scalar>() -> FeedforwardNetwork<T> {
    let third = T::one() / lit(3.0);
    let hidden = AffineLayer::new(2, 1, vec![third, T::one()], vec![third, T::one()], true)
        .expect("static shape");
    let combine = AffineLayer::new(1, 2, vec![lit(1.5), lit(-0.5)], vec![T::zero()], false)
        .expect("static shape");
    FeedforwardNetwork::new(1, vec![hidden, combine])
        .expect("static shape")
        .with_metadata("name", "clip01")
        .with_metadata("role", "clip")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_neuron(depth: usize) -> FeedforwardNetwork<f64> {
        let mut layers: Vec<_> = (0..depth)
            .map(|_| AffineLayer::new(1, 1, vec![1.0], vec![0.0], true).unwrap())
            .collect();
        layers.push(AffineLayer::new(1, 1, vec![1.0], vec![0.0], false).unwrap());
        FeedforwardNetwork::new(1, layers).unwrap()
    }

    #[test]
    fn identity_affine() {
        let net = identity_neuron(0);
        assert_eq!(net.evaluate(&[3.7]).unwrap(), vec![3.7]);
        assert_eq!(net.depth(), 0);
        assert_eq!(net.width(), 0);
    }

    #[test]
    fn single_and_stacked_activation() {
        assert_eq!(identity_neuron(1).evaluate(&[1.5]).unwrap(), vec![0.5]);
        assert_eq!(identity_neuron(2).evaluate(&[1.5]).unwrap(), vec![0.5]);
        assert_eq!(identity_neuron(2).fingerprint(), vec![1, 1, 1, 1]);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let err = identity_neuron(1).evaluate(&[1.0, 2.0]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 1, got: 2, .. }));
    }

    #[test]
    fn non_finite_intermediate_names_layer() {
        let layers = vec![
            AffineLayer::new(1, 1, vec![1.0], vec![0.0], true).unwrap(),
            AffineLayer::new(1, 1, vec![f64::MAX], vec![f64::MAX], false).unwrap(),
        ];
        let net = FeedforwardNetwork::new(1, layers).unwrap();
        let err = net.evaluate(&[0.5]).unwrap_err();
        assert!(matches!(err, Error::NonFiniteLayer { layer: 1 }), "{err:?}");
    }

    #[test]
    fn rejects_bad_structure() {
        assert!(AffineLayer::new(2, 1, vec![1.0], vec![0.0, 0.0], true).is_err());
        assert!(AffineLayer::new(1, 1, vec![f64::NAN], vec![0.0], true).is_err());
        let a = AffineLayer::new(2, 1, vec![1.0, 1.0], vec![0.0, 0.0], true).unwrap();
        let b = AffineLayer::new(1, 3, vec![1.0; 3], vec![0.0], false).unwrap();
        assert!(FeedforwardNetwork::new(1, vec![a.clone(), b]).is_err());
        // final layer activated
        assert!(FeedforwardNetwork::new(1, vec![a]).is_err());
    }

    #[test]
    fn clip_fragment_values() {
        let clip = clip01_fragment::<f64>();
        assert_eq!(clip.evaluate_scalar(-1.0).unwrap(), 0.0);
        assert_eq!(clip.evaluate_scalar(0.5).unwrap(), 0.5);
        assert_eq!(clip.evaluate_scalar(2.0).unwrap(), 1.0);
        assert_eq!(clip.hidden_neurons(), 2);
    }

    #[test]
    fn then_composes_functions() {
        let clip = clip01_fragment::<f64>();
        let scale = FeedforwardNetwork::affine(vec![3.0], -1.0).unwrap();
        let net = scale.then(&clip).unwrap();
        assert_eq!(net.depth(), 1);
        for i in 0..=100 {
            let x = i as f64 / 100.0;
            let want = (3.0 * x - 1.0).clamp(0.0, 1.0);
            assert!((net.evaluate_scalar(x).unwrap() - want).abs() < 1e-12);
        }
        let twice = clip.then(&clip).unwrap();
        assert_eq!(twice.depth(), 2);
        assert!((twice.evaluate_scalar(1.7).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn f32_network_evaluates() {
        let clip = clip01_fragment::<f32>();
        assert!((clip.evaluate_scalar(0.25_f32).unwrap() - 0.25).abs() < 1e-6);
        let back: FeedforwardNetwork<f64> = clip.cast();
        assert!((back.evaluate_scalar(0.25).unwrap() - 0.25).abs() < 1e-6);
    }
}
