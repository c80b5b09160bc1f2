//! Rescaling, inner clipping, the composed approximant and its neuron count.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::clip01_fragment;
use crate::Network;

/// `t ↦ scale·t + shift`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AffineMap {
    pub scale: f64,
    pub shift: f64,
}

impl AffineMap {
    pub fn apply(&self, t: f64) -> f64 {
        self.scale * t + self.shift
    }
}

/// Forward map `[a, b] → [0, 1]` and its inverse `[0, 1] → [a, b]`.
pub fn rescale_maps(a: f64, b: f64) -> Result<(AffineMap, AffineMap)> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidArgument(format!("bad domain [{a}, {b}]")));
    }
    let forward = AffineMap {
        scale: 1.0 / (b - a),
        shift: -a / (b - a),
    };
    let inverse = AffineMap {
        scale: b - a,
        shift: a,
    };
    Ok((forward, inverse))
}

/// Checks `λ`: non-empty, finite, positive entries, sum at most one.
pub fn validate_lambda(lambda: &[f64]) -> Result<()> {
    if lambda.is_empty() {
        return Err(Error::InvalidArgument("lambda must have d ≥ 1 entries".into()));
    }
    if let Some(v) = lambda.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::InvalidArgument(format!("lambda entries must be positive, got {v}")));
    }
    let sum: f64 = lambda.iter().sum();
    if sum > 1.0 + 1e-12 {
        return Err(Error::InvalidArgument(format!("lambda sums to {sum} > 1")));
    }
    Ok(())
}

/// Appends the clipping fragment to a scalar network after checking on
/// `check_grid` that its raw output stays inside `[-1, 2]`, where the clip
/// identity holds.
pub fn clip_inner(raw: &Network, check_grid: &[f64]) -> Result<Network> {
    if raw.input_dim() != 1 || raw.output_dim() != 1 {
        return Err(Error::InvalidArgument("inner networks must be scalar".into()));
    }
    for &x in check_grid {
        let y = raw.evaluate_scalar(x)?;
        if !(-1.0..=2.0).contains(&y) {
            return Err(Error::ClipRange { value: y, at: x });
        }
    }
    Ok(raw.then(&clip01_fragment())?.with_metadata("role", "inner"))
}

/// Whether the last two layers of `net` are the (possibly merged) clip fragment.
pub fn ends_with_clip(net: &Network) -> bool {
    let layers = net.layers();
    if layers.len() < 2 || net.output_dim() != 1 {
        return false;
    }
    let last = &layers[layers.len() - 1];
    let hidden = &layers[layers.len() - 2];
    if last.weights() != [1.5, -0.5] || last.bias() != [0.0] || hidden.rows() != 2 {
        return false;
    }
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-9 * (1.0 + x.abs().max(y.abs()));
    (0..hidden.cols()).all(|c| close(hidden.weight(0, c), hidden.weight(1, c) / 3.0))
        && close(hidden.bias()[0], hidden.bias()[1] / 3.0)
}

/// `φ(x) = Σ_i φ̃(Σ_j λ_j ψ_i(x_j))` over `2d + 1` clipped inner networks
/// `ψ_i` and one shared outer network `φ̃`.
#[derive(Debug, Clone, PartialEq)]
pub struct KstComposition {
    domain: (f64, f64),
    lambda: Vec<f64>,
    inner: Vec<Network>,
    outer: Network,
}

/// Builds a composition, checking the branch count, `λ` and the clip stages.
pub fn compose_kst(domain: (f64, f64), lambda: Vec<f64>, inner: Vec<Network>, outer: Network) -> Result<KstComposition> {
    rescale_maps(domain.0, domain.1)?;
    validate_lambda(&lambda)?;
    let d = lambda.len();
    if inner.len() != 2 * d + 1 {
        return Err(Error::DimensionMismatch {
            expected: 2 * d + 1,
            got: inner.len(),
            context: "inner network count".into(),
        });
    }
    for (i, net) in inner.iter().enumerate() {
        if net.input_dim() != 1 || !ends_with_clip(net) {
            return Err(Error::Malformed(format!("inner network {i} does not end with the clip fragment")));
        }
    }
    if outer.input_dim() != 1 || outer.output_dim() != 1 {
        return Err(Error::Malformed("outer network must be scalar".into()));
    }
    Ok(KstComposition {
        domain,
        lambda,
        inner,
        outer,
    })
}

impl KstComposition {
    pub fn d(&self) -> usize {
        self.lambda.len()
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn inner(&self) -> &[Network] {
        &self.inner
    }

    pub fn outer(&self) -> &Network {
        &self.outer
    }

    /// Same composition with the inner networks reordered by `perm`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.inner.len()];
        if perm.len() != self.inner.len() || perm.iter().any(|&p| p >= seen.len() || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidArgument(format!("{perm:?} is not a permutation")));
        }
        Ok(Self {
            inner: perm.iter().map(|&p| self.inner[p].clone()).collect(),
            ..self.clone()
        })
    }

    /// `ψ_i(t)` for every branch `i`.
    pub fn inner_values(&self, t: f64) -> Result<Vec<f64>> {
        self.inner.iter().map(|net| net.evaluate_scalar(t)).collect()
    }

    /// Outer arguments `s_i = Σ_j λ_j ψ_i(x_j)`.
    pub fn branch_arguments(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        let per_coord = x.iter().map(|&t| self.inner_values(t)).collect::<Result<Vec<_>>>()?;
        Ok(self.combine(&per_coord))
    }

    pub(crate) fn combine(&self, per_coord: &[Vec<f64>]) -> Vec<f64> {
        (0..self.inner.len())
            .map(|i| self.lambda.iter().zip(per_coord).map(|(l, psi)| l * psi[i]).sum())
            .collect()
    }

    pub(crate) fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.d() {
            return Err(Error::DimensionMismatch {
                expected: self.d(),
                got: x.len(),
                context: "composition input".into(),
            });
        }
        Ok(())
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        let args = self.branch_arguments(x)?;
        args.iter().try_fold(0.0, |acc, &s| Ok(acc + self.outer.evaluate_scalar(s)?))
    }
}

/// Intrinsic neurons of a composition, with each shared unit counted once.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NeuronCount {
    /// Hidden neurons of each clipped inner network plus its output unit.
    pub per_inner: Vec<usize>,
    pub lambda_combination: usize,
    pub outer: usize,
    pub final_sum: usize,
    pub total: usize,
}

impl NeuronCount {
    /// `"1097 = 183×5 + 1 + 180 + 1"` when all inner counts agree, otherwise the
    /// inner counts are listed one by one.
    pub fn breakdown(&self) -> String {
        let inner = match self.per_inner.first() {
            Some(&first) if self.per_inner.iter().all(|&p| p == first) => {
                format!("{first}×{}", self.per_inner.len())
            }
            _ => self.per_inner.iter().map(usize::to_string).collect::<Vec<_>>().join(" + "),
        };
        format!(
            "{} = {inner} + {} + {} + {}",
            self.total, self.lambda_combination, self.outer, self.final_sum
        )
    }
}

pub fn count_intrinsic_neurons(comp: &KstComposition) -> NeuronCount {
    let per_inner: Vec<usize> = comp.inner.iter().map(|n| n.hidden_neurons() + 1).collect();
    let outer = comp.outer.hidden_neurons();
    let total = per_inner.iter().sum::<usize>() + 1 + outer + 1;
    NeuronCount {
        per_inner,
        lambda_combination: 1,
        outer,
        final_sum: 1,
        total,
    }
}

/// Neuron count of a composition whose inner and outer networks fill the
/// width-36/depth-5 template: `366d + 365`.
pub const fn full_width_count(d: usize) -> usize {
    366 * d + 365
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::AffineLayer;
    use crate::univariate::{embed_in_template, uniform_grid};
    use crate::FeedforwardNetwork;

    /// `σ(x) = x` on `[0, 1]`.
    pub(crate) fn unit_identity() -> Network {
        FeedforwardNetwork::new(
            1,
            vec![
                AffineLayer::new(1, 1, vec![1.0], vec![0.0], true).unwrap(),
                AffineLayer::new(1, 1, vec![1.0], vec![0.0], false).unwrap(),
            ],
        )
        .unwrap()
    }

    fn clipped_identity() -> Network {
        clip_inner(&unit_identity(), &uniform_grid(0.0, 1.0, 11)).unwrap()
    }

    #[test]
    fn rescale_examples() {
        let (f, g) = rescale_maps(0.0, 1.0).unwrap();
        assert_eq!(f.apply(0.0), 0.0);
        assert_eq!(f.apply(1.0), 1.0);
        let (f, g2) = rescale_maps(-1.0, 3.0).unwrap();
        assert_eq!(f.apply(1.0), 0.5);
        assert_eq!(f.apply(-1.0), 0.0);
        assert_eq!(f.apply(3.0), 1.0);
        for x in [-1.0, -0.3, 0.7, 2.9] {
            assert!((g2.apply(f.apply(x)) - x).abs() < 1e-15);
        }
        assert_eq!(g.apply(0.25), 0.25);
        assert!(rescale_maps(1.0, 1.0).is_err());
        assert!(rescale_maps(2.0, 1.0).is_err());
    }

    #[test]
    fn clip_inner_examples() {
        for (raw, want) in [(1.3, 1.0), (-0.2, 0.0), (0.47, 0.47)] {
            let net = FeedforwardNetwork::constant(1, raw).unwrap();
            let clipped = clip_inner(&net, &[0.0, 1.0]).unwrap();
            assert!((clipped.evaluate_scalar(0.5).unwrap() - want).abs() < 1e-12);
            assert!(ends_with_clip(&clipped));
        }
        let wild = FeedforwardNetwork::constant(1, 2.5).unwrap();
        assert!(matches!(clip_inner(&wild, &[0.0]), Err(Error::ClipRange { value, .. }) if value == 2.5));
    }

    #[test]
    fn lambda_validation() {
        assert!(validate_lambda(&[0.5, 0.5]).is_ok());
        assert!(validate_lambda(&[0.3, 0.3]).is_ok());
        assert!(validate_lambda(&[0.6, 0.5]).is_err());
        assert!(validate_lambda(&[1.0, 0.0]).is_err());
        assert!(validate_lambda(&[]).is_err());
    }

    #[test]
    fn three_identity_branches() {
        let comp = compose_kst((0.0, 1.0), vec![1.0], vec![clipped_identity(); 3], unit_identity()).unwrap();
        assert!((comp.evaluate(&[0.5]).unwrap() - 1.5).abs() < 1e-12);
        assert!((comp.evaluate(&[0.2]).unwrap() - 0.6).abs() < 1e-12);
    }

    #[test]
    fn clip_as_outer() {
        let comp = compose_kst((0.0, 1.0), vec![1.0], vec![clipped_identity(); 3], clip01_fragment()).unwrap();
        for x in uniform_grid(0.0, 1.0, 21) {
            let want = 3.0 * x.clamp(0.0, 1.0);
            assert!((comp.evaluate(&[x]).unwrap() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn composition_validation() {
        let inner = vec![clipped_identity(); 5];
        assert!(matches!(
            compose_kst((0.0, 1.0), vec![1.0], inner.clone(), unit_identity()),
            Err(Error::DimensionMismatch { expected: 3, got: 5, .. })
        ));
        assert!(compose_kst((0.0, 1.0), vec![0.7, 0.7], inner.clone(), unit_identity()).is_err());
        let unclipped = vec![unit_identity(); 3];
        assert!(matches!(
            compose_kst((0.0, 1.0), vec![1.0], unclipped, unit_identity()),
            Err(Error::Malformed(_))
        ));
        let comp = compose_kst((0.0, 1.0), vec![0.5, 0.5], inner, unit_identity()).unwrap();
        assert!(comp.evaluate(&[0.1]).is_err());
    }

    #[test]
    fn counts_full_width_and_small_inner() {
        let template = embed_in_template(&unit_identity(), 0.0, 1.0).unwrap();
        assert_eq!(template.hidden_neurons(), 180);
        let inner = clip_inner(&template, &uniform_grid(0.0, 1.0, 11)).unwrap();
        for d in 1..=8 {
            let comp = compose_kst((0.0, 1.0), vec![1.0 / d as f64; d], vec![inner.clone(); 2 * d + 1], template.clone()).unwrap();
            let count = count_intrinsic_neurons(&comp);
            assert_eq!(count.total, full_width_count(d));
            assert_eq!(count.total, (36 * 5 + 3) * (2 * d + 1) + 1 + 36 * 5 + 1);
        }
        let comp = compose_kst((0.0, 1.0), vec![0.5, 0.5], vec![inner.clone(); 5], template.clone()).unwrap();
        assert_eq!(count_intrinsic_neurons(&comp).breakdown(), "1097 = 183×5 + 1 + 180 + 1");
        let comp = compose_kst((0.0, 1.0), vec![1.0], vec![inner; 3], template.clone()).unwrap();
        assert_eq!(count_intrinsic_neurons(&comp).total, 731);

        let small_raw = FeedforwardNetwork::new(
            1,
            vec![
                AffineLayer::new(10, 1, vec![0.1; 10], vec![0.0; 10], true).unwrap(),
                AffineLayer::new(1, 10, vec![0.1; 10], vec![0.0], false).unwrap(),
            ],
        )
        .unwrap();
        let small = clip_inner(&small_raw, &uniform_grid(0.0, 1.0, 11)).unwrap();
        let comp = compose_kst((0.0, 1.0), vec![0.5, 0.5], vec![small; 5], template).unwrap();
        let count = count_intrinsic_neurons(&comp);
        assert_eq!(count.total, 247);
        assert_eq!(count.per_inner, vec![13; 5]);
    }

    #[test]
    fn permutation_check() {
        let comp = compose_kst((0.0, 1.0), vec![1.0], vec![clipped_identity(); 3], unit_identity()).unwrap();
        assert!(comp.permuted(&[2, 0, 1]).is_ok());
        assert!(comp.permuted(&[0, 0, 1]).is_err());
        assert!(comp.permuted(&[0, 1]).is_err());
    }
}
