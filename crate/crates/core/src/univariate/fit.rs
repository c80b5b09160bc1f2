//! Fixed-architecture univariate fitting.

use serde::Serialize;

use super::decoder::{fit_point_values, plateau_capacity};
use super::indexer::build_indexer_counted;
use super::partition::{choose_partition, DEFAULT_MAX_INTERVALS};
use super::pl::PiecewiseLinear;
use super::search::{jittered_starts, pattern_search, PatternOptions, SearchBudget};
use crate::error::{Error, Result};
use crate::format::serialize_network;
use crate::network::{AffineLayer, FeedforwardNetwork};
use crate::Network;

pub const TEMPLATE_WIDTH: usize = 36;
pub const TEMPLATE_DEPTH: usize = 5;
pub const VALIDATION_POINTS: usize = 2001;
/// The fitter aims for `ε / GRID_HEADROOM` since a grid maximum understates the sup norm.
pub const GRID_HEADROOM: f64 = 1.1;

const TRAINING_POINTS: usize = 4001;

/// The `[input, 36 × 5, output]` fingerprint every fitted network has.
pub fn template_fingerprint() -> Vec<usize> {
    let mut fp = vec![1];
    fp.extend(std::iter::repeat(TEMPLATE_WIDTH).take(TEMPLATE_DEPTH));
    fp.push(1);
    fp
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMethod {
    /// Partition, indexer and decoder.
    Structured,
    /// Multi-start search over piecewise-linear parameters of the template.
    Refined,
}

#[derive(Debug, Clone)]
pub struct FitReport {
    pub network: Network,
    /// Max error on the validation grid.
    pub sup_error: f64,
    pub epsilon: f64,
    pub domain: (f64, f64),
    /// Partition size chosen from the modulus of continuity (0 if none fits the cap).
    pub n: usize,
    pub budget_used: usize,
    pub architecture_fingerprint: Vec<usize>,
    pub seed: u64,
    pub method: FitMethod,
    pub max_abs_param: f64,
}

#[derive(Serialize)]
struct FitRecord<'a> {
    epsilon: f64,
    domain: [f64; 2],
    sup_error: f64,
    met: bool,
    n: usize,
    budget_used: usize,
    architecture_fingerprint: &'a [usize],
    seed: u64,
    method: FitMethod,
    max_abs_param: f64,
    network: String,
}

impl FitReport {
    pub fn met(&self) -> bool {
        self.sup_error < self.epsilon
    }

    /// Structured JSON record; the network is embedded in its text format.
    pub fn to_json(&self) -> String {
        let rec = FitRecord {
            epsilon: self.epsilon,
            domain: [self.domain.0, self.domain.1],
            sup_error: self.sup_error,
            met: self.met(),
            n: self.n,
            budget_used: self.budget_used,
            architecture_fingerprint: &self.architecture_fingerprint,
            seed: self.seed,
            method: self.method,
            max_abs_param: self.max_abs_param,
            network: serialize_network(&self.network),
        };
        serde_json::to_string_pretty(&rec).expect("serializable record")
    }
}

/// `n` uniform points of `[a, b]` including both ends.
pub fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let last = (n - 1) as f64;
    (0..n)
        .map(|i| if i + 1 == n { b } else { a + (b - a) * (i as f64 / last) })
        .collect()
}

/// `max |f(x) - net(x)|` over `grid`.
pub fn sup_error<F: Fn(f64) -> f64>(net: &Network, f: F, grid: &[f64]) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    grid.iter().try_fold(0.0_f64, |m, &x| {
        Ok(m.max((f(x) - net.evaluate_scalar(x)?).abs()))
    })
}

/// Embeds a scalar network with width ≤ 36 and depth ≤ 5 into the fixed
/// template. Extra depth is added with carry layers `σ((s - lo)/(hi - lo))`,
/// which are exact when the network output `s` stays in `[lo, hi]`; extra
/// width is zero neurons.
pub fn embed_in_template(net: &Network, lo: f64, hi: f64) -> Result<Network> {
    if net.width() > TEMPLATE_WIDTH || net.depth() > TEMPLATE_DEPTH {
        return Err(Error::InvalidArgument(format!(
            "network {:?} exceeds the width-{TEMPLATE_WIDTH} depth-{TEMPLATE_DEPTH} template",
            net.fingerprint()
        )));
    }
    if net.input_dim() != 1 || net.output_dim() != 1 {
        return Err(Error::InvalidArgument("template networks are scalar".into()));
    }
    let span = hi - lo;
    let carry = if span > 0.0 {
        FeedforwardNetwork::new(
            1,
            vec![
                AffineLayer::new(1, 1, vec![1.0 / span], vec![-lo / span], true)?,
                AffineLayer::new(1, 1, vec![span], vec![lo], false)?,
            ],
        )?
    } else {
        FeedforwardNetwork::new(
            1,
            vec![
                AffineLayer::new(1, 1, vec![0.0], vec![0.0], true)?,
                AffineLayer::new(1, 1, vec![0.0], vec![lo], false)?,
            ],
        )?
    };
    let mut deep = net.clone();
    while deep.depth() < TEMPLATE_DEPTH {
        deep = deep.then(&carry)?;
    }
    let metadata = net.metadata().clone();
    let old = deep.layers();
    let mut layers = Vec::with_capacity(old.len());
    for (i, layer) in old.iter().enumerate() {
        let rows = if layer.activated() { TEMPLATE_WIDTH } else { layer.rows() };
        let cols = if i == 0 { layer.cols() } else { TEMPLATE_WIDTH };
        let mut w = vec![0.0; rows * cols];
        for r in 0..layer.rows() {
            for c in 0..layer.cols() {
                w[r * cols + c] = layer.weight(r, c);
            }
        }
        let mut b = layer.bias().to_vec();
        b.resize(rows, 0.0);
        layers.push(AffineLayer::new(rows, cols, w, b, layer.activated())?);
    }
    Ok(FeedforwardNetwork::new(1, layers)?.with_metadata_map(metadata))
}

/// Fits `f` on `[a, b]` to tolerance `eps` inside the fixed template.
///
/// First tries the partition/indexer/decoder construction; if that misses the
/// target it falls back to multi-start pattern search over a 36-knot
/// piecewise-linear realization of the same template. On failure the best
/// report is returned in [`Error::Unmet`].
pub fn fit_univariate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    eps: f64,
    search: &SearchBudget,
) -> Result<FitReport> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {eps}")));
    }
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidArgument(format!("bad domain [{a}, {b}]")));
    }
    let target = eps / GRID_HEADROOM;
    let validation = uniform_grid(a, b, VALIDATION_POINTS);
    let mut used = 0;

    let plan = match choose_partition(&f, a, b, eps, DEFAULT_MAX_INTERVALS) {
        Ok(plan) => Some(plan),
        Err(Error::Infeasible(_)) => None,
        Err(e) => return Err(e),
    };
    let n = plan.as_ref().map_or(0, |p| p.n);

    let report = |network: Network, sup_error: f64, used: usize, method: FitMethod| FitReport {
        max_abs_param: network.max_abs_param(),
        architecture_fingerprint: network.fingerprint(),
        network,
        sup_error,
        epsilon: eps,
        domain: (a, b),
        n,
        budget_used: used,
        seed: search.seed,
        method,
    };

    let mut best: Option<FitReport> = None;
    if let Some(plan) = plan.as_ref().filter(|p| p.n <= plateau_capacity()) {
        if let Some((net, evals)) = structured(plan, search)? {
            used += evals;
            let err = sup_error(&net, &f, &validation)?;
            let r = report(net, err, used, FitMethod::Structured);
            if err < target {
                return Ok(r);
            }
            best = Some(r);
        }
    }

    let remaining = SearchBudget {
        max_evals: search.max_evals.saturating_sub(used),
        ..*search
    };
    let (pl, evals) = refine_piecewise_linear(&f, a, b, target, &remaining)?;
    used += evals;
    let (lo, hi) = pl.range();
    let net = embed_in_template(&pl.to_network(a, b)?, lo, hi)?.with_metadata("role", "univariate");
    let err = sup_error(&net, &f, &validation)?;
    let r = report(net, err, used, FitMethod::Refined);
    if err < target {
        return Ok(r);
    }
    let best = match best {
        Some(s) if s.sup_error < r.sup_error => s,
        _ => r,
    };
    Err(Error::Unmet(Box::new(best)))
}

/// Partition → indexer → decoder, embedded in the template. `None` when a
/// component misses its contract.
fn structured(plan: &super::partition::PartitionPlan, search: &SearchBudget) -> Result<Option<(Network, usize)>> {
    let lo = plan.values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = plan.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    let normalized: Vec<f64> = plan
        .values
        .iter()
        .map(|v| if span > 0.0 { ((v - lo) / span).clamp(0.0, 1.0) } else { 0.0 })
        .collect();
    let (indexer, evals) = match build_indexer_counted(plan, search) {
        Ok(built) => built,
        Err(Error::Shortfall(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let decoder = match fit_point_values(&normalized, 1e-9, search) {
        Ok(net) => net,
        Err(Error::Shortfall(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let rescale = FeedforwardNetwork::affine(vec![span], lo)?;
    let net = indexer.then(&decoder)?.then(&rescale)?;
    let net = embed_in_template(&net, lo, hi)?.with_metadata("role", "univariate");
    Ok(Some((net, evals)))
}

/// Multi-start pattern search over interior knot positions and knot values of
/// a `TEMPLATE_WIDTH`-knot interpolant on `[a, b]` (endpoints fixed).
fn refine_piecewise_linear<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    target: f64,
    search: &SearchBudget,
) -> Result<(PiecewiseLinear, usize)> {
    let m = TEMPLATE_WIDTH;
    let train = uniform_grid(a, b, TRAINING_POINTS);
    let f_train: Vec<f64> = train.iter().map(|&x| f(x)).collect();
    if let Some(v) = f_train.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            context: format!("target value {v}"),
        });
    }
    let f_lo = f_train.iter().copied().fold(f64::INFINITY, f64::min);
    let f_hi = f_train.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let f_scale = if f_hi > f_lo { f_hi - f_lo } else { 1.0 };

    // Parameters: m - 2 interior positions in [0, 1], then m normalized values.
    let decode = |p: &[f64]| -> Option<PiecewiseLinear> {
        let mut knots = Vec::with_capacity(m);
        knots.push(a);
        knots.extend(p[..m - 2].iter().map(|u| a + (b - a) * u));
        knots.push(b);
        let values = p[m - 2..].iter().map(|v| f_lo + f_scale * v).collect();
        PiecewiseLinear::new(knots, values).ok()
    };
    let objective = |p: &[f64]| -> f64 {
        let Some(pl) = decode(p) else {
            return f64::INFINITY;
        };
        train
            .iter()
            .zip(&f_train)
            .map(|(&x, &y)| (pl.eval(x) - y).abs())
            .fold(0.0, f64::max)
    };
    let start_from = |positions: Vec<f64>| -> Vec<f64> {
        let mut p: Vec<f64> = positions[1..m - 1].to_vec();
        p.extend(positions.iter().map(|&u| (f(a + (b - a) * u) - f_lo) / f_scale));
        p
    };

    let uniform: Vec<f64> = (0..m).map(|j| j as f64 / (m - 1) as f64).collect();
    let mut starts = vec![start_from(uniform.clone()), start_from(curvature_positions(&f_train, m))];
    let mut rng = search.rng(0x6b6e6f74);
    for jitter in jittered_starts(&uniform[1..m - 1], search.restarts, 0.4 / m as f64, &mut rng) {
        let mut pos = vec![0.0];
        let mut sorted = jitter;
        sorted.iter_mut().for_each(|u| *u = u.clamp(1e-6, 1.0 - 1e-6));
        sorted.sort_by(f64::total_cmp);
        pos.extend(sorted);
        pos.push(1.0);
        starts.push(start_from(pos));
    }
    // Best start first.
    let mut scored: Vec<(f64, Vec<f64>)> = starts.into_iter().map(|s| (objective(&s), s)).collect();
    let mut evals = scored.len();
    scored.sort_by(|x, y| x.0.total_cmp(&y.0));
    let ordered: Vec<Vec<f64>> = scored.into_iter().map(|(_, s)| s).collect();
    let out = pattern_search(
        objective,
        &ordered,
        PatternOptions {
            initial_step: 0.02,
            min_step: 1e-9,
            target,
            max_evals: search.max_evals.saturating_sub(evals).max(1),
        },
    );
    evals += out.evals;
    let pl = decode(&out.best).expect("search only accepts valid parameters");
    Ok((pl, evals))
}

/// Knot positions in `[0, 1]` equidistributing `sqrt|f''|` blended with a
/// uniform density.
fn curvature_positions(samples: &[f64], m: usize) -> Vec<f64> {
    let n = samples.len();
    let h = 1.0 / (n - 1) as f64;
    let dens: Vec<f64> = (0..n - 1)
        .map(|i| {
            let j = i.clamp(1, n - 2);
            let second = (samples[j + 1] - 2.0 * samples[j] + samples[j - 1]) / (h * h);
            second.abs().sqrt()
        })
        .collect();
    let total: f64 = dens.iter().sum::<f64>() * h;
    let mean = if total > 0.0 { total } else { 1.0 };
    let mut cum = vec![0.0];
    for d in &dens {
        let w = 0.5 * d / mean + 0.5;
        cum.push(cum.last().unwrap() + w * h);
    }
    let end = *cum.last().unwrap();
    let mut out = Vec::with_capacity(m);
    let mut i = 0;
    for j in 0..m {
        let level = end * j as f64 / (m - 1) as f64;
        while i + 1 < n - 1 && cum[i + 1] < level {
            i += 1;
        }
        let seg = cum[i + 1] - cum[i];
        let t = if seg > 0.0 { ((level - cum[i]) / seg).clamp(0.0, 1.0) } else { 0.0 };
        out.push(((i as f64 + t) * h).clamp(0.0, 1.0));
    }
    out[0] = 0.0;
    out[m - 1] = 1.0;
    // Enforce strict increase.
    for j in 1..m {
        if out[j] <= out[j - 1] {
            out[j] = out[j - 1] + 1e-9;
        }
    }
    if out[m - 1] > 1.0 || out[m - 2] >= 1.0 {
        return (0..m).map(|j| j as f64 / (m - 1) as f64).collect();
    }
    out
}
