//! Built-in target functions addressed by id.

use std::sync::Arc;

use anyhow::{bail, Result};
use euaf::kst::SyntheticKstTriple;
use euaf::width_bound::{example_family, twice_abs, ExampleFamily, ScalarFn};

pub const UNIVARIATE_IDS: &str = "const<v> (e.g. const0.3), linear, abs-half, sin2pi";
pub const KST_IDS: &str = "kst-identity, kst-power";
pub const FAMILY_IDS: &str = "abs2";

pub fn univariate(id: &str) -> Result<ScalarFn> {
    let f: ScalarFn = match id {
        "linear" => Arc::new(|x| x),
        "abs-half" => Arc::new(|x: f64| (x - 0.5).abs()),
        "sin2pi" => Arc::new(|x: f64| (2.0 * std::f64::consts::PI * x).sin()),
        _ => match id.strip_prefix("const").map(str::parse::<f64>) {
            Some(Ok(v)) if v.is_finite() => Arc::new(move |_| v),
            _ => bail!("unknown univariate target `{id}`; expected one of {UNIVARIATE_IDS}"),
        },
    };
    Ok(f)
}

/// Representation triple for `id` in dimension `d`, optionally with custom weights.
pub fn kst_triple(id: &str, d: usize, lambda: Option<Vec<f64>>) -> Result<SyntheticKstTriple> {
    if d == 0 {
        bail!("--d must be at least 1");
    }
    let base = match id {
        "kst-identity" => SyntheticKstTriple::identity(d)?,
        "kst-power" => SyntheticKstTriple::power(d)?,
        _ => bail!("unknown composition target `{id}`; expected one of {KST_IDS}"),
    };
    match lambda {
        None => Ok(base),
        Some(lambda) => {
            if lambda.len() != d {
                bail!("--lambda needs {d} values, got {}", lambda.len());
            }
            let h = (0..2 * d + 1).map(|i| base.h_fn(i)).collect();
            Ok(SyntheticKstTriple::new(base.g_fn(), h, lambda)?)
        }
    }
}

/// Lower-bound family for `id` in dimension `d`.
pub fn family(id: &str, d: usize) -> Result<ExampleFamily> {
    match id {
        "abs2" => Ok(example_family(d, vec![1.0; d], vec![twice_abs(); d])?),
        _ => bail!("unknown family `{id}`; expected one of {FAMILY_IDS}"),
    }
}
