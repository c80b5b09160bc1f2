//! End-to-end multivariate approximation and grid verification.

use std::collections::HashMap;

use super::budget::{compute_budget, ErrorBudget, BUDGET_SAMPLES};
use super::compose::{clip_inner, compose_kst, rescale_maps, KstComposition};
use super::triple::SyntheticKstTriple;
use crate::error::{Error, Result};
use crate::table::{BranchDiagnostic, ErrorTable};
use crate::univariate::{fit_univariate, uniform_grid, FitReport, SearchBudget, VALIDATION_POINTS};

/// Grid points per axis used for verification in dimension `d`.
pub fn default_axis_points(d: usize) -> usize {
    match d {
        0 | 1 => VALIDATION_POINTS,
        2 => 41,
        3 => 13,
        _ => 5,
    }
}

/// Tensor grid of `[a, b]^d` with `per_axis` points per axis, first coordinate
/// varying slowest.
pub fn tensor_grid(a: f64, b: f64, d: usize, per_axis: usize) -> Vec<Vec<f64>> {
    let axis = uniform_grid(a, b, per_axis);
    let mut points: Vec<Vec<f64>> = vec![Vec::with_capacity(d)];
    for _ in 0..d {
        points = points
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |&t| {
                    let mut q = p.clone();
                    q.push(t);
                    q
                })
            })
            .collect();
    }
    points
}

/// Result of [`approximate_multivariate`].
#[derive(Debug, Clone)]
pub struct KstRun {
    pub composition: KstComposition,
    pub table: ErrorTable,
    pub budget: ErrorBudget,
    pub outer_report: FitReport,
    pub inner_reports: Vec<FitReport>,
}

impl KstRun {
    pub fn met(&self) -> bool {
        self.table.sup() < self.budget.epsilon
    }

    pub fn evals(&self) -> usize {
        self.outer_report.budget_used + self.inner_reports.iter().map(|r| r.budget_used).sum::<usize>()
    }
}

fn sub_fit(component: String, result: Result<FitReport>) -> Result<FitReport> {
    result.map_err(|e| match e {
        Error::Unmet(best) => Error::SubFit {
            component,
            best: best.sup_error,
            target: best.epsilon,
        },
        other => other,
    })
}

/// Fits the outer network to `g` within `ε/(2(2d+1))` and each inner network
/// to `h_i` composed with the forward rescaling within `δ`, clips the inner
/// networks, composes, and measures the error on the default tensor grid.
///
/// The `2d + 2` sub-fits run on separate threads; each uses its own seed
/// derived from `search.seed`, so results do not depend on scheduling.
pub fn approximate_multivariate(
    triple: &SyntheticKstTriple,
    a: f64,
    b: f64,
    eps: f64,
    search: &SearchBudget,
) -> Result<KstRun> {
    let (forward, _) = rescale_maps(a, b)?;
    let d = triple.d();
    let budget = compute_budget(triple.g_fn().as_ref(), d, eps, BUDGET_SAMPLES)?;
    let seeded = |k: u64| SearchBudget {
        seed: search.seed.wrapping_add(k),
        ..*search
    };

    let (outer, inner) = std::thread::scope(|scope| {
        let outer = scope.spawn(|| {
            let g = triple.g_fn();
            sub_fit(
                "outer".into(),
                fit_univariate(move |z| g(z), 0.0, 1.0, budget.per_term_outer_tol, &seeded(0)),
            )
        });
        let inner: Vec<_> = (0..2 * d + 1)
            .map(|i| {
                let h = triple.h_fn(i);
                let sb = seeded(i as u64 + 1);
                scope.spawn(move || {
                    sub_fit(
                        format!("inner {i}"),
                        fit_univariate(move |x| h(forward.apply(x)), a, b, budget.delta, &sb),
                    )
                })
            })
            .collect();
        let outer = outer.join().expect("outer fit thread");
        let inner: Vec<_> = inner.into_iter().map(|h| h.join().expect("inner fit thread")).collect();
        (outer, inner)
    });
    let outer_report = outer?;
    let inner_reports = inner.into_iter().collect::<Result<Vec<_>>>()?;

    let check = uniform_grid(a, b, VALIDATION_POINTS);
    let clipped = inner_reports
        .iter()
        .map(|r| clip_inner(&r.network, &check))
        .collect::<Result<Vec<_>>>()?;
    let outer_net = outer_report.network.clone().with_metadata("role", "outer");
    let composition = compose_kst((a, b), triple.lambda().to_vec(), clipped, outer_net)?;

    let grid = tensor_grid(a, b, d, default_axis_points(d));
    let table = verify_against_triple(&composition, triple, &grid)?;
    Ok(KstRun {
        composition,
        table,
        budget,
        outer_report,
        inner_reports,
    })
}

/// Inner network values per coordinate value, computed once per distinct value.
struct InnerCache<'c> {
    comp: &'c KstComposition,
    values: HashMap<u64, Vec<f64>>,
}

impl<'c> InnerCache<'c> {
    fn new(comp: &'c KstComposition) -> Self {
        Self {
            comp,
            values: HashMap::new(),
        }
    }

    fn per_coord(&mut self, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        x.iter()
            .map(|&t| {
                if let Some(v) = self.values.get(&t.to_bits()) {
                    return Ok(v.clone());
                }
                let v = self.comp.inner_values(t)?;
                self.values.insert(t.to_bits(), v.clone());
                Ok(v)
            })
            .collect()
    }
}

/// Per-point errors of `comp` against `f_reference` on `grid`.
pub fn verify_error<F: Fn(&[f64]) -> f64>(comp: &KstComposition, f_reference: F, grid: &[Vec<f64>]) -> Result<ErrorTable> {
    let mut cache = InnerCache::new(comp);
    let mut table = ErrorTable::default();
    let mut range = (f64::INFINITY, f64::NEG_INFINITY);
    for x in grid {
        comp.check_point(x)?;
        let args = comp.combine(&cache.per_coord(x)?);
        let mut phi = 0.0;
        for &s in &args {
            range = (range.0.min(s), range.1.max(s));
            phi += comp.outer().evaluate_scalar(s)?;
        }
        table.push(x.clone(), f_reference(x), phi);
    }
    if !grid.is_empty() {
        table.outer_arg_range = Some(range);
    }
    Ok(table)
}

/// [`verify_error`] against the function induced by `triple`, with per-branch
/// diagnostics: the discrepancy between the exact and realized outer arguments,
/// and the outer mismatch `|g(s) - φ̃(s)|` at the realized arguments.
pub fn verify_against_triple(comp: &KstComposition, triple: &SyntheticKstTriple, grid: &[Vec<f64>]) -> Result<ErrorTable> {
    if triple.d() != comp.d() {
        return Err(Error::DimensionMismatch {
            expected: comp.d(),
            got: triple.d(),
            context: "triple dimension".into(),
        });
    }
    let (a, b) = comp.domain();
    let (forward, _) = rescale_maps(a, b)?;
    let mut cache = InnerCache::new(comp);
    let mut table = ErrorTable::default();
    let mut branches: Vec<BranchDiagnostic> = (0..2 * comp.d() + 1)
        .map(|branch| BranchDiagnostic {
            branch,
            inner_discrepancy: 0.0,
            outer_mismatch: 0.0,
        })
        .collect();
    let mut range = (f64::INFINITY, f64::NEG_INFINITY);
    for x in grid {
        comp.check_point(x)?;
        let unit: Vec<f64> = x.iter().map(|&t| forward.apply(t)).collect();
        let exact = triple.arguments(&unit);
        let realized = comp.combine(&cache.per_coord(x)?);
        let mut phi = 0.0;
        for (diag, (&e, &s)) in branches.iter_mut().zip(exact.iter().zip(&realized)) {
            let out = comp.outer().evaluate_scalar(s)?;
            phi += out;
            range = (range.0.min(s), range.1.max(s));
            diag.inner_discrepancy = diag.inner_discrepancy.max((e - s).abs());
            diag.outer_mismatch = diag.outer_mismatch.max((triple.g(s) - out).abs());
        }
        let f: f64 = exact.iter().map(|&e| triple.g(e)).sum();
        table.push(x.clone(), f, phi);
    }
    if !grid.is_empty() {
        table.outer_arg_range = Some(range);
    }
    table.branches = branches;
    Ok(table)
}
