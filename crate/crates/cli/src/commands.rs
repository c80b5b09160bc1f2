//! Subcommand implementations.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use euaf::format::deserialize_network;
use euaf::kst::{
    approximate_multivariate, count_intrinsic_neurons, serialize_composition, tensor_grid, validate_lambda,
    verify_against_triple, KstRun,
};
use euaf::table::ErrorTable;
use euaf::univariate::{fit_univariate, uniform_grid, FitReport, SearchBudget};
use euaf::width_bound::{random_narrow_network, two_point_gap, ExampleFamily};
use euaf::{Error, Network};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::output::{eps_tag, OutDir};
use crate::{targets, CommonArgs, ComposeArgs, FitArgs, Outcome, UsageError, WitnessArgs};

fn usage(e: impl std::fmt::Display) -> anyhow::Error {
    UsageError(e.to_string()).into()
}

fn search_budget(common: &CommonArgs) -> SearchBudget {
    SearchBudget {
        max_evals: common.budget,
        seed: common.seed,
        ..SearchBudget::default()
    }
}

pub fn fit(args: &FitArgs) -> Result<Outcome> {
    let f = targets::univariate(&args.target).map_err(usage)?;
    if let Some(eps) = args.eps.iter().find(|e| !(**e > 0.0)) {
        return Err(usage(format!("--eps values must be positive, got {eps}")));
    }
    if args.grid < 2 {
        return Err(usage("--grid needs at least 2 points"));
    }
    let (a, b) = args.domain;
    let search = search_budget(&args.common);
    let mut out = OutDir::create(&args.common.out)?;
    let mut all_met = true;
    for &eps in &args.eps {
        let report = match fit_univariate(f.as_ref(), a, b, eps, &search) {
            Ok(r) => r,
            Err(Error::Unmet(best)) => *best,
            Err(e) => return Err(e.into()),
        };
        let tag = eps_tag(eps);
        let mut table = ErrorTable::default();
        for x in uniform_grid(a, b, args.grid) {
            table.push(vec![x], f(x), report.network.evaluate_scalar(x)?);
        }
        out.write(&format!("fit_eps{tag}.json"), &(report.to_json() + "\n"))?;
        out.write(&format!("fit_eps{tag}_errors.csv"), &table.to_csv())?;
        out.write(&format!("fit_eps{tag}_summary.json"), &(table.summary_json() + "\n"))?;
        print_fit(&report);
        all_met &= report.met();
    }
    out.finish("fit", args, all_met)?;
    Ok(if all_met { Outcome::Met } else { Outcome::Unmet })
}

fn print_fit(r: &FitReport) {
    let status = if r.met() { "met" } else { "NOT met, best achieved" };
    println!(
        "eps {}: sup_error {:e} ({status}); n = {}, method {:?}, evals {}, architecture {:?}",
        r.epsilon, r.sup_error, r.n, r.method, r.budget_used, r.architecture_fingerprint
    );
}

pub fn compose(args: &ComposeArgs) -> Result<Outcome> {
    if let Some(lambda) = &args.lambda {
        validate_lambda(lambda).map_err(usage)?;
    }
    if !(args.eps > 0.0) {
        return Err(usage(format!("--eps must be positive, got {}", args.eps)));
    }
    if args.grid.is_some_and(|g| g < 2) {
        return Err(usage("--grid needs at least 2 points per axis"));
    }
    let triple = targets::kst_triple(&args.target, args.d, args.lambda.clone()).map_err(usage)?;
    let (a, b) = args.domain;
    let search = search_budget(&args.common);
    let mut out = OutDir::create(&args.common.out)?;

    let run = match approximate_multivariate(&triple, a, b, args.eps, &search) {
        Ok(run) => run,
        Err(e @ (Error::SubFit { .. } | Error::Infeasible(_))) => {
            eprintln!("composition failed: {e}");
            out.write_json("summary.json", &json!({ "met": false, "failure": e.to_string() }))?;
            out.finish("compose", args, false)?;
            return Ok(Outcome::Unmet);
        }
        Err(e) => return Err(e.into()),
    };
    let table = match args.grid {
        Some(n) => verify_against_triple(&run.composition, &triple, &tensor_grid(a, b, args.d, n))?,
        None => run.table.clone(),
    };
    let met = table.sup() < args.eps;
    let count = count_intrinsic_neurons(&run.composition);

    out.write("composition.txt", &serialize_composition(&run.composition))?;
    out.write("errors.csv", &table.to_csv())?;
    out.write_json("summary.json", &compose_summary(&run, &table, met))?;
    out.finish("compose", args, met)?;

    println!("intrinsic neurons: {}", count.breakdown());
    let s = table.summary();
    println!(
        "sup error {:e} over {} points (eps {}, {}); delta {:e}, outer tolerance {:e}",
        s.sup,
        s.points,
        args.eps,
        if met { "met" } else { "NOT met" },
        run.budget.delta,
        run.budget.per_term_outer_tol
    );
    Ok(if met { Outcome::Met } else { Outcome::Unmet })
}

fn compose_summary(run: &KstRun, table: &ErrorTable, met: bool) -> serde_json::Value {
    let count = count_intrinsic_neurons(&run.composition);
    let fit_record = |component: String, r: &FitReport| {
        json!({
            "component": component,
            "sup_error": r.sup_error,
            "tolerance": r.epsilon,
            "method": r.method,
            "evals": r.budget_used,
            "seed": r.seed,
        })
    };
    let mut fits = vec![fit_record("outer".into(), &run.outer_report)];
    fits.extend(run.inner_reports.iter().enumerate().map(|(i, r)| fit_record(format!("inner {i}"), r)));
    json!({
        "met": met,
        "d": run.composition.d(),
        "domain": [run.composition.domain().0, run.composition.domain().1],
        "lambda": run.composition.lambda(),
        "budget": run.budget,
        "neuron_count": count,
        "neuron_breakdown": count.breakdown(),
        "errors": serde_json::from_str::<serde_json::Value>(&table.summary_json()).expect("valid json"),
        "fits": fits,
    })
}

#[derive(Serialize)]
struct GapEntry {
    name: String,
    status: &'static str,
    e0: Option<f64>,
    e1: Option<f64>,
    b_value: Option<f64>,
    gap: Option<f64>,
    floor: f64,
    diagnostic: String,
    witness: Option<serde_json::Value>,
}

fn certify(name: String, net: Result<Network>, family: &ExampleFamily) -> GapEntry {
    let floor = family.c_star() / 2.0;
    let skipped = |diagnostic: String| GapEntry {
        name: name.clone(),
        status: "skipped",
        e0: None,
        e1: None,
        b_value: None,
        gap: None,
        floor,
        diagnostic,
        witness: None,
    };
    let net = match net {
        Ok(net) => net,
        Err(e) => return skipped(format!("{e:#}")),
    };
    match two_point_gap(family, &net) {
        Ok(cert) => GapEntry {
            name: name.clone(),
            status: if cert.certified { "certified" } else { "refuted" },
            e0: Some(cert.e0),
            e1: Some(cert.e1),
            b_value: Some(cert.b_value),
            gap: Some(cert.gap),
            floor,
            diagnostic: String::new(),
            witness: Some(cert.witness.to_json_value()),
        },
        Err(e) => skipped(e.to_string()),
    }
}

fn read_net_dir(dir: &Path) -> Result<Vec<(String, Result<Network>)>> {
    let mut paths: Vec<_> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "txt"))
        .collect();
    paths.sort();
    Ok(paths
        .into_iter()
        .map(|p| {
            let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            let net = fs::read_to_string(&p)
                .map_err(anyhow::Error::from)
                .and_then(|text| deserialize_network(&text).map_err(anyhow::Error::from));
            (name, net)
        })
        .collect())
}

pub fn witness(args: &WitnessArgs) -> Result<Outcome> {
    let family = targets::family(&args.target, args.d).map_err(usage)?;
    if args.d < 2 {
        return Err(usage("--d must be at least 2"));
    }
    let mut nets: Vec<(String, Result<Network>)> = Vec::new();
    if let Some(dir) = &args.nets {
        nets.extend(read_net_dir(dir)?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.common.seed);
    for k in 0..args.random {
        nets.push((format!("random-{k}"), random_narrow_network(args.d, &mut rng).map_err(Into::into)));
    }
    for k in 0..args.trained {
        let net = euaf::width_bound::train_narrow_network(&family, &mut rng, args.common.budget);
        nets.push((format!("trained-{k}"), net.map_err(Into::into)));
    }
    if nets.is_empty() {
        return Err(usage("nothing to certify: pass --nets, --random or --trained"));
    }

    let entries: Vec<GapEntry> = nets.into_iter().map(|(name, net)| certify(name, net, &family)).collect();
    let mut csv = String::from("name,status,e0,e1,b_value,gap,floor,diagnostic\n");
    let opt = |v: Option<f64>| v.map(|v| format!("{v:?}")).unwrap_or_default();
    for e in &entries {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{:?},\"{}\"",
            e.name,
            e.status,
            opt(e.e0),
            opt(e.e1),
            opt(e.b_value),
            opt(e.gap),
            e.floor,
            e.diagnostic.replace('"', "'")
        );
    }
    let count = |s: &str| entries.iter().filter(|e| e.status == s).count();
    let (certified, refuted, skipped) = (count("certified"), count("refuted"), count("skipped"));
    let min_gap = entries.iter().filter_map(|e| e.gap).fold(f64::INFINITY, f64::min);

    let mut out = OutDir::create(&args.common.out)?;
    out.write("gaps.csv", &csv)?;
    out.write_json(
        "witness.json",
        &json!({
            "d": args.d,
            "family": args.target,
            "c_star": family.c_star(),
            "floor": family.c_star() / 2.0,
            "certified": certified,
            "refuted": refuted,
            "skipped": skipped,
            "min_gap": if min_gap.is_finite() { Some(min_gap) } else { None },
            "networks": entries,
        }),
    )?;
    let met = refuted == 0;
    out.finish("witness", args, met)?;
    for e in entries.iter().filter(|e| e.status == "skipped") {
        eprintln!("skipped {}: {}", e.name, e.diagnostic);
    }
    println!(
        "{certified} certified, {refuted} refuted, {skipped} skipped; floor c_star/2 = {}; min gap {}",
        family.c_star() / 2.0,
        if min_gap.is_finite() { format!("{min_gap:?}") } else { "n/a".into() }
    );
    Ok(if met { Outcome::Met } else { Outcome::Unmet })
}

pub fn selftest(common: &CommonArgs) -> Result<Outcome> {
    let checks = crate::selftest::run(common);
    let mut report = String::new();
    for (name, ok, detail) in &checks {
        let _ = writeln!(report, "{} {name}: {detail}", if *ok { "PASS" } else { "FAIL" });
    }
    print!("{report}");
    let met = checks.iter().all(|(_, ok, _)| *ok);
    let mut out = OutDir::create(&common.out)?;
    out.write("selftest.txt", &report)?;
    out.finish("selftest", common, met)?;
    Ok(if met { Outcome::Met } else { Outcome::Unmet })
}
