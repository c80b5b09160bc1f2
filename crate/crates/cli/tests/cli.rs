use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use euaf::format::serialize_network;
use euaf::{AffineLayer, FeedforwardNetwork};
use serde_json::Value;

fn euaf(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_euaf"))
        .args(args)
        .env("EUAF_OUT_DIR", out)
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn fit_sine_meets_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let o = euaf(&["fit", "--target", "sin2pi", "--eps", "0.2", "--seed", "7"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report = json(&dir.path().join("fit_eps0.2.json"));
    assert!(report["sup_error"].as_f64().unwrap() < 0.2);
    assert_eq!(report["seed"], 7);
    assert_eq!(report["met"], true);
    let csv = fs::read_to_string(dir.path().join("fit_eps0.2_errors.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2002);
    assert!(csv.starts_with("x,f,phi,abs_err\n"));
}

#[test]
fn fit_constant_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let o = euaf(&["fit", "--target", "const0.3", "--eps", "0.01"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let report = json(&dir.path().join("fit_eps0.01.json"));
    assert!(report["sup_error"].as_f64().unwrap() < 1e-9);
}

#[test]
fn unreachable_tolerance_exits_two_with_best_effort() {
    let dir = tempfile::tempdir().unwrap();
    let o = euaf(&["fit", "--target", "sin2pi", "--eps", "1e-9", "--budget", "20000"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("NOT met"));
    let report = json(&dir.path().join("fit_eps1e-9.json"));
    assert_eq!(report["met"], false);
    assert!(report["sup_error"].as_f64().unwrap() > 1e-9);
    assert_eq!(json(&dir.path().join("manifest.json"))["met"], false);
}

#[test]
fn compose_prints_neuron_breakdown() {
    let dir = tempfile::tempdir().unwrap();
    let o = euaf(&["compose", "--target", "kst-power", "--d", "2", "--eps", "0.5"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("1097 = 183×5 + 1 + 180 + 1"));
    let summary = json(&dir.path().join("summary.json"));
    assert_eq!(summary["neuron_count"]["total"], 1097);
    assert!(summary["errors"]["sup"].as_f64().unwrap() < 0.5);
    let text = fs::read_to_string(dir.path().join("composition.txt")).unwrap();
    let comp = euaf::kst::deserialize_composition(&text).unwrap();
    assert_eq!(comp.d(), 2);
    assert_eq!(comp.inner().len(), 5);

    let dir = tempfile::tempdir().unwrap();
    let o = euaf(&["compose", "--target", "kst-identity", "--d", "1", "--eps", "0.3"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("intrinsic neurons: 731 "));
}

#[test]
fn compose_rejects_bad_lambda() {
    let dir = tempfile::tempdir().unwrap();
    let o = euaf(&["compose", "--d", "2", "--lambda", "0.7,0.6"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("lambda"));
}

#[test]
fn witness_random_networks_clear_floor() {
    let dir = tempfile::tempdir().unwrap();
    let o = euaf(&["witness", "--d", "3", "--random", "100", "--seed", "4"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let report = json(&dir.path().join("witness.json"));
    assert_eq!(report["certified"], 100);
    assert!(report["min_gap"].as_f64().unwrap() >= 0.5);
    for net in report["networks"].as_array().unwrap() {
        assert!(net["gap"].as_f64().unwrap() >= 0.5 - 1e-9);
    }
}

#[test]
fn witness_reads_directory_and_skips_wrong_width() {
    let nets = tempfile::tempdir().unwrap();
    let zero = FeedforwardNetwork::new(
        3,
        vec![
            AffineLayer::new(2, 3, vec![0.0; 6], vec![0.0; 2], true).unwrap(),
            AffineLayer::new(1, 2, vec![0.0; 2], vec![0.0], false).unwrap(),
        ],
    )
    .unwrap();
    let wide = FeedforwardNetwork::new(
        3,
        vec![
            AffineLayer::new(3, 3, vec![0.5; 9], vec![0.0; 3], true).unwrap(),
            AffineLayer::new(1, 3, vec![1.0; 3], vec![0.0], false).unwrap(),
        ],
    )
    .unwrap();
    fs::write(nets.path().join("a_zero.txt"), serialize_network(&zero)).unwrap();
    fs::write(nets.path().join("b_wide.txt"), serialize_network(&wide)).unwrap();
    fs::write(nets.path().join("c_broken.txt"), "version 1\n").unwrap();

    let dir = tempfile::tempdir().unwrap();
    let o = euaf(&["witness", "--d", "3", "--nets", nets.path().to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let report = json(&dir.path().join("witness.json"));
    let entries = report["networks"].as_array().unwrap();
    assert_eq!(entries[0]["name"], "a_zero.txt");
    assert!(entries[0]["gap"].as_f64().unwrap() >= 1.0);
    assert_eq!(entries[1]["status"], "skipped");
    assert!(entries[1]["diagnostic"].as_str().unwrap().contains("width mismatch"));
    assert_eq!(entries[2]["status"], "skipped");
    assert!(String::from_utf8_lossy(&o.stderr).contains("b_wide.txt"));
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(euaf(&["fit", "--target", "cubic", "--eps", "0.1"], dir.path()).status.code(), Some(1));
    assert_eq!(euaf(&["fit", "--target", "linear"], dir.path()).status.code(), Some(1));
    assert_eq!(euaf(&["fit", "--target", "linear", "--eps", "0.1", "--domain", "1,0"], dir.path()).status.code(), Some(1));
    assert_eq!(euaf(&["witness", "--d", "3"], dir.path()).status.code(), Some(1));
    assert_eq!(euaf(&["frobnicate"], dir.path()).status.code(), Some(1));
}

#[test]
fn negative_domain_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let o = euaf(&["fit", "--target", "linear", "--eps", "0.1", "--domain", "-1,3"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&dir.path().join("fit_eps0.1.json"))["domain"], serde_json::json!([-1.0, 3.0]));
}

#[test]
fn selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = euaf(&["selftest"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
    assert!(dir.path().join("selftest.txt").exists());
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 3] = [
        &["fit", "--target", "abs-half", "--eps", "0.2,0.05", "--seed", "3"],
        &["compose", "--d", "1", "--eps", "0.3", "--seed", "3"],
        &["witness", "--d", "3", "--random", "20", "--trained", "1", "--budget", "5000", "--seed", "3"],
    ];
    for args in runs {
        let first_out = euaf(args, dir.path());
        let first = snapshot(dir.path());
        let second_out = euaf(args, dir.path());
        assert_eq!(first, snapshot(dir.path()), "{args:?}");
        assert_eq!(first_out.stdout, second_out.stdout);
        assert!(!fs::read_dir(dir.path()).unwrap().any(|e| e.unwrap().file_name().to_string_lossy().ends_with(".tmp")));
    }
}
