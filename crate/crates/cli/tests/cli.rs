//! End-to-end runs of the `kwc` binary against the shipped configs.

use std::path::{Path, PathBuf};
use std::process::Command;

use kwc_cli::svg::{LinePlot, Series};
use serde_json::Value;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn kwc(config: &Path, out: &Path, extra: &[&str]) -> i32 {
    let status = Command::new(env!("CARGO_BIN_EXE_kwc"))
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(extra)
        .env("RUST_LOG", "off")
        .status()
        .expect("binary runs");
    status.code().expect("exit code")
}

fn read_json(p: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(p).unwrap()).unwrap()
}

#[test]
fn time_step_above_bound_exits_with_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(kwc(&configs().join("sim1d.json"), dir.path(), &["--set", "stepper.h=0.6"]), 1);
    let err = read_json(&dir.path().join("error.json"));
    assert_eq!(err["exitCode"], 1);
    assert_eq!(err["kind"], "validation");
    assert!(!dir.path().join("sim1d_energy.csv").exists());
}

#[test]
fn malformed_config_exits_with_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"mode": "simulate1d", "stepper": {"n": "many"}}"#).unwrap();
    assert_eq!(kwc(&cfg, dir.path(), &[]), 1);
    std::fs::write(&cfg, r#"{"mode": "simulate3d"}"#).unwrap();
    assert_eq!(kwc(&cfg, dir.path(), &[]), 1);
    assert_eq!(kwc(&dir.path().join("missing.json"), dir.path(), &[]), 1);
}

#[test]
fn constant_data_stop_after_one_step() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(kwc(&configs().join("trivial.json"), dir.path(), &[]), 0);
    let text = std::fs::read_to_string(dir.path().join("trivial_energy.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# kwc "));
    assert_eq!(lines[1], "t,dirichlet,potential,weightedTV,weightedTVNu,boundaryPenalty,nuTerm,sharpTotal,relaxedTotal");
    assert_eq!(lines.len(), 3, "one data row expected:\n{text}");
    let summary = read_json(&dir.path().join("trivial_summary.json"));
    assert_eq!(summary["steps"], 1);
    assert_eq!(summary["converged"], true);
}

#[test]
fn scan_figure3_writes_rho1() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(kwc(&configs().join("fig3.json"), dir.path(), &["--jobs", "2"]), 0);
    let t = read_json(&dir.path().join("fig3_thresholds.json"));
    let rho1 = t["rho1"].as_f64().unwrap();
    assert!((rho1 - 3.5).abs() <= 0.2, "rho1 = {rho1}");
    for k in ["rho2", "rho3", "Rstar"] {
        assert!(t[k].is_null());
    }
    assert_eq!(t["meta"]["version"], format!("kwc {}", env!("CARGO_PKG_VERSION")));
}

#[test]
fn scan_figure4_thresholds_lie_in_their_intervals() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(kwc(&configs().join("fig4.json"), dir.path(), &[]), 0);
    let t = read_json(&dir.path().join("fig4_thresholds.json"));
    let (r2, r3) = (t["rho2"].as_f64().unwrap(), t["rho3"].as_f64().unwrap());
    assert!(r2 > 1.0 && r2 < 2.0, "rho2 = {r2}");
    assert!(r3 > 7.0 && r3 < 8.0, "rho3 = {r3}");
}

#[test]
fn infeasible_two_jump_state_exits_with_non_convergence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("two.json");
    std::fs::write(
        &cfg,
        r#"{"mode": "steadyRadial", "laws": {"delta0": 0.0},
            "domain": {"gamma": [0.0, 3.0], "r0": 1.0, "rOuter": 10.0},
            "steadyRadial": {"jumpRadii": [1.0, 9.0], "thetaLevels": [null, 3.0], "samples": 65}}"#,
    )
    .unwrap();
    assert_eq!(kwc(&cfg, dir.path(), &[]), 2);
    assert_eq!(read_json(&dir.path().join("error.json"))["kind"], "nonConvergence");
    assert_eq!(read_json(&dir.path().join("two_steady.json"))["found"], false);
}

#[test]
fn under_resolved_steady_state_is_an_invariant_failure() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(kwc(&configs().join("steady1d.json"), dir.path(), &["--set", "stepper.n=33"]), 3);
    assert_eq!(read_json(&dir.path().join("error.json"))["kind"], "invariant");
    // the profile is still written
    assert!(dir.path().join("steady1d_profile.csv").exists());
}

#[test]
fn success_clears_a_stale_error_file() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(kwc(&configs().join("trivial.json"), dir.path(), &["--set", "stepper.h=0.6"]), 1);
    assert!(dir.path().join("error.json").exists());
    assert_eq!(kwc(&configs().join("trivial.json"), dir.path(), &[]), 0);
    assert!(!dir.path().join("error.json").exists());
}

fn outputs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

#[test]
fn identical_config_and_seed_give_identical_bytes() {
    for (cfg, extra) in [("sim1d.json", vec!["--set", "stepper.n=129"]), ("fig1.json", vec!["--jobs", "3"])] {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        assert_eq!(kwc(&configs().join(cfg), a.path(), &extra), 0);
        assert_eq!(kwc(&configs().join(cfg), b.path(), &extra), 0);
        let (oa, ob) = (outputs(a.path()), outputs(b.path()));
        assert!(!oa.is_empty());
        assert_eq!(oa, ob, "{cfg}: outputs differ");
        assert!(oa.iter().all(|(_, bytes)| !bytes.contains(&b'\r')));
    }
}

#[test]
fn seed_changes_the_random_run() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = configs().join("sim1d.json");
    assert_eq!(kwc(&cfg, a.path(), &["--set", "stepper.n=65"]), 0);
    assert_eq!(kwc(&cfg, b.path(), &["--set", "stepper.n=65", "--set", "seed=2"]), 0);
    let read = |d: &Path| std::fs::read(d.join("sim1d_snapshots.csv")).unwrap();
    assert_ne!(read(a.path()), read(b.path()));
}

fn golden(name: &str, actual: &str) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("KWC_BLESS").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).expect("golden file present (run with KWC_BLESS=1 to create)");
    assert_eq!(actual, expected, "{name} drifted from the golden file");
}

#[test]
fn svg_two_series_matches_golden() {
    let plot = LinePlot {
        title: "energy".into(),
        x_label: "t".into(),
        y_label: "F".into(),
        series: vec![
            Series::new("sharp", vec![(0.0, 1.0), (0.5, 0.6), (1.0, 0.5)]),
            Series::new("relaxed", vec![(0.0, 1.1), (0.5, 0.65), (1.0, 0.52)]),
        ],
    };
    golden("two_series.svg", &plot.render(Some("kwc test")));
}

#[test]
fn svg_without_series_matches_golden() {
    golden("empty.svg", &LinePlot::default().render(None));
}

#[test]
fn svg_emitter_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("eta.svg");
    let pts: Vec<(f64, f64)> = (0..33).map(|i| (i as f64 / 32.0, 1.0 - (i as f64 / 32.0).powi(2))).collect();
    kwc_cli::svg::emit_svg_line_plot(&[Series::new("eta", pts)], &p).unwrap();
    let text = std::fs::read_to_string(&p).unwrap();
    let line = text.lines().find(|l| l.starts_with("<polyline")).unwrap();
    assert_eq!(line.matches(',').count(), 33);
    assert!(kwc_cli::svg::emit_svg_line_plot(&[], &dir.path().join("no/such/dir.svg")).is_err());
}
