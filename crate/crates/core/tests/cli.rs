use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use qchimera::scenario::Manifest;

fn qchimera(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qchimera"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

const QUICK: &[&str] = &["--schedule.t_transient", "6", "--analyses.husimi_nodes", ""];

#[test]
fn preset_quantum_run_writes_verified_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("q");
    let mut args = vec!["quantum", "--preset", "sync", "--seed", "2", "--out", path(&out)];
    args.extend_from_slice(QUICK);
    let o = qchimera(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m = Manifest::load(&out).unwrap();
    m.verify(&out).unwrap();
    assert_eq!(m.seed, 2);
    assert_eq!(m.config.schedule.t_transient, 6.0);
    assert!(out.join("covariance.csv").exists());
}

#[test]
fn simulate_skips_the_fluctuation_stage() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("s");
    let mut args = vec!["simulate", "--preset", "sync", "--out", path(&out)];
    args.extend_from_slice(QUICK);
    let o = qchimera(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("trajectory.csv").exists());
    assert!(!out.join("covariance.csv").exists());
}

#[test]
fn mi_scan_reads_a_stored_covariance() {
    let tmp = tempfile::tempdir().unwrap();
    let run = tmp.path().join("run");
    let mut args = vec!["quantum", "--preset", "sync", "--out", path(&run)];
    args.extend_from_slice(QUICK);
    assert!(qchimera(&args).status.success());

    let scan = tmp.path().join("scan");
    let cov = run.join("covariance.csv");
    let o = qchimera(&["mi-scan", "--covariance", path(&cov), "--out", path(&scan)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    // the offline scan reproduces the one written by the run
    assert_eq!(
        fs::read_to_string(scan.join("mi_scan.csv")).unwrap(),
        fs::read_to_string(run.join("mi_scan.csv")).unwrap()
    );
    assert!(scan.join("mi_scan.json").exists());
}

#[test]
fn config_file_and_overrides_are_layered() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("net.cfg");
    fs::write(
        &cfg,
        "# small ring\nparams.n_nodes = 12\ncoupling.range = 3\ncoupling.strength = 1.0\n\
         schedule.t_transient = 4\nanalyses.husimi_nodes = 1\nanalyses.mi_timeseries_l = 6\n",
    )
    .unwrap();
    let out = tmp.path().join("o");
    let o = qchimera(&[
        "quantum",
        "--config",
        path(&cfg),
        "--seed",
        "5",
        "--out",
        path(&out),
        "--coupling.strength",
        "1.4",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m = Manifest::load(&out).unwrap();
    assert_eq!(m.config.params.n_nodes, 12);
    assert_eq!(m.config.coupling_strength, 1.4);
    assert_eq!(m.preset, None);
}

#[test]
fn non_preset_runs_need_seed_and_output() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    assert_eq!(qchimera(&["quantum", "--out", path(&out)]).status.code(), Some(2));
    assert_eq!(qchimera(&["quantum", "--seed", "1"]).status.code(), Some(2));
}

#[test]
fn unknown_keys_are_config_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.cfg");
    fs::write(&cfg, "coupling.strenght = 1.2\n").unwrap();
    let out = tmp.path().join("o");
    let o = qchimera(&["quantum", "--config", path(&cfg), "--seed", "1", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("coupling.strenght"));
    assert_eq!(qchimera(&["quantum", "--preset", "sync", "--bogus.key", "1"]).status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_with_three() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let o = qchimera(&[
        "simulate",
        "--preset",
        "sync",
        "--out",
        path(&out),
        "--schedule.dt",
        "0.9",
        "--params.kappa2",
        "5",
        "--ic.amplitude",
        "50",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(Manifest::load(&out).unwrap().partial);
}

#[test]
fn sweep_writes_an_aggregate() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("sw");
    let mut args = vec![
        "sweep",
        "--preset",
        "sync",
        "--out",
        path(&out),
        "--strengths",
        "1.6,1.2",
        "--seeds",
        "0..2",
        "--workers",
        "2",
    ];
    args.extend_from_slice(QUICK);
    let o = qchimera(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let agg = fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(agg.lines().count(), 5);
    assert!(agg.starts_with("V,seed,regime,low_confidence,I2_half,status"));
}

#[test]
fn oracle_check_passes() {
    let o = qchimera(&["oracle-check"]);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(o.status.success(), "{stdout}");
    assert!(!stdout.contains("[FAIL]"));
}
