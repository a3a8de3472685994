use std::process::Command;

use beltrami_lab::report::Verdict;
use beltrami_lab::{Experiment, ExperimentConfig, LabError};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_beltrami-lab"))
}

fn rejects(exp: Experiment, toml: &str, needle: &str) {
    match ExperimentConfig::from_toml(exp, toml) {
        Err(LabError::Config(msg)) => assert!(msg.contains(needle), "message {msg:?} lacks {needle:?}"),
        other => panic!("{toml:?} accepted or wrong error: {other:?}"),
    }
}

#[test]
fn inconsistent_configs_name_the_violated_rule() {
    rejects(Experiment::Theorem2, "[grid]\nn = 64\n", "points per period");
    rejects(Experiment::Theorem2, "[grid]\nn = 96\n", "power of two");
    rejects(Experiment::Theorem2, "[solver]\nt_end = 2.0\n", "t_target");
    rejects(Experiment::Theorem2, "[solver]\nnu = 0.5\n", "datum.nu");
    rejects(Experiment::Theorem2, "[theorem2]\nshort_samples = [0.5]\n", "short_samples");
    rejects(Experiment::Theorem2, "[theorem2]\nscan_times = [0.5, 0.1]\n", "increasing");
    rejects(Experiment::Oracle, "[oracle]\nlambda = 1.5\n", "positive integer");
    rejects(Experiment::Theorem1, "[theorem1]\ndilations = [64.0]\n", "box/8");
    rejects(Experiment::FirstZero, "[first_zero]\nfreqs = [8]\n", "equal length");
    rejects(Experiment::LemmaSweep, "[sweep]\ndilations = [4.0]\n", "two dilations");
    rejects(Experiment::Oracle, "experiment = \"theorem2\"\n", "file is for 'theorem2'");
    rejects(Experiment::Oracle, "[oracle]\nbogus = 1\n", "bogus");
}

#[test]
fn print_config_round_trips() {
    let out = bin().args(["theorem2", "--print-config", "--seed", "7"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let cfg = ExperimentConfig::from_toml(Experiment::Theorem2, &text).unwrap();
    let mut expect = ExperimentConfig::defaults(Experiment::Theorem2);
    expect.seed = 7;
    assert_eq!(cfg, expect);
}

#[test]
fn configuration_errors_exit_with_code_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "[grid]\nn = 100\n").unwrap();
    let out = bin().arg("oracle").arg("--config").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("grid"));
}

#[test]
fn small_oracle_run_passes_and_writes_its_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("oracle.toml");
    std::fs::write(
        &cfg_path,
        "[grid]\nn = 16\n[solver]\nt_end = 0.1\ndt = 1e-3\n[oracle]\nhalving_t_end = 0.02\nsample_every = 0.05\ntaylor_green = false\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = bin().arg("oracle").arg("--config").arg(&cfg_path).arg("--out").arg(&out_dir).output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("beltrami_max_relative_error"), "{stdout}");
    for f in ["oracle_errors.csv", "diagnostics.csv", "summary.txt", "report.json"] {
        assert!(out_dir.join(f).exists(), "{f} missing");
    }
    let header = std::fs::read_to_string(out_dir.join("diagnostics.csv")).unwrap();
    assert!(header.starts_with("t,energy,enstrophy,h1,h2,h3,div_max,cfl\n"));
    // The Beltrami errors are at rounding level, so the halving ratio fails.
    assert_eq!(out.status.code(), Some(Verdict::Fail.exit_code()));
    let report: beltrami_lab::Report = serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert!(report.check("beltrami_max_relative_error").unwrap().passed());
    assert!(!report.check("beltrami_dt_halving_ratio").unwrap().passed());
}

#[test]
fn reruns_reproduce_outputs_bit_for_bit() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::from_toml(
        Experiment::Oracle,
        "[grid]\nn = 16\n[solver]\nt_end = 0.05\n[oracle]\nhalving_t_end = 0.01\ntaylor_green = false\n",
    )
    .unwrap();
    let mut bodies = Vec::new();
    for k in 0..2 {
        cfg.out = Some(dir.path().join(format!("run{k}")));
        beltrami_lab::run(&cfg).unwrap();
        bodies.push(std::fs::read(dir.path().join(format!("run{k}/diagnostics.csv"))).unwrap());
    }
    assert_eq!(bodies[0], bodies[1]);
}

#[test]
fn small_frequency_closeness_is_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::from_toml(
        Experiment::Theorem2,
        "[grid]\nn = 32\n[datum]\nfreq = 2\n[theorem2]\nscan_times = [0.0, 1.0]\n",
    )
    .unwrap();
    cfg.out = Some(dir.path().to_path_buf());
    let report = beltrami_lab::run(&cfg).unwrap();
    let c = report.check("closeness_ratio").unwrap();
    assert!(c.measured >= cfg.theorem2.closeness, "{c:?}");
    assert_eq!(c.verdict, Some(Verdict::Inconclusive));
    assert_ne!(report.verdict, Verdict::Pass);
    assert!(dir.path().join("zero_counts.csv").exists());
}
