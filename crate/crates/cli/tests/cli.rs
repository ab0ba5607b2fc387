use std::process::Command as Proc;

use clap::Parser;
use sirtail_cli::config::{Cli, Command, RunConfig};
use sirtail_cli::run::run;

fn parse(args: &[&str]) -> anyhow::Result<RunConfig> {
    let cli = Cli::try_parse_from(std::iter::once("sirtail").chain(args.iter().copied()))?;
    RunConfig::from_cli(&cli)
}

const TAIL: [&str; 13] = [
    "tail", "--process", "poisson:1", "--fading", "exp:1", "--pathloss", "powerlaw:d=2,beta=2", "--theta", "1000",
    "--n", "1000000", "--seed", "7",
];

#[test]
fn flag_form_parses() {
    let cfg = parse(&TAIL).unwrap();
    assert_eq!(cfg.command, Command::Tail);
    assert_eq!(cfg.theta, vec![1000.0]);
    assert_eq!(cfg.n, Some(1_000_000));
    assert_eq!(cfg.seed, 7);
}

#[test]
fn json_file_matches_flag_form() {
    let flags = parse(&TAIL).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(&path, serde_json::to_string(&flags).unwrap()).unwrap();
    let from_file = parse(&["--config", path.to_str().unwrap()]).unwrap();
    assert_eq!(from_file, flags);
    let hand = r#"{"command":"tail","process":"poisson:1","fading":"exp:1",
        "pathloss":"powerlaw:d=2,beta=2","theta":[1000],"n":1000000,"seed":7}"#;
    assert_eq!(RunConfig::from_json(hand).unwrap(), flags);
    assert!(parse(&["--config", path.to_str().unwrap(), "--n", "5"]).is_err());
}

#[test]
fn distinct_messages_for_bad_parameters() {
    let msg = |args: &[&str]| parse(args).unwrap_err().to_string();
    assert!(msg(&["tail", "--pathloss", "powerlaw:d=2,beta=0.5"]).contains("beta must exceed 1"));
    assert!(msg(&["tail", "--process", "ginibre:1.5"]).contains("alpha must lie in (0, 1]"));
    assert!(msg(&["tail", "--process", "lattice:2"]).contains("a must lie in (1, 2)"));
    assert!(msg(&["tail", "--fading", "weibull:2"]).contains("fading"));
    assert!(msg(&["constants", "--beta", "1"]).contains("beta must exceed 1"));
    assert!(msg(&["tail", "--theta", "10,1"]).contains("ascending"));
    assert!(RunConfig::from_json(r#"{"command":"tail","bogus":1}"#).is_err());
}

#[test]
fn constants_command() {
    let out = run(&parse(&["constants", "--process", "poisson", "--beta", "2"]).unwrap()).unwrap();
    let v: serde_json::Value = serde_json::from_str(&out.text).unwrap();
    assert!((v["result"]["value"].as_f64().unwrap() - std::f64::consts::FRAC_2_PI).abs() < 1e-6);
    assert_eq!(v["result"]["method"], "closed-form");
    assert_eq!(v["config"]["beta"], 2.0);
    let out = run(&parse(&["constants", "--process", "ginibre:1", "--beta", "2", "--tol-scale", "100"]).unwrap()).unwrap();
    let v: serde_json::Value = serde_json::from_str(&out.text).unwrap();
    assert_eq!(v["result"]["method"], "quadrature");
    assert!((v["result"]["value"].as_f64().unwrap() - 0.8835).abs() < 1e-3);
}

#[test]
fn ginibre_radius_bound_at_crossing() {
    let out = run(&parse(&["bounds", "--ginibre-radius", "--alpha", "1", "--r", "0.5276"]).unwrap()).unwrap();
    let v: serde_json::Value = serde_json::from_str(&out.text).unwrap();
    let row = &v["result"]["rows"][0];
    assert!((row["u"].as_f64().unwrap() - row["v"].as_f64().unwrap()).abs() < 1e-3);
}

#[test]
fn bounded_exponents_command() {
    let out = run(&parse(&["bounds", "--bounded-exponents"]).unwrap()).unwrap();
    let v: serde_json::Value = serde_json::from_str(&out.text).unwrap();
    assert!((v["result"]["upper"]["value"].as_f64().unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    assert_eq!(v["result"]["h"], "z^(1/beta)");
}

#[test]
fn binary_writes_reproducible_csv() {
    let exe = env!("CARGO_BIN_EXE_sirtail");
    let dir = tempfile::tempdir().unwrap();
    let render = |name: &str, threads: &str| {
        let path = dir.path().join(name);
        let status = Proc::new(exe)
            .args(["tail", "--process", "ginibre:1", "--pathloss", "bounded:d=2,beta=2", "--theta", "2,5"])
            .args(["--n", "3000", "--seed", "3", "--format", "csv", "--output"])
            .arg(&path)
            .env("SIRTAIL_THREADS", threads)
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read_to_string(path).unwrap()
    };
    let a = render("a.csv", "1");
    let b = render("b.csv", "3");
    assert!(a.starts_with("# sirtail-v1 config={\"command\":\"tail\""));
    // output path differs between the runs, numbers do not
    assert_eq!(a.lines().skip(1).collect::<Vec<_>>(), b.lines().skip(1).collect::<Vec<_>>());
    assert_eq!(a.lines().nth(1).unwrap(), "theta,p_hat,stderr,n,scaled_unbounded,scaled_bounded,h_used");
}

#[test]
fn binary_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_sirtail");
    let ok = Proc::new(exe).args(["verify", "--criterion", "6"]).output().unwrap();
    assert!(ok.status.success());
    assert!(String::from_utf8_lossy(&ok.stdout).starts_with("[PASS] criterion  6"));
    let bad = Proc::new(exe).args(["tail", "--pathloss", "powerlaw:d=2,beta=0.5"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("beta must exceed 1"));
    let threads = Proc::new(exe).args(["verify", "--criterion", "6"]).env("SIRTAIL_THREADS", "x").output().unwrap();
    assert_eq!(threads.status.code(), Some(2));
}

#[test]
fn sample_and_counterexample_commands() {
    let out = run(&parse(&["sample", "--process", "ginibre:1", "--mode", "palm", "--window", "3", "--coords"]).unwrap())
        .unwrap();
    let v: serde_json::Value = serde_json::from_str(&out.text).unwrap();
    assert_eq!(v["result"]["is_palm"], true);
    assert_eq!(v["result"]["radii"].as_array().unwrap().len(), v["result"]["coords"].as_array().unwrap().len());
    let out = run(&parse(&["counterexample", "--n", "20000"]).unwrap()).unwrap();
    let v: serde_json::Value = serde_json::from_str(&out.text).unwrap();
    assert!((v["result"]["slope"].as_f64().unwrap() + 0.75).abs() < 0.15);
}
