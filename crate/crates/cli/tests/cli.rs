use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fglab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fglab")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn run_to(path: &Path, args: &[&str]) -> (i32, String) {
    let mut all = args.to_vec();
    all.extend(["--out", path.to_str().unwrap()]);
    let out = fglab(&all);
    (out.status.code().unwrap(), std::fs::read_to_string(path).unwrap())
}

#[test]
fn main1_over_gf4_passes() {
    let out = fglab(&["main1", "--p", "2", "--k", "2", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_of(&out);
    assert_eq!(r["theorem"], "main1");
    assert_eq!(r["failures"].as_array().unwrap().len(), 0);
    assert_eq!(r["counts"]["quasi_singular_specs"], 441);
    assert_eq!(r["parameters"]["config"]["field"]["p"], 2);
}

#[test]
fn quot2_over_gf3_names_the_identity_kernel() {
    let out = fglab(&["quot2", "--p", "3", "--k", "1", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_of(&out);
    assert_eq!(r["theorem"], "quot2");
    let kernels = &r["witnesses"][0]["polarized_kernels"];
    assert_eq!(kernels.as_array().unwrap().len(), 1);
    let identity: Value = serde_json::from_str("[[[1],[0],[0]],[[0],[1],[0]],[[0],[0],[1]]]").unwrap();
    assert_eq!(kernels[0], identity);
}

#[test]
fn identity_witness_is_omega() {
    let out = fglab(&["identity", "--p", "2", "--k", "2", "--expr", "1*t{0}+1*t{1}"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_of(&out);
    assert_eq!(r["theorem"], "identity-principle");
    // omega has coefficient vector (0, 1)
    assert_eq!(r["witnesses"][0]["point"]["t"], serde_json::json!([0, 1]));
    assert_eq!(r["witnesses"][0]["value"], serde_json::json!([1, 0]));
}

#[test]
fn config_errors_exit_with_code_two() {
    for (args, kind) in [
        (vec!["main1", "--p", "4"], "NonPrime"),
        (vec!["main1"], "MissingField"),
        (vec!["main1", "--p", "2"], "Precondition"),
        (vec!["geometry", "--p", "2", "--n", "1"], "DimensionTooSmall"),
        (vec!["identity", "--p", "2", "--expr", "t{"], "Parse"),
        (vec!["polarized", "--p", "2", "--embedding", "natural/I"], "KernelNotInAmbient"),
        (vec!["polarized", "--p", "2", "--embedding", "twist"], "BadEmbedding"),
        (vec!["geometry", "--p", "2", "--k", "2", "--modulus", "1,0,1"], "ReducibleModulus"),
        (vec!["nonsense"], "Usage"),
    ] {
        let out = fglab(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert_eq!(json_of(&out)["error"]["kind"], kind, "{args:?}");
    }
}

#[test]
fn field_order_bound_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_fglab"))
        .args(["geometry", "--p", "2", "--k", "2"])
        .env("FGLAB_MAX_ORDER", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json_of(&out)["error"]["kind"], "OrderTooLarge");
}

#[test]
fn verification_failure_exits_with_code_one() {
    let dir = tempfile::tempdir().unwrap();
    let (code, csv) = run_to(&dir.path().join("scan.csv"), &["hyperscan", "--p", "2", "--format", "csv"]);
    assert_eq!(code, 1);
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "key,value");
    assert_eq!(rows[1], "theorem,hyperplane-maximality");
    assert!(rows.contains(&"hyperplanes,255"));
}

#[test]
fn config_file_is_loaded_and_overridden() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[field]\np = 2\nk = 2\nmodulus = [1, 1, 1]\n\n[run]\nseed = 9\nsample = 4\n").unwrap();
    let out = fglab(&["main3", "--config", cfg.to_str().unwrap(), "--seed", "11"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_of(&out);
    assert_eq!(r["seed"], 11);
    assert_eq!(r["parameters"]["config"]["sample"], 4);
    assert_eq!(r["parameters"]["config"]["field"]["modulus"], serde_json::json!([1, 1, 1]));
    assert_eq!(r["counts"]["cross_twist_problems"], 8);

    std::fs::write(&cfg, "[field]\np = 2\ncolour = 3\n").unwrap();
    let out = fglab(&["geometry", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json_of(&out)["error"]["kind"], "ConfigParse");
}

#[test]
fn identical_configs_give_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let args = ["main3", "--p", "2", "--k", "2", "--sample", "12", "--seed", "3"];
    let (c1, first) = run_to(&path, &args);
    let (c2, second) = run_to(&path, &args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(first, second);
    assert!(!first.contains("elapsed_ms"));

    let timed = fglab(&["geometry", "--p", "2", "--timing"]);
    assert!(json_of(&timed)["elapsed_ms"].is_u64());
}

#[test]
fn remaining_subcommands_pass() {
    for args in [
        vec!["geometry", "--p", "3", "--dump"],
        vec!["vlemmas", "--p", "2", "--k", "2", "--sigma", "0", "--rho", "1"],
        vec!["vlemmas", "--p", "3"],
        vec!["polarized", "--p", "2", "--k", "2", "--embedding", "twist:1"],
        vec!["polarized", "--p", "3", "--embedding", "natural/I"],
    ] {
        let out = fglab(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stdout));
    }
    let geometry = json_of(&fglab(&["geometry", "--p", "2", "--dump"]));
    assert_eq!(geometry["counts"]["flags"], 21);
    assert_eq!(geometry["witnesses"][0]["flags"].as_array().unwrap().len(), 21);
}

#[test]
fn help_documents_the_grammar() {
    let out = fglab(&["identity", "--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("factor = ident '{'"));
}
