use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_padic-gamma"))
        .args(args)
        .env_remove("PADIC_BUDGET")
        .output()
        .expect("binary runs")
}

fn lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("every stdout line is JSON"))
        .collect()
}

fn single(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let mut v = lines(&out);
    assert_eq!(v.len(), 1);
    v.pop().unwrap()
}

#[test]
fn mvalues_of_derangements() {
    // e^{-X}/(1-X) = exp(-X + sum X^k/k): m_1 = 0, every later m_k = 1
    let v = single(&["mvalues", "--seq", "1,0,1,2,9,44,265", "--k", "4"]);
    assert_eq!(v["m"], serde_json::json!(["0", "1", "1", "1"]));
    assert_eq!(v["k"], 4);
}

#[test]
fn mvalues_reads_json_file() {
    let dir = std::env::temp_dir().join(format!("padic-gamma-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("seq.json");
    std::fs::write(&path, r#"["1", "1", "2", "6", "24"]"#).unwrap();
    let v = single(&["mvalues", "--seq", path.to_str().unwrap()]);
    // n! has zeta-EGF 1/(1-X), so every m_k equals 1
    assert_eq!(v["m"], serde_json::json!(["1", "1", "1", "1"]));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn mvalues_rejects_bad_normalization() {
    let out = run(&["mvalues", "--seq", "2,1,1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
}

#[test]
fn mvalues_parse_error_is_usage() {
    assert_eq!(run(&["mvalues", "--seq", "1,x"]).status.code(), Some(2));
}

#[test]
fn continuity_presets() {
    let cases: &[(&[&str], &str)] = &[
        (&["--L", "squares", "--p", "7"], "continuous"),
        (&["--L", "powers:3", "--p", "3"], "not-continuous"),
        (&["--L", "proper-powers:3", "--alternate", "--p", "3"], "continuous"),
        (&["--L", "proper-powers:3", "--alternate", "--p", "5"], "not-continuous"),
    ];
    for (extra, want) in cases {
        let mut args = vec!["continuity"];
        args.extend_from_slice(extra);
        let v = single(&args);
        assert_eq!(v["verdict"], *want, "{extra:?}");
    }
}

#[test]
fn continuity_needs_a_source() {
    assert_eq!(run(&["continuity", "--p", "5"]).status.code(), Some(2));
    assert_eq!(run(&["continuity", "--p", "4", "--L", "all"]).status.code(), Some(2));
}

#[test]
fn gammap_examples() {
    let v = single(&["gammap", "--p", "5", "--N", "4", "--s", "3", "--r", "1"]);
    assert_eq!(v["gamma_p"], "405");
    assert_eq!(v["routes_agree"], true);

    // s = 1 reduces to exp_p(p r)
    let v = single(&["gammap", "--p", "5", "--N", "4", "--s", "1", "--r", "6"]);
    let w = single(&["gammap", "--p", "5", "--N", "4", "--s", "1", "--r", "6", "--route", "truncexp"]);
    assert_eq!(v["gamma_p"], w["gamma_p"]);
    assert_eq!(w["routes_agree"], Value::Null);
}

#[test]
fn gammap_routes_agree_on_rational_s() {
    let v = single(&["gammap", "--p", "7", "--N", "6", "--s", "-2/3", "--r", "8"]);
    assert_eq!(v["routes_agree"], true);
    let f = single(&["gammap", "--p", "7", "--N", "6", "--s", "-2/3", "--r", "8", "--route", "factored"]);
    let s = single(&["gammap", "--p", "7", "--N", "6", "--s", "-2/3", "--r", "8", "--route", "series"]);
    assert_eq!(v["gamma_p"], f["gamma_p"]);
    assert_eq!(f["gamma_p"], s["gamma_p"]);
}

#[test]
fn gammap_domain_errors() {
    assert_eq!(run(&["gammap", "--p", "5", "--s", "1", "--r", "2"]).status.code(), Some(1));
    assert_eq!(run(&["gammap", "--p", "2", "--s", "1", "--r", "3"]).status.code(), Some(1));
    assert_eq!(
        run(&["gammap", "--p", "5", "--s", "1/2", "--r", "6", "--route", "truncexp"]).status.code(),
        Some(1)
    );
    assert_eq!(run(&["gammap", "--p", "5", "--s", "1", "--r", "6", "--route", "nope"]).status.code(), Some(2));
}

#[test]
fn enumerate_counts() {
    let v = single(&["enumerate", "--kind", "wreath-derangements", "--n", "2", "--r", "2"]);
    assert_eq!(v["derangements"], 5);
    let v = single(&["enumerate", "--kind", "wreath-arrangements", "--n", "1", "--r", "2"]);
    // the empty subset plus both colourings of the single point
    assert_eq!(v["arrangements"], 3);
    let v = single(&["enumerate", "--kind", "cycle-restricted", "--L", "squares", "--n", "8"]);
    assert_eq!(v["count"], "1681");
}

#[test]
fn enumerate_list_matches_count() {
    let out = run(&["enumerate", "--kind", "wreath-derangements", "--n", "3", "--r", "2", "--list"]);
    assert_eq!(out.status.code(), Some(0));
    let v = lines(&out);
    let total = v.last().unwrap()["derangements"].as_u64().unwrap();
    assert_eq!(v.len() as u64 - 1, total);

    let out = run(&["enumerate", "--kind", "cycle-restricted", "--L", "primes", "--n", "5", "--list"]);
    let v = lines(&out);
    assert_eq!(v.last().unwrap()["count"], (v.len() - 1).to_string());
}

#[test]
fn enumerate_budget() {
    let out = run(&["enumerate", "--kind", "wreath-derangements", "--n", "20", "--r", "5"]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(out.stderr.trim_ascii()).unwrap();
    assert_eq!(err["error"], "budget-exceeded");

    let out = Command::new(env!("CARGO_BIN_EXE_padic-gamma"))
        .args(["enumerate", "--kind", "wreath-derangements", "--n", "3", "--r", "2"])
        .env("PADIC_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn enumerate_missing_r_is_usage() {
    assert_eq!(run(&["enumerate", "--kind", "wreath-derangements", "--n", "3"]).status.code(), Some(2));
}

#[test]
fn verify_suites_pass() {
    for args in [
        &["verify", "--identity", "floor", "--n-max", "8", "--r-max", "4"][..],
        &["verify", "--identity", "gamma-consistency", "--p", "5", "--N", "8", "--n-max", "10"][..],
        &["verify", "--identity", "egf-oracle", "--L", "squares", "--n-max", "7"][..],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        let v = lines(&out);
        let summary = v.last().unwrap();
        assert_eq!(summary["failures"], 0);
        assert_eq!(summary["cases"].as_u64().unwrap() as usize, v.len() - 1);
        assert!(v[..v.len() - 1].iter().all(|l| l["pass"] == true));
    }
}

#[test]
fn verify_floor_at_zero_fails_honestly() {
    // 0!·e^{1/1} has no integer part matching a(0, 1) = 1 under the floor formula
    let out = run(&["verify", "--identity", "floor", "--n-min", "0", "--n-max", "0", "--r-max", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn output_is_deterministic() {
    let args = ["continuity", "--L", "primes", "--p", "5"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}
