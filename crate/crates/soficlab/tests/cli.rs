mod common;

use std::process::{Command, Output};

use serde_json::Value;
use soficlab::Model;

use common::{fixture, load, FIXTURES};

fn soficlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_soficlab"))
        .args(args)
        .output()
        .unwrap()
}

fn run(command: &str, name: &str, extra: &[&str]) -> (i32, Value) {
    let path = fixture(name);
    let mut args = vec![command, "--model", path.to_str().unwrap()];
    args.extend(extra);
    let out = soficlab(&args);
    let stdout = String::from_utf8(out.stdout).unwrap();
    let value = serde_json::from_str(&stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), value)
}

#[test]
fn one_step_image() {
    let path = fixture("figblack1_2");
    let out = soficlab(&["is-markov", "--model", path.to_str().unwrap(), "--k", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap().trim(),
        r#"{"is_k_markov":true,"Q":[["0","1"],["1/2","1/2"]]}"#
    );
}

#[test]
fn preimage_count() {
    let (code, v) = run("preimages", "ex_nosofics", &["--word", "baab"]);
    assert_eq!(code, 0);
    assert_eq!(v.to_string(), r#"{"count":3}"#);
}

#[test]
fn empty_word() {
    let (code, v) = run("eval", "figblack1_2", &["--word", ""]);
    assert_eq!(code, 0);
    assert_eq!(v.to_string(), r#"{"value":"1"}"#);
}

#[test]
fn negative_verdicts_exit_one() {
    assert_eq!(run("is-markov", "figblack1_3", &["--k", "2"]).0, 1);
    let (code, v) = run("is-markov", "figblack1_3", &[]);
    assert_eq!(code, 1);
    assert_eq!(v["status"], "not_markov");
    for method in ["kernel", "rank"] {
        let (code, v) = run(
            "is-markov",
            "figblack1_3",
            &["--k", "3", "--method", method],
        );
        assert_eq!(code, 1);
        assert_eq!(v["is_k_markov"], false);
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(soficlab(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(soficlab(&["eval", "--bogus"]).status.code(), Some(2));
    assert_eq!(
        soficlab(&["eval", "--model", "/nonexistent.json", "--word", "a"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run("eval", "figblack1_2", &["--word", "zz"]).0, 2);
    assert_eq!(run("is-markov", "figblack1_2", &["--method", "guess"]).0, 2);
}

#[test]
fn order_bound_values() {
    let out = soficlab(&["order-bound", "--k", "1", "--m", "2", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["bound"], 27);
}

#[test]
fn commands_on_fixtures() {
    assert_eq!(run("entropy", "figblack1_3", &[]).0, 0);
    assert_eq!(run("reduce", "figblack1_3", &[]).0, 0);
    assert_eq!(run("core", "shin", &[]).0, 0);
    assert_eq!(run("pressure", "semigroup_wps", &[]).0, 0);
    assert_eq!(run("resolving", "exliftone", &[]).0, 0);
    assert_eq!(run("fiber-bound", "semigroup_wps", &[]).0, 0);
    let (code, v) = run("lift", "exliftone", &["--from", "#nu_prime"]);
    assert_eq!(code, 0);
    assert_eq!(v["method"], "e_resolving");
    assert_eq!(v["transition"][0], serde_json::json!(["1/5", "2/5", "2/5"]));
    let (code, v) = run(
        "lift",
        "exliftone",
        &["--from", "#nu_prime", "--via", "#mu"],
    );
    assert_eq!(code, 0);
    assert_eq!(v["method"], "markovian");
    assert_eq!(v["transition"][0], serde_json::json!(["1/5", "1/5", "3/5"]));
    let (code, v) = run("comp-ratio", "figblack1_3", &["--n", "8", "--G", "#G"]);
    assert_eq!(code, 0);
    assert!(v["max"].as_f64().unwrap() <= 2.0 + 1e-12);
}

#[test]
fn outputs_are_deterministic() {
    for (command, name, extra) in [
        ("is-markov", "figblack1_3", vec![]),
        ("reduce", "shin", vec![]),
        (
            "lift",
            "exliftone",
            vec!["--from", "#nu_prime", "--via", "#mu"],
        ),
        ("eval", "walters", vec!["--word", "0110"]),
        ("pressure", "figblack1_3", vec![]),
    ] {
        let path = fixture(name);
        let mut args = vec![command, "--model", path.to_str().unwrap()];
        args.extend(extra);
        let a = soficlab(&args);
        let b = soficlab(&args);
        assert_eq!(a.stdout, b.stdout, "{command} on {name}");
        assert_eq!(a.status.code(), b.status.code());
    }
}

#[test]
fn fixtures_round_trip() {
    let dir = std::env::temp_dir().join(format!("soficlab-roundtrip-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for name in FIXTURES {
        let model = load(name);
        let path = dir.join(format!("{name}.json"));
        model.save(&path).unwrap();
        assert_eq!(Model::load(&path).unwrap(), model, "{name}");
    }
    std::fs::remove_dir_all(&dir).unwrap();
}
