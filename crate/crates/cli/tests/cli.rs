use std::path::Path;
use std::process::Command;

use primeud_cli::{execute, Execution};
use serde_json::Value;

fn run(args: &[&str]) -> Execution {
    let mut argv = vec!["primeud"];
    argv.extend_from_slice(args);
    execute(&argv)
}

fn json(x: &Execution) -> Value {
    serde_json::from_str(&x.stdout).unwrap_or_else(|e| panic!("{e}: {}{}", x.stdout, x.stderr))
}

#[test]
fn vaughan_example() {
    let x = run(&["vaughan-check", "--X", "500", "--u", "5", "--v", "5", "--phase", "0.37*x"]);
    assert_eq!(x.code, 0, "{}", x.stderr);
    let v = json(&x);
    assert_eq!(v["status"], "ok");
    assert!(v["result"]["diff"].as_f64().unwrap() < 1e-9);
    assert_eq!(v["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(v["chunk_size"], 4096);
}

#[test]
fn usage_errors_exit_two_with_distinct_messages() {
    let malformed = run(&["ud-test", "--expr", "log"]);
    let unknown = run(&["frobnicate"]);
    let small = run(&["ud-test", "--expr", "x^(3/2)", "--N", "5000", "--table-limit", "1000"]);
    let coprime = run(&["ud-test", "--expr", "x^(3/2)", "--domain", "ap:6:3"]);
    for x in [&malformed, &unknown, &small, &coprime] {
        assert_eq!(x.code, 2, "{x:?}");
        assert!(x.stdout.is_empty());
    }
    assert!(malformed.stderr.contains("malformed expression"));
    assert!(unknown.stderr.contains("unrecognized subcommand"));
    assert!(small.stderr.contains("prime table too small"));
    assert!(coprime.stderr.contains("is not 1"));
}

#[test]
fn csv_and_plot_output() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("r.csv");
    let x = run(&["ud-test", "--expr", "x^(3/2)", "--domain", "primes", "--N", "1000", "--out", csv.to_str().unwrap()]);
    assert_eq!(x.code, 0, "{}", x.stderr);
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "N,star,et_bound,max_weyl_q10");
    assert_eq!(lines.len(), 4);
    assert!(lines[3].starts_with("1000,"));

    let x = run(&["ud-test", "--expr", "x^(3/2)", "--N", "500", "--checkpoints", "50,500", "--format", "plotdata"]);
    assert_eq!(x.stdout.lines().collect::<Vec<_>>().len(), 3);
    assert!(x.stdout.starts_with("# N star\n50 "));

    let x = run(&["weyl-sum", "--expr", "x^(3/2)", "--N", "100", "--format", "csv"]);
    assert_eq!(x.code, 2);
    assert!(x.stderr.contains("does not support"));
}

#[test]
fn failed_assertion_exits_three_but_still_reports() {
    // p itself is odd, so it almost never lands in 2Z - 2Z
    let x = run(&["recurrence-scan", "--target", "lattice", "--poly-degree", "1", "--multiples", "2", "--N", "2000", "--min-margin", "-0.02"]);
    assert_eq!(x.code, 3);
    assert!(x.stderr.contains("recurrence_margin"));
    let v = json(&x);
    assert_eq!(v["status"], "assertion_failed");
    assert_eq!(v["assertions"][0]["holds"], false);

    let ok = run(&["recurrence-scan", "--target", "lattice", "--poly-degree", "1", "--shift", "1", "--multiples", "2", "--N", "2000", "--min-margin", "-0.02"]);
    assert_eq!(ok.code, 0);
}

#[test]
fn config_file_with_command_line_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# control run\ncommand = ud-test\nexpr = x^(1/2) + log^2\nN = 2000\ndomain = integers\n").unwrap();
    let x = run(&["--config", cfg.to_str().unwrap(), "--N", "300"]);
    assert_eq!(x.code, 0, "{}", x.stderr);
    let v = json(&x);
    assert_eq!(v["result"]["report"]["n"], 300);
    assert_eq!(v["config"]["command"]["ud-test"]["expr"], "x^(1/2) + log^2");

    let same = run(&["ud-test", "--expr", "x^(1/2) + log^2", "--N", "300", "--domain", "integers"]);
    assert_eq!(same.stdout, x.stdout);

    std::fs::write(&cfg, "N = 10\n").unwrap();
    assert_eq!(run(&["--config", cfg.to_str().unwrap()]).code, 2);
}

#[test]
fn hash_tracks_config_not_threads() {
    let a = json(&run(&["bound-check", "--kind", "vdc", "--trials", "20", "--seed", "1"]));
    let b = json(&run(&["bound-check", "--kind", "vdc", "--trials", "20", "--seed", "1", "--threads", "1"]));
    let c = json(&run(&["bound-check", "--kind", "vdc", "--trials", "20", "--seed", "2"]));
    assert_eq!(a, b);
    assert_ne!(a["config_hash"], c["config_hash"]);
    assert_eq!(a["result"]["violations"], 0);
}

#[test]
fn help_exits_zero() {
    let x = run(&["--help"]);
    assert_eq!(x.code, 0);
    assert!(x.stdout.contains("corpus-run"));
}

#[test]
fn binary_uses_cache_dir_from_env() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_primeud"))
        .args(["sieve", "--limit", "100000", "--q-max", "5"])
        .env("PRIMEUD_CACHE_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["pi"], 9592);
    assert!(dir.path().join("primes-100000.bin").exists());

    let again = Command::new(env!("CARGO_BIN_EXE_primeud"))
        .args(["sieve", "--limit", "100000", "--q-max", "5"])
        .env("PRIMEUD_CACHE_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(again.stdout, out.stdout);

    let bad = Command::new(env!("CARGO_BIN_EXE_primeud")).args(["ud-test", "--expr", "log"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

/// Enough of JSON Schema for the shipped files: type, required, properties,
/// items, enum, const, oneOf.
fn conforms(v: &Value, s: &Value, path: &str) -> Result<(), String> {
    if let Some(alts) = s.get("oneOf").and_then(Value::as_array) {
        return match alts.iter().filter(|a| conforms(v, a, path).is_ok()).count() {
            1 => Ok(()),
            n => Err(format!("{path}: matches {n} oneOf branches")),
        };
    }
    if let Some(c) = s.get("const") {
        if v != c {
            return Err(format!("{path}: {v} != const {c}"));
        }
    }
    if let Some(e) = s.get("enum").and_then(Value::as_array) {
        if !e.contains(v) {
            return Err(format!("{path}: {v} not in enum"));
        }
    }
    if let Some(t) = s.get("type") {
        let types: Vec<&str> = match t {
            Value::String(x) => vec![x.as_str()],
            Value::Array(xs) => xs.iter().filter_map(Value::as_str).collect(),
            _ => vec![],
        };
        let ok = types.iter().any(|t| match *t {
            "object" => v.is_object(),
            "array" => v.is_array(),
            "string" => v.is_string(),
            "number" => v.is_number(),
            "integer" => v.is_i64() || v.is_u64(),
            "boolean" => v.is_boolean(),
            "null" => v.is_null(),
            _ => false,
        });
        if !ok {
            return Err(format!("{path}: {v} is not {types:?}"));
        }
    }
    if let Some(obj) = v.as_object() {
        for key in s.get("required").and_then(Value::as_array).into_iter().flatten() {
            if !obj.contains_key(key.as_str().unwrap()) {
                return Err(format!("{path}: missing {key}"));
            }
        }
        for (k, sub) in s.get("properties").and_then(Value::as_object).into_iter().flatten() {
            if let Some(x) = obj.get(k) {
                conforms(x, sub, &format!("{path}.{k}"))?;
            }
        }
    }
    if let (Some(arr), Some(items)) = (v.as_array(), s.get("items")) {
        for (i, x) in arr.iter().enumerate() {
            conforms(x, items, &format!("{path}[{i}]"))?;
        }
    }
    Ok(())
}

fn schema(name: &str) -> Value {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas").join(format!("{name}.schema.json"));
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn outputs_match_shipped_schemas() {
    let runs: &[&[&str]] = &[
        &["sieve", "--limit", "10000", "--q-max", "4"],
        &["ud-test", "--expr", "x^(3/2)", "--N", "500", "--domain", "ap:4:1"],
        &["weyl-sum", "--expr", "sqrt(2)*x^2", "--domain", "integers", "--from", "10", "--to", "900"],
        &["vaughan-check", "--X", "300", "--u", "3", "--v", "4", "--phase", "x^(1/2)"],
        &["bound-check", "--kind", "kusmin-landau", "--expr", "x^(1/2)", "--from", "100", "--to", "400"],
        &["bound-check", "--kind", "composite", "--expr", "x^(5/2)", "--k", "2", "--X1", "1000", "--X", "1000"],
        &["bound-check", "--kind", "erdos-turan", "--trials", "5", "--N", "300"],
        &["ergodic-average", "--poly-degree", "1", "--shift", "1", "--freqs", "0.6180339887;0", "--f", "1,2", "--N", "2000"],
        &["recurrence-scan", "--target", "torus", "--exprs", "x^(3/2)", "--alphas", "0.41421356", "--boxes", "0:1/4;1/2:3/4", "--N", "2000", "--filter", "2,3"],
        &["recurrence-scan", "--target", "lattice", "--poly-degree", "2", "--shift", "-1", "--period", "2,5", "--mask", "1000010000", "--N", "2000", "--filter", "2"],
        &["fcplus-probe", "--poly-degree", "1", "--shift", "-1", "--atoms", "0:0.5", "--density", "0:1;1:0.5;-1:0.5", "--N", "2000"],
        &["corpus-run", "--N", "1000"],
    ];
    let envelope = schema("envelope");
    for args in runs {
        let x = run(args);
        assert_eq!(x.code, 0, "{args:?}: {}", x.stderr);
        let v = json(&x);
        conforms(&v, &envelope, "$").unwrap_or_else(|e| panic!("{args:?}: {e}"));
        conforms(&v["result"], &schema(args[0]), "$.result").unwrap_or_else(|e| panic!("{args:?}: {e}"));
    }
}
