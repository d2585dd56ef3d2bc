#![allow(dead_code)]

use std::path::PathBuf;
use std::process::{Command, Output};

use jsonschema::JSONSchema;
use serde_json::Value;

/// Invocations covered by the golden-run suite, with the schema each output
/// must satisfy.
pub const GOLDEN: &[(&str, &[&str])] = &[
    ("deficiency", &["deficiency", "--op", "momentum", "--interval", "0,1", "--stride", "1000"]),
    ("deficiency", &["deficiency", "--op", "momentum", "--interval", "0,inf", "--stride", "1000"]),
    ("deficiency", &["deficiency", "--op", "momentum", "--interval", "-inf,inf", "--stride", "1000"]),
    ("deficiency", &["deficiency", "--op", "hamiltonian", "--interval", "0,inf", "--stride", "1000"]),
    ("deficiency", &["deficiency", "--op", "time", "--interval", "0,inf", "--stride", "1000"]),
    ("extend", &["extend", "--operator", "momentum", "--gamma", "1"]),
    ("extend", &["extend", "--operator", "hamiltonian", "--gamma", "1"]),
    ("extend", &["extend", "--operator", "hamiltonian", "--gamma", "3.141592653589793"]),
    ("spectrum", &["spectrum", "--op", "momentum", "--theta", "0.5", "--n-min", "-2", "--n-max", "2"]),
    ("spectrum", &["spectrum", "--op", "well", "--a", "2", "--n-min", "1", "--n-max", "3"]),
    ("spectrum", &["spectrum", "--op", "robin", "--alpha", "-1", "--k-count", "4"]),
    ("boundstate", &["boundstate", "--alpha", "-1"]),
    ("boundstate", &["boundstate", "--alpha", "1"]),
    ("scatter", &["scatter", "--alpha", "-1", "--k", "0.7"]),
    ("scatter", &["scatter", "--alpha", "inf", "--k", "0.7"]),
    ("anomaly", &["anomaly", "--alpha", "-2", "--t", "0.5"]),
    ("paradox", &["--seed", "7", "paradox", "--id", "1"]),
    ("paradox", &["--seed", "7", "paradox", "--id", "2", "--n", "8", "--trials", "20"]),
    ("paradox", &["paradox", "--id", "3", "--n", "4"]),
    ("paradox", &["paradox", "--id", "4", "--n", "12", "--l", "2"]),
    ("classical", &["classical", "--s", "-2", "--samples", "4"]),
    ("classical", &["classical", "--s", "2"]),
    ("geometry", &["geometry", "--metric", "polar"]),
    ("geometry", &["geometry", "--metric", "spherical", "--probe", "bump:0.5,1.5"]),
    ("geometry", &["geometry", "--metric", "flat"]),
    ("sweep", &["sweep", "--sweep", "alpha=-4:-0.25:16", "anomaly"]),
    ("sweep", &["sweep", "--sweep", "k=0.1:10:100", "scatter", "--alpha", "-1"]),
    ("sweep", &["sweep", "--sweep", "alpha=-1:1:0", "boundstate"]),
];

pub fn saext(args: &[&str]) -> Output {
    saext_env(args, &[])
}

pub fn saext_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_saext"));
    cmd.args(args).env_remove("SAEXT_TOL");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("failed to launch saext")
}

/// Output with the wall-time line removed.
pub fn without_wall_time(stdout: &[u8]) -> Vec<u8> {
    let text = String::from_utf8_lossy(stdout);
    text.lines()
        .filter(|l| !l.trim_start().starts_with("\"wall_time_s\""))
        .flat_map(|l| l.bytes().chain(std::iter::once(b'\n')))
        .collect()
}

pub fn schema_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schemas")
}

pub fn load_schema(name: &str) -> JSONSchema {
    let path = schema_dir().join(format!("{name}.json"));
    let raw = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let value: Value = serde_json::from_str(&raw).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    JSONSchema::compile(&value).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Schema errors for `instance`, joined into one string.
pub fn validate(schema: &JSONSchema, instance: &Value) -> Result<(), String> {
    schema
        .validate(instance)
        .map_err(|errs| errs.map(|e| format!("{} at {}", e, e.instance_path)).collect::<Vec<_>>().join("; "))
}

/// Runs one golden invocation twice; returns the parsed JSON of the first run
/// or a description of what went wrong.
pub fn golden_check(schema_name: &str, args: &[&str]) -> Result<Value, String> {
    let first = saext(args);
    let second = saext(args);
    if !first.status.success() {
        return Err(format!("exit {:?}: {}", first.status.code(), String::from_utf8_lossy(&first.stderr)));
    }
    if without_wall_time(&first.stdout) != without_wall_time(&second.stdout) {
        return Err("output differs between runs".into());
    }
    let value: Value = serde_json::from_slice(&first.stdout).map_err(|e| format!("not JSON: {e}"))?;
    validate(&load_schema(schema_name), &value)?;
    Ok(value)
}
