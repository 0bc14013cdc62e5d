#![allow(dead_code)]

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

pub const L_PER_GAL: f64 = 3.785411784;

pub fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .display()
        .to_string()
}

pub fn repo_file(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

pub fn hpcwater() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_hpcwater"));
    c.env_remove("THIRSTY_PARAMS");
    c
}

pub fn run(args: &[&str]) -> Output {
    hpcwater().args(args).output().expect("binary runs")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Runs, asserts success and returns the parsed report.
pub fn report(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(code(&out), 0, "{args:?} failed: {}", stderr(&out));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

pub fn site_args() -> Vec<String> {
    vec![
        "--site".into(),
        "polaris".into(),
        "--weather".into(),
        data("polaris_weather.csv"),
        "--mix".into(),
        data("polaris_mix.csv"),
    ]
}

pub fn with<'a>(head: &[&'a str], tail: &'a [String]) -> Vec<&'a str> {
    head.iter().copied().chain(tail.iter().map(String::as_str)).collect()
}

pub fn value(q: &Value) -> f64 {
    assert!(q["unit"].is_string(), "not a quantity: {q}");
    q["value"].as_f64().unwrap_or_else(|| panic!("no value in {q}"))
}
