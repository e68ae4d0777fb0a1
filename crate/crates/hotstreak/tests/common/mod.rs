#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub const X60: &str = "11011110010111111001110111101110111101010101";
pub const THOMPSON_DET: &str = "1110100110000011";

pub fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn fixtures() -> PathBuf {
    workspace_root().join("fixtures/shots.csv")
}

pub fn hotstreak(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hotstreak"))
        .args(args)
        .output()
        .expect("run hotstreak")
}

pub fn schema(name: &str) -> serde_json::Value {
    let path = workspace_root().join("schemas").join(format!("{name}.schema.json"));
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Panics with every validation error if `doc` does not match the schema.
pub fn assert_valid(name: &str, doc: &serde_json::Value) {
    let validator = jsonschema::validator_for(&schema(name)).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{name}: {errors:?}");
}

pub fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}
