//! Helpers shared by the CLI test targets.
#![allow(dead_code)]

use std::path::PathBuf;
use std::process::{Command, Output};

pub const ENV_VARS: [&str; 7] = [
    "DILATE_TOL",
    "DILATE_SEED",
    "DILATE_NMAX",
    "DILATE_SAMPLES",
    "DILATE_WINDOW",
    "DILATE_OUT",
    "DILATE_FORMAT",
];

pub fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

/// Runs the binary from the crate directory with a clean `DILATE_*` environment.
pub fn dilate(args: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dilate"));
    cmd.current_dir(crate_dir()).args(args);
    for v in ENV_VARS {
        cmd.env_remove(v);
    }
    cmd.output().expect("binary runs")
}

pub fn dilate_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dilate"));
    cmd.current_dir(crate_dir()).args(args);
    for v in ENV_VARS {
        cmd.env_remove(v);
    }
    cmd.envs(env.iter().copied());
    cmd.output().expect("binary runs")
}

/// `(command, fixture, expected exit code)`
pub const CASES: [(&str, &str, i32); 24] = [
    ("validate-semigroup", "semigroup-z3", 0),
    ("validate-semigroup", "semigroup-broken", 1),
    ("check-pd", "kernel-minimal", 0),
    ("check-pd", "invariant-z2-x2", 1),
    ("build-rkhm", "invariant-cyclic", 0),
    ("build-rkhm", "invariant-z2-x2", 1),
    ("dilate", "invariant-cyclic", 0),
    ("dilate", "invariant-units", 0),
    ("dilate", "invariant-null-bad", 1),
    ("bounded", "invariant-cyclic", 0),
    ("bounded", "invariant-units", 0),
    ("extend", "invariant-null", 0),
    ("extend", "invariant-units", 0),
    ("extend", "invariant-null-bad", 1),
    ("stinespring", "cp-random", 0),
    ("stinespring", "cp-transpose", 1),
    ("naimark", "povm-trine", 0),
    ("naimark", "povm-incomplete", 2),
    ("contraction", "contraction-random", 0),
    ("contraction", "contraction-large", 1),
    ("moments", "moments-atoms", 0),
    ("moments", "moments-bad", 1),
    ("subnormal", "subnormal-diagonal", 0),
    ("subnormal", "subnormal-jordan", 1),
];

pub fn fixture(name: &str) -> String {
    format!("fixtures/{name}.json")
}

pub fn golden_path(command: &str, name: &str) -> PathBuf {
    crate_dir().join("tests/golden").join(format!("{command}__{name}.json"))
}
