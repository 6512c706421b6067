mod common;

use common::{dilate, dilate_env, fixture, golden_path, CASES};
use serde_json::Value;

fn json_report(command: &str, name: &str) -> (String, i32) {
    let out = dilate(&[command, &fixture(name), "--format", "json"]);
    (String::from_utf8(out.stdout).unwrap(), out.status.code().unwrap())
}

/// Set `DILATE_BLESS=1` to rewrite the golden files.
#[test]
fn reports_match_golden_files() {
    let bless = std::env::var_os("DILATE_BLESS").is_some();
    let mut mismatches = Vec::new();
    for (command, name, code) in CASES {
        let (text, status) = json_report(command, name);
        assert_eq!(status, code, "{command} {name}: exit {status}\n{text}");
        let path = golden_path(command, name);
        if bless {
            std::fs::write(&path, &text).unwrap();
            continue;
        }
        let expected = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing {}", path.display()));
        if expected != text {
            mismatches.push(format!("{command} {name}"));
        }
    }
    assert!(mismatches.is_empty(), "golden mismatches: {mismatches:?}");
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for (command, name, _) in CASES {
        let (a, _) = json_report(command, name);
        let (b, _) = json_report(command, name);
        assert_eq!(a, b, "{command} {name}");
    }
}

#[test]
fn every_command_has_a_golden_case() {
    for c in dilation_cli::Command::ALL {
        assert!(CASES.iter().any(|(name, _, _)| *name == c.name()), "{}", c.name());
    }
}

#[test]
fn reports_carry_schema_version_and_sorted_keys() {
    fn keys_sorted(v: &Value) -> bool {
        match v {
            Value::Object(m) => {
                let keys: Vec<&String> = m.keys().collect();
                keys.windows(2).all(|w| w[0] < w[1]) && m.values().all(keys_sorted)
            }
            Value::Array(items) => items.iter().all(keys_sorted),
            _ => true,
        }
    }
    for (command, name, code) in CASES {
        let (text, _) = json_report(command, name);
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["schema_version"], dilation_cli::SCHEMA_VERSION);
        assert!(keys_sorted(&v), "{command} {name}");
        // every verdict comes with at least one certificate
        if code != 2 {
            assert!(!v["verdicts"].as_object().unwrap().is_empty());
            assert!(!v["certificates"].as_object().unwrap().is_empty());
        } else {
            assert!(v["error"]["name"].is_string());
        }
    }
}

#[test]
fn seed_changes_sampled_certificates_only() {
    let a = dilate(&["dilate", &fixture("invariant-units"), "--format", "json", "--seed", "1"]);
    let b = dilate(&["dilate", &fixture("invariant-units"), "--format", "json", "--seed", "2"]);
    let va: Value = serde_json::from_slice(&a.stdout).unwrap();
    let vb: Value = serde_json::from_slice(&b.stdout).unwrap();
    assert_eq!(va["options"]["seed"], 1);
    assert_eq!(vb["options"]["seed"], 2);
    assert_eq!(va["verdicts"], vb["verdicts"]);
    assert_eq!(va["certificates"]["reconstruction_error"], vb["certificates"]["reconstruction_error"]);
}

#[test]
fn flags_override_environment_and_file() {
    let file = fixture("invariant-units");
    let env = dilate_env(&["dilate", &file, "--format", "json"], &[("DILATE_TOL", "1e-7")]);
    let v: Value = serde_json::from_slice(&env.stdout).unwrap();
    assert_eq!(v["options"]["tol"], 1e-7);
    // the fixture stores seed 7
    assert_eq!(v["options"]["seed"], 7);
    let both = dilate_env(&["dilate", &file, "--format", "json", "--tol", "1e-6"], &[("DILATE_TOL", "1e-7")]);
    let v: Value = serde_json::from_slice(&both.stdout).unwrap();
    assert_eq!(v["options"]["tol"], 1e-6);
    let fmt = dilate_env(&["dilate", &file], &[("DILATE_FORMAT", "json"), ("DILATE_SEED", "3")]);
    let v: Value = serde_json::from_slice(&fmt.stdout).unwrap();
    assert_eq!(v["options"]["seed"], 3);
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("dilate-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = dilate(&["check-pd", &fixture("kernel-minimal"), "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let (direct, _) = json_report("check-pd", "kernel-minimal");
    assert_eq!(std::fs::read_to_string(&path).unwrap(), direct);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn text_format_names_status() {
    let out = dilate(&["check-pd", &fixture("invariant-z2-x2")]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("check-pd (invariant): NEGATIVE"));
    assert!(text.contains("min_eigenvalue: -1.000000e0"));
}

#[test]
fn errors_exit_two() {
    let out = dilate(&["check-pd", "fixtures/does-not-exist.json", "--format", "json"]);
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["error"]["name"], "IoError");
    let out = dilate(&["dilate", &fixture("semigroup-z3"), "--format", "json"]);
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["error"]["name"], "UnsupportedKind");
}

#[test]
fn no_artifacts_flag() {
    let out = dilate(&["dilate", &fixture("invariant-units"), "--format", "json", "--no-artifacts"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v.get("artifacts").is_none());
}

#[test]
fn schema_and_examples_subcommands() {
    let out = dilate(&["schema"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), dilation_cli::SCHEMA);
    for name in dilation_cli::examples::NAMES {
        let out = dilate(&["example", name]);
        assert_eq!(out.status.code(), Some(0));
        let shipped = std::fs::read_to_string(common::crate_dir().join(fixture(name))).unwrap();
        assert_eq!(String::from_utf8(out.stdout).unwrap(), shipped, "{name}");
    }
    assert_eq!(dilate(&["example", "nope"]).status.code(), Some(2));
}
