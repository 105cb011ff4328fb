//! Committed report snapshots. Regenerate with `UPDATE_GOLDEN=1 cargo test -p jointeig-cli --test golden`.

use std::path::PathBuf;
use std::process::Command;

const CASES: &[(&str, &[&str])] = &[
    (
        "distribution_singlet_zz_local_joint.json",
        &["distribution", "--state", "singlet", "--obs", "zz", "--semantics", "local-joint", "--trials", "1000", "--seed", "7", "--format", "json"],
    ),
    ("distribution_singlet_zz_luders.txt", &["distribution", "--state", "singlet", "--obs", "zz", "--semantics", "luders"]),
    ("distribution_basis_mp_xx_local_joint.txt", &["distribution", "--state", "basis:-+", "--obs", "xx", "--semantics", "local-joint"]),
    ("commutators.txt", &["commutators"]),
    ("commutators.json", &["commutators", "--format", "json"]),
    (
        "teleport_luders_400.json",
        &["teleport", "--a", "0.6", "--b", "0.8", "--semantics", "luders", "--trials", "400", "--seed", "7", "--format", "json"],
    ),
    ("teleport_local_joint_refusal.txt", &["teleport", "--a", "1", "--b", "0", "--semantics", "local-joint"]),
    ("teleport_naive.txt", &["teleport", "--a", "1", "--b", "0", "--naive"]),
    ("teleport_random_forced.txt", &["teleport", "--random", "4", "--force-branch", "phi-", "--seed", "3"]),
    ("degeneracy_zz.txt", &["degeneracy", "--obs", "zz"]),
    ("degeneracy_bell_op_sqrt2.json", &["degeneracy", "--bell-op", "1.4142,1.4142", "--format", "json"]),
    ("degeneracy_bell_op_1_2.txt", &["degeneracy", "--bell-op", "1,2"]),
];

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_jointeig")).args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).expect("utf-8 stdout"),
        String::from_utf8(out.stderr).expect("utf-8 stderr"),
    )
}

#[test]
fn reports_match_golden_files() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let mut mismatched = Vec::new();
    for (name, args) in CASES {
        let (code, stdout, stderr) = run(args);
        assert_eq!(code, 0, "{name}: {stderr}");
        let path = golden_dir().join(name);
        if update {
            std::fs::create_dir_all(golden_dir()).unwrap();
            std::fs::write(&path, &stdout).unwrap();
            continue;
        }
        let expected = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {name}"));
        if expected != stdout {
            mismatched.push(*name);
        }
    }
    assert!(mismatched.is_empty(), "golden mismatch: {mismatched:?}");
}

#[test]
fn repeated_runs_are_byte_identical() {
    for (name, args) in CASES {
        assert_eq!(run(args).1, run(args).1, "{name}");
    }
}

#[test]
fn json_reports_parse_and_tables_sum_to_one() {
    for (name, args) in CASES.iter().filter(|(n, _)| n.ends_with(".json")) {
        let doc: serde_json::Value = serde_json::from_str(&run(args).1).unwrap();
        assert_eq!(doc["schema_version"], 1, "{name}");
        for table in doc["tables"].as_array().unwrap() {
            let Some(check) = table.get("probability") else { continue };
            if check["sum_to_one"] != true || check.get("group_by").is_some() {
                continue;
            }
            let cols = table["columns"].as_array().unwrap();
            let col = cols.iter().position(|c| *c == check["column"]).unwrap();
            let sum: f64 = table["rows"].as_array().unwrap().iter().map(|r| r[col].as_f64().unwrap()).sum();
            assert!((sum - 1.0).abs() < 1e-9, "{name}: {}", table["name"]);
        }
    }
}

#[test]
fn text_and_json_carry_the_same_numbers() {
    let (_, json, _) = run(&["distribution", "--state", "amps:1,2,3,4i", "--obs", "xz", "--semantics", "luders", "--format", "json"]);
    let (_, txt, _) = run(&["distribution", "--state", "amps:1,2,3,4i", "--obs", "xz", "--semantics", "luders"]);
    let doc: serde_json::Value = serde_json::from_str(&json).unwrap();
    for row in doc["tables"][0]["rows"].as_array().unwrap() {
        for cell in row.as_array().unwrap() {
            let token = match cell {
                serde_json::Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            assert!(txt.contains(&token), "{token} missing from text output");
        }
    }
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["teleport", "--a", "1", "--b", "1"]).0, 1);
    assert_eq!(run(&["distribution", "--state", "basis:+x", "--obs", "zz"]).0, 1);
    assert_eq!(run(&["frobnicate"]).0, 1);
    assert_eq!(run(&["--help"]).0, 0);
    assert_eq!(run(&["teleport", "--a", "1", "--b", "0", "--semantics", "local-joint"]).0, 0);
}

#[test]
fn usage_errors_report_position() {
    let (_, _, err) = run(&["distribution", "--state", "basis:+x", "--obs", "zz"]);
    assert!(err.contains("position 7"), "{err}");
}
