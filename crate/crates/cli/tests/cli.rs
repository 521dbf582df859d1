//! Machine-mode output is compared against the files in `tests/golden`.
//! Run with `UPDATE_GOLDEN=1` to rewrite them.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests")
}

fn fixture(name: &str) -> String {
    dir().join("fixtures").join(name).display().to_string()
}

fn jep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jep"))
        .args(args)
        .env_remove("RUST_LOG")
        .output()
        .expect("binary runs")
}

fn golden(name: &str, args: &[&str], code: i32) {
    let out = jep(args);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        out.status.code(),
        Some(code),
        "{name}: stdout {stdout} stderr {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let path = dir().join("golden").join(format!("{name}.out"));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, &stdout).unwrap();
        return;
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(stdout, want, "{name}");
}

#[test]
fn strings_golden() {
    golden("strings_forb_ab_ba", &["strings", "--forbid", "ab,ba", "--alphabet", "ab", "--machine"], 1);
    golden("strings_forb_ab", &["strings", "--forbid", "ab", "--alphabet", "ab", "--machine"], 0);
    golden(
        "strings_dfa_file",
        &["strings", "--automaton", &fixture("forb_ab.dfa"), "--machine"],
        0,
    );
    golden(
        "strings_semibad",
        &["strings", "--forbid", "ab,ba", "--alphabet", "ab", "--semibad", "--machine"],
        1,
    );
}

#[test]
fn trees_golden() {
    golden(
        "trees_zeros_or_ones",
        &["trees", "--automaton", &fixture("zeros_or_ones.tta"), "--machine"],
        1,
    );
    golden(
        "trees_forbid_leaf1",
        &["trees", "--forbid", &fixture("leaf1.tree"), "--labels", "0 1", "--machine"],
        0,
    );
}

#[test]
fn cographs_golden() {
    golden("cographs_p4", &["cographs", "--forbid", &fixture("p4.graph"), "--machine"], 0);
    let out = std::env::temp_dir().join(format!("jep-cli-test-{}", std::process::id()));
    let out_s = out.display().to_string();
    let o = jep(&[
        "cographs",
        "--forbid",
        &fixture("p4.graph"),
        &fixture("p3.graph"),
        &fixture("k2uk1.graph"),
        "--out",
        &out_s,
        "--machine",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let text = String::from_utf8(o.stdout).unwrap();
    let stable: String = text.lines().filter(|l| !l.contains("-file:")).map(|l| format!("{l}\n")).collect();
    let want = std::fs::read_to_string(dir().join("golden/cographs_p4_p3_k2uk1.out"));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(dir().join("golden/cographs_p4_p3_k2uk1.out"), &stable).unwrap();
    } else {
        assert_eq!(stable, want.unwrap());
    }
    assert_eq!(std::fs::read_to_string(out.join("x.graph")).unwrap(), "n: 2\nedge: 0 1\n");
    assert_eq!(std::fs::read_to_string(out.join("y.graph")).unwrap(), "n: 2\n");
    std::fs::remove_dir_all(&out).unwrap();
}

#[test]
fn pair_commands_golden() {
    let tta = fixture("zeros_or_ones.tta");
    let dfa = fixture("forb_ab.dfa");
    golden("check_pair_tree_not_joint", &["check-pair", "--automaton", &tta, "(0)", "(1)", "--machine"], 1);
    golden(
        "check_pair_tree_joint",
        &["check-pair", "--automaton", &tta, "(0)", &fixture("t0.tree"), "--machine"],
        0,
    );
    golden("check_pair_string", &["check-pair", "--automaton", &dfa, "a", "b", "--machine"], 0);
    golden("joint_witness_string", &["joint-witness", "--automaton", &dfa, "a", "b", "--machine"], 0);
    golden(
        "joint_witness_tree",
        &["joint-witness", "--automaton", &tta, "(0)", "(0 (0) (0))", "--machine"],
        0,
    );
    golden("joint_witness_none", &["joint-witness", "--automaton", &tta, "(0)", "(1)", "--machine"], 1);
}

#[test]
fn bounds_and_badpairs_golden() {
    golden("bounds_forb_ab", &["bounds", "--forbid", "ab", "--alphabet", "ab", "--machine"], 0);
    golden(
        "bounds_tree",
        &["bounds", "--automaton", &fixture("zeros_or_ones.tta"), "--machine"],
        0,
    );
    golden(
        "badpairs_forb_ab_ba",
        &["badpairs-automaton", "--forbid", "ab,ba", "--alphabet", "ab", "--bound", "3"],
        0,
    );
}

#[test]
fn oracle_validate_golden() {
    golden(
        "oracle_cotree",
        &["oracle-validate", "--suite", "cotree", "--seed", "5", "--trials", "30", "--machine"],
        0,
    );
}

#[test]
fn mutation_makes_validation_fail() {
    let o = jep(&["oracle-validate", "--suite", "tree-claim1", "--mutation", "leaf-only"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8(o.stdout).unwrap().contains("discrepancy: trial"));
}

#[test]
fn machine_output_is_deterministic() {
    let args = ["strings", "--forbid", "ab,ba,aa", "--alphabet", "ab", "--machine"];
    assert_eq!(jep(&args).stdout, jep(&args).stdout);
}

#[test]
fn human_mode_adds_prose() {
    let o = jep(&["strings", "--forbid", "ab", "--alphabet", "ab"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("verdict: jep\n"));
    assert!(text.lines().count() > 1);
}

#[test]
fn exit_codes_for_errors() {
    let o = jep(&["check-pair", "--automaton", &fixture("zeros_or_ones.tta"), &fixture("broken.tree"), "(0)"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("broken.tree:2:"), "{err}");

    let o = jep(&["strings", "--automaton", &fixture("partial.dfa")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("partial.dfa:"));

    let o = jep(&["strings", "--automaton", "/nonexistent/x.dfa"]);
    assert_eq!(o.status.code(), Some(2));

    assert_eq!(jep(&["strings"]).status.code(), Some(2));
    assert_eq!(jep(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(jep(&["cographs", "--forbid", &fixture("p3.graph")]).status.code(), Some(2));

    let o = jep(&["trees", "--automaton", &fixture("zeros_or_ones.tta"), "--max-size", "2"]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("size limit exceeded"), "{err}");
}

#[test]
fn non_cograph_is_ignored_with_warning() {
    let o = jep(&["cographs", "--forbid", &fixture("p4.graph"), &fixture("c5.graph"), "--machine"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8(o.stderr).unwrap().starts_with("warning: "));
}
