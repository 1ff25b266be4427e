mod common;

use std::fs;

use common::simplang;

fn temp_program(name: &str, src: &str) -> String {
    let dir = std::env::temp_dir().join(format!("simplang-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    fs::write(&p, src).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn verified_assertion_exits_zero() {
    let r = simplang(&["tests/corpus/03_abs_assert.sl"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("branches: 2"));
}

#[test]
fn error_branch_exits_one_with_valid_model() {
    let r = simplang(&[
        "tests/corpus/02_ok_or_error.sl",
        "--models",
        "--report",
        "json",
    ]);
    assert_eq!(r.code, 1);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    let b = &v["branches"][1];
    assert_eq!(b["outcome"], "error");
    assert_eq!(b["model_valid"], true);
    let x: i64 = b["model"]["v0"].as_str().unwrap().parse().unwrap();
    assert!(x < 6);
}

#[test]
fn empty_file_is_a_parse_error() {
    let p = temp_program("empty.sl", "");
    let r = simplang(&[&p]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("1:1: empty program"), "{}", r.stderr);
}

#[test]
fn syntax_error_reports_line_and_column() {
    let p = temp_program("star.sl", "let x = 1 in\n  x * 2\n");
    let r = simplang(&[&p]);
    assert_eq!(r.code, 2);
    assert!(
        r.stderr.contains("star.sl:2:5: unexpected character `*`"),
        "{}",
        r.stderr
    );
}

#[test]
fn sort_error_exits_two() {
    let p = temp_program("sort.sl", "if 1 then 2 else 3");
    let r = simplang(&[&p]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("guard must be Bool"), "{}", r.stderr);
}

#[test]
fn missing_backend_exits_two_unless_concrete() {
    let r = simplang(&[
        "tests/corpus/44_division_by_difference.sl",
        "--smt-cmd",
        "/nonexistent/solver",
    ]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("cannot start solver"), "{}", r.stderr);
    let r = simplang(&[
        "tests/corpus/09_nested_lets.sl",
        "--smt-cmd",
        "/nonexistent/solver",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(simplang(&[]).code, 2);
    assert_eq!(
        simplang(&["tests/corpus/01_constant.sl", "--mode", "both"]).code,
        2
    );
    assert_eq!(
        simplang(&["tests/corpus/01_constant.sl", "--log-level", "loud"]).code,
        2
    );
    assert_eq!(simplang(&["/nonexistent.sl"]).code, 2);
}

#[test]
fn explicit_solver_command() {
    let r = simplang(&[
        "tests/corpus/18_assert_fails_sometimes.sl",
        "--smt-cmd",
        "z3 -in",
        "--solver",
        "direct",
    ]);
    assert_eq!(r.code, 1, "{}", r.stderr);
    assert!(r.stdout.contains("solver: direct"));
}

#[test]
fn step_fuel_is_reported() {
    let r = simplang(&[
        "tests/corpus/17_max3.sl",
        "--fuel-steps",
        "5",
        "--report",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["branches"].as_array().unwrap().len(), 0);
    assert!(v["stats"]["unexplored_steps"].as_u64().unwrap() > 0);
    assert_eq!(r.code, 0);
}

#[test]
fn ux_mode_is_accepted() {
    let r = simplang(&["tests/corpus/14_nested_ifs_two.sl", "--mode", "ux"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("mode: ux"));
}

#[test]
fn timestamps_only_on_request() {
    let plain = simplang(&[
        "tests/corpus/02_ok_or_error.sl",
        "--log-level",
        "debug",
        "--report",
        "json",
    ]);
    assert!(!plain.stdout.contains("offset_us"));
    let stamped = simplang(&[
        "tests/corpus/02_ok_or_error.sl",
        "--log-level",
        "debug",
        "--report",
        "json",
        "--log-timestamps",
    ]);
    assert!(stamped.stdout.contains("offset_us"));
}

#[test]
fn smt_log_shows_queries() {
    let r = simplang(&[
        "tests/corpus/44_division_by_difference.sl",
        "--log-level",
        "smt",
    ]);
    assert!(r.stdout.contains("> (check-sat)"), "{}", r.stdout);
}
