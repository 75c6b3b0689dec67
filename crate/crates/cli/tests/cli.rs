use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

fn stdlib_file(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/stdlib").join(name).display().to_string()
}

fn slc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slc")).args(args).env_remove("SLC_STDLIB").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

#[test]
fn check_bundled_stdlib() {
    let o = slc(&["check", &stdlib_file("stdlib.slc")]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("sort: well-formed"));
}

#[test]
fn check_reports_witness() {
    let o = slc(&["check", &fixture("bang_abs.slc")]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("abstraction over temporary variable"));
    let o = slc(&["check", &fixture("bang_abs.slc"), "--json"]);
    assert_eq!(code(&o), 2);
    let v = json(&o);
    assert_eq!(v["all_well_formed"], false);
    assert_eq!(v["definitions"][0]["info"]["failure_witness"]["clause"], "abs-over-temporary");
}

#[test]
fn check_selects_definitions() {
    assert_eq!(code(&slc(&["check", &fixture("mixed.slc")])), 2);
    assert_eq!(code(&slc(&["check", &fixture("mixed.slc"), "--def", "id"])), 0);
    assert_eq!(code(&slc(&["check", &fixture("mixed.slc"), "--def", "nope"])), 1);
}

#[test]
fn missing_file_and_syntax_errors_are_usage_errors() {
    assert_eq!(code(&slc(&["check", "/nonexistent/file.slc"])), 1);
    assert_eq!(code(&slc(&["check", &fixture("syntax_error.slc")])), 1);
    assert_eq!(code(&slc(&["no-such-command"])), 1);
    assert_eq!(code(&slc(&["--help"])), 0);
}

#[test]
fn stats_for_two() {
    let o = slc(&["stats", &stdlib_file("stdlib.slc"), "--def", "two", "--n", "4", "--json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["metrics"]["size"], 7);
    assert_eq!(v["metrics"]["depth"], 0);
    assert_eq!(v["metrics"]["rank"], 2);
    assert_eq!(v["metrics"]["weight"], 6);
    assert_eq!(v["metrics"]["nlet"], 1);
    assert_eq!(v["certificate"]["bound"], "343");
}

#[test]
fn stats_for_a_variable_and_small_parameter() {
    let o = slc(&["stats", &fixture("term.slc"), "--json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["name"], "main");
    let o = slc(&["stats", &stdlib_file("stdlib.slc"), "--def", "two", "--n", "1"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("below the rank"));
}

#[test]
fn reduce_two() {
    let o = slc(&["reduce", &fixture("apply_two.slc"), "--monitor"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("steps: 3"));
    assert!(out.contains("normal form: (g (g z))"));
    let v = json(&slc(&["reduce", &fixture("apply_two.slc"), "--json"]));
    assert_eq!(v["length"], 3);
    assert_eq!(v["final"], "(g (g z))");
}

#[test]
fn reduce_normal_form_takes_no_steps() {
    let o = slc(&["reduce", &stdlib_file("stdlib.slc"), "--def", "eps"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("steps: 0"));
}

#[test]
fn random_strategy_is_deterministic() {
    let run = || stdout(&slc(&["reduce", &fixture("apply_two.slc"), "--strategy", "random", "--seed", "7", "--json"]));
    assert_eq!(run(), run());
}

#[test]
fn reduce_truncates_long_traces() {
    let o = slc(&["reduce", &stdlib_file("stdlib.slc"), "--def", "head'"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn typecheck() {
    let o = slc(&["type", &stdlib_file("stdlib.typed.slc")]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("sort : !"));
    let o = slc(&["type", &fixture("types.slc"), "--json"]);
    assert_eq!(code(&o), 2);
    let v = json(&o);
    assert_eq!(v["definitions"][0]["status"], "typed");
    assert_eq!(v["definitions"][1]["status"], "failed");
    assert_eq!(v["definitions"][1]["error"]["rule"], "type-mismatch");
}

#[test]
fn demo_sort() {
    let o = slc(&["demo", "sort", "--list", "2,0,1", "--slack", "3"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("output:      0,1,2\n"));
    let o = slc(&["demo", "sort", "--list", "", "--slack", "0", "--json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["output"], "");
}

#[test]
fn demo_map_reverses() {
    let o = slc(&["demo", "map", "--fn", "succ", "--list", "0,2", "--slack", "2", "--monitor", "--json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["output"], "0,1");
    assert_eq!(v["monitor"], "ok");
    assert_eq!(v["within_bound"], true);
}

#[test]
fn demo_rejects_bad_input() {
    assert_eq!(code(&slc(&["demo", "sort", "--list", "0,3"])), 1);
    assert_eq!(code(&slc(&["demo", "sort", "--list", "0,1", "--slack", "1"])), 1);
}

#[test]
fn bound_check_small() {
    let o = slc(&["bound-check", "--max-size", "6", "--json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["ok"], true);
    assert_eq!(v["report"]["terms"], 1 + 4 + 19 + 110 + 742 + 5583 - (1 + 4 + 19 + 110 + 742));
    let o = slc(&["bound-check", "--max-size", "1"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("checked 1 terms"));
}

#[test]
fn bound_check_catches_injected_fault() {
    let o = slc(&["bound-check", "--max-size", "4", "--fault", "drop-argument"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("not-confluent"));
}

#[test]
fn stdlib_override() {
    let run = |env: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_slc"));
        c.args(["reduce", &fixture("apply_two.slc")]);
        match env {
            Some(p) => c.env("SLC_STDLIB", p),
            None => c.env_remove("SLC_STDLIB"),
        };
        c.output().unwrap()
    };
    assert!(stdout(&run(None)).contains("normal form: (g (g z))"));
    let o = run(Some(&fixture("override.slc")));
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("normal form: z"));
    assert_eq!(code(&run(Some("/nonexistent/stdlib.slc"))), 1);
}
