//! End to end runs of the `aptc` binary: outputs and exit codes.

use std::process::{Command, Output};

fn aptc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aptc")).args(args).env_remove("APTC_BOUND").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn normalize_prints_the_basic_term() {
    let o = aptc(&["normalize", "(a + b) . c"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "a . c + b . c");
}

#[test]
fn normalize_with_silent_laws_absorbs_tau() {
    let o = aptc(&["normalize", "--silent-laws", "a . tau"]);
    assert_eq!(stdout(&o).trim(), "a");
}

#[test]
fn parse_errors_exit_with_usage_status() {
    let o = aptc(&["normalize", "a . ("]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("expected a term"));
}

#[test]
fn unknown_mode_and_verb_exit_with_usage_status() {
    assert_eq!(aptc(&["--mode", "zz", "equiv", "a", "a"]).status.code(), Some(2));
    assert_eq!(aptc(&["bogus"]).status.code(), Some(2));
}

#[test]
fn equiv_exit_codes_follow_the_verdict() {
    let o = aptc(&["equiv", "a || b", "b || a"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("RELATED step"));
    let o = aptc(&["equiv", "a || b", "a . b + b . a"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("DISTINGUISHED step"));
}

#[test]
fn absorption_separates_hp_from_hhp() {
    let p = "a || (b + c) + a || b + b || (a + c)";
    let q = "a || (b + c) + b || (a + c)";
    assert_eq!(aptc(&["--mode", "hp", "equiv", p, q]).status.code(), Some(0));
    assert_eq!(aptc(&["--mode", "hhp", "equiv", p, q]).status.code(), Some(1));
}

#[test]
fn rooted_branching_modes() {
    assert_eq!(aptc(&["--mode", "rbs", "equiv", "a || tau", "a"]).status.code(), Some(0));
    let o = aptc(&["--mode", "rbs", "equiv", "tau . a", "a"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("at the root"), "{}", stdout(&o));
}

#[test]
fn structured_output_is_json() {
    let o = aptc(&["--format", "structured", "equiv", "a || b", "a . b + b . a"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"], "DISTINGUISHED");
    assert_eq!(v["relation"], "step");
    assert!(v["sequence"].as_array().is_some_and(|s| !s.is_empty()));
}

#[test]
fn lts_is_printed_in_aldebaran_format() {
    let o = aptc(&["lts", "a . b"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("des (0, 3, 4)"));
    assert_eq!(lines.collect::<Vec<_>>(), ["(0, \"a\", 1)", "(1, \"b\", 2)", "(2, \"tick\", 3)"]);
}

#[test]
fn pes_lists_events_and_causality() {
    let o = aptc(&["pes", "a || b . c"]);
    let text = stdout(&o);
    assert!(text.contains("event 0 a"));
    assert!(text.contains("le 1 2"));
}

#[test]
fn bounds_come_from_the_flag_or_the_environment() {
    assert_eq!(aptc(&["--bound", "3", "lts", "a . b . c . d"]).status.code(), Some(3));
    let o = Command::new(env!("CARGO_BIN_EXE_aptc"))
        .args(["lts", "a . b . c . d"])
        .env("APTC_BOUND", "3")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("state bound"));
    assert_eq!(aptc(&["--bound", "10", "lts", "a . b . c . d"]).status.code(), Some(0));
}

#[test]
fn projection_and_aip() {
    let o = aptc(&["--depth", "2", "project", "a . b . c"]);
    assert_eq!(stdout(&o).trim(), "a . b . delta");
    let o = aptc(&["--depth", "5", "aip", "X where X = a . X", "Y where Y = a . a . Y"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("equivalent-up-to-5"));
    let o = aptc(&["--depth", "5", "aip", "a", "a + b"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("distinguished-at-1"));
}

#[test]
fn cfar_reports_cluster_and_exits() {
    let o = aptc(&["cfar", "X where X = a . X + b", "--hide", "a"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "tau . hide{a}(b)\ncluster: {X}\nexits: b");
    let o = aptc(&["cfar", "X where X = a . X", "--hide", "a"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("no exits"));
}

#[test]
fn verify_abp_both_variants() {
    for (variant, states) in [("parallel", "66 states"), ("traditional", "34 states")] {
        let o = aptc(&["verify-abp", "--variant", variant]);
        assert_eq!(o.status.code(), Some(0), "{variant}");
        assert!(stdout(&o).contains(states), "{}", stdout(&o));
    }
    assert_eq!(aptc(&["verify-abp", "--variant", "parallel", "--fault"]).status.code(), Some(1));
}
