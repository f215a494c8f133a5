//! The binary end to end: spec'd commands, exit codes and report formats.

use std::path::PathBuf;
use std::process::Command;

use encodability::document::parse_instance;
use encodability::harness::fixtures::{fixture, FixtureName};
use serde_json::Value;

fn fixture_file(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.instance"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_encodability")).args(args).output().expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).expect("utf-8"),
        String::from_utf8(out.stderr).expect("utf-8"),
    )
}

fn machine(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--format", "machine"];
    full.extend_from_slice(args);
    let (code, stdout, _) = run(&full);
    (code, serde_json::from_str(&stdout).expect("machine output is JSON"))
}

#[test]
fn shipped_fixture_files_match_the_figures() {
    for name in FixtureName::ALL {
        let parsed = parse_instance(fixture_file(&name.to_string())).unwrap();
        assert_eq!(parsed, fixture(name), "{name}");
    }
    assert_eq!(parse_instance(fixture_file("fig1")).unwrap().relations["RT"].len(), 4);
}

#[test]
fn oc_on_figure_one_holds() {
    let f1 = fixture_file("fig1");
    let (code, out, _) =
        run(&["check", "oc", "--variant", "standard", "--rel-target", "RT", "-i", f1.to_str().unwrap()]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("holds"));
}

#[test]
fn oc_on_figure_two_fails_at_s2_t3() {
    let f2 = fixture_file("fig2");
    let (code, doc) =
        machine(&["check", "oc", "--variant", "standard", "--rel-target", "RT", "-i", f2.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(doc["verdict"], false);
    assert_eq!(doc["command"], "check");
    let cx = &doc["counterexamples"][0];
    assert_eq!(cx["states"], serde_json::json!(["s2", "t3"]));
    assert_eq!(cx["challenge"], serde_json::json!(["t2", "t3"]));
}

#[test]
fn exit_code_tracks_the_verdict_field() {
    let f1 = fixture_file("fig1");
    let f = f1.to_str().unwrap();
    for args in [
        vec!["check", "divergence-reflection", "-i", f],
        vec!["check", "oc", "--variant", "strong", "-i", f],
        vec!["check", "barb-sensitiveness", "--mode", "preserve", "--strength", "has", "-i", f],
        vec!["witness", "OC-STANDARD", "-i", f],
        vec!["witness", "VG12", "--kind", "correspondence-sim", "--respect", "divergent:respect", "-i", f],
    ] {
        let (code, doc) = machine(&args);
        let verdict = doc["verdict"].as_bool().expect("verdict present");
        assert_eq!(code, if verdict { 0 } else { 1 }, "{args:?}");
    }
}

#[test]
fn input_errors_exit_two_without_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.instance");
    std::fs::write(&bad, r#"{"source": {"states": ["s"]}, "target": {"states": ["s"]}, "encoding": {"s": "s"}}"#)
        .unwrap();
    let (code, doc) = machine(&["check", "divergence-reflection", "-i", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(doc.get("verdict").is_none());
    assert_eq!(doc["error"]["code"], "E_DISJOINT");

    let (code, _, err) = run(&["check", "teleportation", "-i", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.starts_with("E_USAGE"), "{err}");

    let f2 = fixture_file("fig2");
    let (code, _, err) = run(&["witness", "OC-STANDARD", "-i", f2.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("E_PRECONDITION"), "{err}");
}

#[test]
fn fixture_emit_writes_a_parseable_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig2.instance");
    let (code, _, _) = run(&["fixture", "fig2", "--emit", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(parse_instance(&path).unwrap(), fixture(FixtureName::Fig2));
    let (code, _, err) = run(&["fixture", "fig9", "--emit", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("E_UNKNOWN_FIXTURE"), "{err}");
}

#[test]
fn greatest_and_relprops_on_figure_three() {
    let f3 = fixture_file("fig3");
    let f = f3.to_str().unwrap();
    let (code, doc) =
        machine(&["greatest", "coupled-sim", "--over", "target", "--respect", "reaches-barb:preserve", "-i", f]);
    assert_eq!(code, 0);
    let pairs = doc["relation"]["pairs"].as_array().unwrap();
    assert!(pairs.contains(&serde_json::json!(["t2", "t3"])) && pairs.contains(&serde_json::json!(["t3", "t2"])));
    let (code, doc) = machine(&["relprops", "R_corr_sim", "-i", f]);
    assert_eq!(code, 0);
    assert_eq!(doc["report"]["correspondence_simulation"], true);
    assert_eq!(doc["report"]["weak_bisimulation"], false);
}

#[test]
fn verify_rhs_reports_the_forced_pair() {
    let f3 = fixture_file("fig3");
    let (code, doc) = machine(&["verify-rhs", "COMB-OC-SUCC-BARB", "--rel", "R_corr_sim", "-i", f3.to_str().unwrap()]);
    assert_eq!(code, 1);
    let cxs = doc["counterexamples"].as_array().unwrap();
    assert!(cxs.iter().any(|c| c["states"] == serde_json::json!(["s2", "t3"])), "{cxs:?}");
}

#[test]
fn falsify_is_clean_and_reproducible() {
    let args = ["falsify", "--lemma", "all", "--seed", "7", "--iters", "200"];
    let (code, first, err) = run(&args);
    assert_eq!(code, 0, "{first}");
    assert!(first.contains("total discrepancies: 0"));
    assert!(err.contains("elapsed"));
    let (_, second, _) = run(&args);
    assert_eq!(first, second);
    let (code, _, _) = run(&["falsify", "--lemma", "OC-NOPE"]);
    assert_eq!(code, 2);
}

#[test]
fn machine_reports_are_byte_identical_across_runs() {
    let f3 = fixture_file("fig3");
    let args = ["--format", "machine", "witness", "COMB-OC-SUCC-BARB", "-i", f3.to_str().unwrap()];
    assert_eq!(run(&args), run(&args));
}
