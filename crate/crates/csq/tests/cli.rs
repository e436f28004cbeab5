use std::process::Command;

use csq::tracefile::{replay, ReplayError, TraceFile, SCHEMA};
use csq::{EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_PASS, EXIT_USAGE};
use serde_json::Value;

fn csq(args: &[&str]) -> (u8, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = csq::run(std::iter::once("csq").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn schema() -> jsonschema::Validator {
    jsonschema::validator_for(&serde_json::from_str(SCHEMA).unwrap()).unwrap()
}

#[test]
fn parse_prints_canonical_form() {
    assert_eq!(csq(&["parse", "--calculus", "sf", "F F m n"]), (EXIT_PASS, "F F m n\n".into(), String::new()));
    assert_eq!(csq(&["parse", "--calculus", "lambda", "\\x.x y"]).1, "lam x. x y\n");
}

#[test]
fn parse_error_is_a_usage_error() {
    let (code, _, err) = csq(&["parse", "--calculus", "pi", "a(b.0"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("column 4"), "{err}");
}

#[test]
fn unknown_calculus_and_missing_args_are_usage_errors() {
    assert_eq!(csq(&["parse", "--calculus", "nope", "x"]).0, EXIT_USAGE);
    assert_eq!(csq(&["reduce", "S K K x"]).0, EXIT_USAGE);
    assert_eq!(csq(&["check", "nope"]).0, EXIT_USAGE);
    assert_eq!(csq(&["demo", "nope"]).0, EXIT_USAGE);
    assert_eq!(csq(&["--help"]).0, EXIT_PASS);
}

#[test]
fn reduce_to_normal_form() {
    let (code, out, _) = csq(&["reduce", "--calculus", "sk", "S K K x"]);
    assert_eq!(code, EXIT_PASS);
    assert_eq!(out, "x\n2 steps (normal_form)\n");
    assert!(csq(&["reduce", "--calculus", "sf", "F F m n"]).1.starts_with("m\n"));
}

#[test]
fn cutoff_is_inconclusive() {
    let (code, out, _) = csq(&["reduce", "--calculus", "ski", "--max-steps", "5", "S I I (S I I)"]);
    assert_eq!(code, EXIT_INCONCLUSIVE, "{out}");
    assert!(out.contains("cutoff"));
}

#[test]
fn translations() {
    assert_eq!(csq(&["translate", "--from", "sk", "--to", "sf", "K"]).1, "F F\n");
    assert!(csq(&["translate", "--from", "sf", "--to", "cpc", "S"]).1.starts_with("c*S | "));
    assert_eq!(csq(&["translate", "--from", "cpc", "--to", "pi", "ok"]).0, EXIT_USAGE);
}

#[test]
fn json_traces_validate_against_the_schema() {
    let v = schema();
    for (calc, term) in [
        ("lambda", "(\\x. x x) (\\y. y) z"),
        ("lambda-v", "(\\x. x) (\\y. y)"),
        ("sk", "S K K x"),
        ("ski", "S I I x"),
        ("sf", "F (F F) m n"),
        ("pi", "a<b>.0 | a(x).x<x>.0 | x(y).ok"),
        ("cpc", "\\x * a -> x * b | c * a -> ok | b -> 0"),
    ] {
        let (code, out, err) = csq(&["--json", "reduce", "--calculus", calc, term]);
        assert!(code == EXIT_PASS || code == EXIT_INCONCLUSIVE, "{calc}: {err}");
        let json: Value = serde_json::from_str(&out).unwrap();
        let errors: Vec<String> = v.iter_errors(&json).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{calc}: {errors:?}");
        let file: TraceFile = serde_json::from_value(json).unwrap();
        assert!(!file.steps.is_empty(), "{calc} {term} should step");
        assert_eq!(replay(&file), Ok(()), "{calc}");
    }
}

#[test]
fn schema_rejects_malformed_traces() {
    let v = schema();
    let bad = serde_json::json!({ "calculus": "sk", "initial": "x", "steps": [{ "rule": "", "path": [-1], "result": "x" }], "status": "done" });
    assert!(!v.is_valid(&bad));
}

#[test]
fn tampered_trace_fails_replay() {
    let (_, out, _) = csq(&["--json", "reduce", "--calculus", "sk", "S K K x"]);
    let mut file: TraceFile = serde_json::from_str(&out).unwrap();
    file.steps[1].result = "y".into();
    assert!(matches!(replay(&file), Err(ReplayError::Diverges { index: 1, .. })));
    let mut file: TraceFile = serde_json::from_str(&out).unwrap();
    file.steps[0].path = vec![0, 0];
    assert!(matches!(replay(&file), Err(ReplayError::Diverges { index: 0, got: None, .. })));
}

#[test]
fn replay_flag_reads_a_file() {
    let dir = std::env::temp_dir().join(format!("csq-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("trace.json");
    let (_, out, _) = csq(&["--json", "reduce", "--calculus", "sf", "F (F F) m n"]);
    std::fs::write(&path, &out).unwrap();
    let (code, text, _) = csq(&["reduce", "--replay", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_PASS, "{text}");
    std::fs::write(&path, out.replace("\"n F F\"", "\"n F\"")).unwrap();
    assert_eq!(csq(&["reduce", "--replay", path.to_str().unwrap()]).0, EXIT_FAIL);
    std::fs::write(&path, "{}").unwrap();
    assert_eq!(csq(&["reduce", "--replay", path.to_str().unwrap()]).0, EXIT_USAGE);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn check_passes_and_reports_seed() {
    let (code, out, _) = csq(&["--json", "check", "sk-sf", "--suite", "simulation", "--seed", "7"]);
    assert_eq!(code, EXIT_PASS);
    let report: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(report["seed"], 7);
    assert_eq!(report["verdict"], "pass");
}

#[test]
fn seed_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_csq"))
        .args(["check", "sk-sf", "--suite", "simulation"])
        .env("CSQ_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("(seed 42)"));
}

#[test]
fn mutation_is_caught_with_exit_one() {
    let (code, out, _) = csq(&[
        "--json",
        "check",
        "pi-cpc",
        "--mutation",
        "pi-drop-fresh-name",
        "--suite",
        "compositionality",
        "--term",
        "a<b>.0 | a(x).ok",
    ]);
    assert_eq!(code, EXIT_FAIL);
    let report: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(report["verdict"], "fail");
    assert!(report["suites"][0]["counterexample"].is_object());
}

#[test]
fn alternative_sf_translation_fails_correspondence_honestly() {
    let (code, out, _) = csq(&["check", "sf-cpc-alt", "--suite", "operational-correspondence", "--term", "S F (F S F F)"]);
    assert_eq!(code, EXIT_FAIL, "{out}");
    assert!(out.contains("S F (F S F F)"), "{out}");
}

#[test]
fn demos_succeed() {
    for name in csq::demos::NAMES {
        let (code, out, _) = csq(&["demo", name]);
        assert_eq!(code, EXIT_PASS, "{name}: {out}");
    }
    assert!(csq(&["demo", "self-reducer"]).1.contains("P alone never succeeds, P | P does"));
}
