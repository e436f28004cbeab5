//! Acceptance criteria 1–10, one line each. Exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use csq_core::encodings::{self, Mutation};
use csq_core::harness::concurrent::ADMIN_BOUND;
use csq_core::harness::{check_mutation, run_suite, CheckConfig, Suite, SuiteReport, Verdict};
use serde_json::Value;

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Line + 'a>);

struct Line {
    pass: bool,
    detail: String,
}

fn suites(id: &str, list: &[Suite], cfg: &CheckConfig) -> Vec<SuiteReport> {
    let enc = encodings::by_id(id).expect("registered encoding");
    list.iter().map(|&s| run_suite(enc, s, cfg).expect("applicable suite")).collect()
}

/// Passes if every suite passes; names the first that does not.
fn all_pass(reports: &[SuiteReport], min_checked: usize) -> Line {
    let bad = reports.iter().find(|r| r.verdict != Verdict::Pass || r.checked < min_checked);
    match bad {
        None => Line {
            pass: true,
            detail: reports
                .iter()
                .map(|r| format!("{} {} ({})", r.encoding, r.criterion, r.checked))
                .collect::<Vec<_>>()
                .join(", "),
        },
        Some(r) => Line { pass: false, detail: r.summary_line() },
    }
}

fn cli_json(args: &[&str]) -> (u8, Value) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["csq", "--json"];
    argv.extend_from_slice(args);
    let code = csq::run(argv, &mut out, &mut err);
    (code, serde_json::from_slice(&out).unwrap_or(Value::Null))
}

fn bracket_abstraction(cfg: &CheckConfig) -> Line {
    let start = Instant::now();
    let r = suites("lambda-sk", &[Suite::BracketAbstraction], cfg);
    let elapsed = start.elapsed();
    let mut line = all_pass(&r, 200);
    line.pass &= elapsed < Duration::from_secs(10);
    line.detail = format!("{} in {:.2}s", line.detail, elapsed.as_secs_f64());
    line
}

fn factorise() -> Line {
    let (code, v) = cli_json(&["demo", "factorise"]);
    let want = [("S", "n (S (F F)) S"), ("F", "n (S (F F)) F"), ("F F", "n (S (F F)) (F F)")];
    let cases = v["cases"].as_array().cloned().unwrap_or_default();
    let got: Vec<(String, String, bool)> = cases
        .iter()
        .map(|c| {
            (
                c["component"].as_str().unwrap_or("").to_string(),
                c["result"].as_str().unwrap_or("").to_string(),
                c["acts_as_identity"].as_bool().unwrap_or(false),
            )
        })
        .collect();
    let exact = got.len() == want.len() && got.iter().zip(want).all(|((x, r, id), (wx, wr))| x == wx && r == wr && *id);
    Line { pass: code == 0 && exact, detail: got.iter().map(|(x, r, _)| format!("X={x}: {r}")).collect::<Vec<_>>().join("; ") }
}

fn separation_witnesses() -> Line {
    let (c1, po) = cli_json(&["demo", "parallel-or"]);
    let (c2, sr) = cli_json(&["demo", "self-reducer"]);
    let barbs: Vec<(String, String, bool)> = po["cases"]
        .as_array()
        .cloned()
        .unwrap_or_default()
        .iter()
        .map(|c| {
            (
                c["left"].as_str().unwrap_or("").into(),
                c["right"].as_str().unwrap_or("").into(),
                c["m_barb"].as_bool().unwrap_or(true),
            )
        })
        .collect();
    let po_ok = barbs == vec![("⊥".into(), "⊥".into(), false), ("T".into(), "⊥".into(), true), ("⊥".into(), "T".into(), true)];
    let verdicts: Vec<String> = sr["verdicts"]
        .as_array()
        .cloned()
        .unwrap_or_default()
        .iter()
        .map(|v| v["verdict"].as_str().unwrap_or("").into())
        .collect();
    let sr_ok =
        verdicts.first().map(String::as_str) == Some("never succeeds") && verdicts.get(1).map(String::as_str) == Some("succeeds");
    Line {
        pass: c1 == 0 && c2 == 0 && po_ok && sr_ok,
        detail: format!(
            "m-barb {}; P: {}, P|P: {}",
            barbs.iter().map(|(l, r, b)| format!("({l},{r})={}", if *b { "yes" } else { "no" })).collect::<Vec<_>>().join(" "),
            verdicts.first().map_or("?", String::as_str),
            verdicts.get(1).map_or("?", String::as_str)
        ),
    }
}

fn mutations(cfg: &CheckConfig) -> Line {
    let mut missed = Vec::new();
    let mut caught = Vec::new();
    for m in Mutation::ALL {
        let r = check_mutation(m, cfg).expect("mutation suites run");
        if r.caught() {
            caught.push(format!("{} by {}", m.as_str(), r.caught_by.join("+")));
        } else {
            missed.push(m.as_str());
        }
    }
    if missed.is_empty() {
        Line { pass: true, detail: caught.join("; ") }
    } else {
        Line { pass: false, detail: format!("not caught: {}", missed.join(", ")) }
    }
}

fn main() -> ExitCode {
    let cfg = CheckConfig::default();
    use Suite::*;
    let criteria: Vec<Criterion> = vec![
        ("bracket abstraction", Box::new(|| bracket_abstraction(&cfg))),
        (
            "SK and λ simulate each other",
            Box::new(|| {
                let mut r = suites("lambda-sk", &[Simulation], &cfg);
                r.extend(suites("sk-lambda", &[Simulation], &cfg));
                all_pass(&r, 100)
            }),
        ),
        ("SF subsumes SK", Box::new(|| all_pass(&suites("sk-sf", &[Simulation], &cfg), 100))),
        ("factorisation exposes X", Box::new(factorise)),
        (
            "Milner's encoding",
            Box::new(|| all_pass(&suites("lambdav-pi", &[OperationalCorrespondence, Parallelisation], &cfg), 30)),
        ),
        (
            "SF into CPC",
            Box::new(|| {
                all_pass(
                    &suites("sf-cpc", &[Construction, OperationalCorrespondence, Parallelisation, MachineCoverage], &cfg),
                    30,
                )
            }),
        ),
        ("π into CPC", Box::new(|| all_pass(&suites("pi-cpc", &[Homomorphism, SuccessSensitiveness, RedexCount], &cfg), 20))),
        ("separation witnesses", Box::new(separation_witnesses)),
        (
            "divergence reflection",
            Box::new(|| {
                let mut r = suites("lambdav-pi", &[DivergenceReflection], &cfg);
                r.extend(suites("sf-cpc", &[DivergenceReflection], &cfg));
                let mut line = all_pass(&r, 30);
                line.detail = format!("{}; admin steps ≤ {} + {}·size", line.detail, ADMIN_BOUND.base, ADMIN_BOUND.per_node);
                line
            }),
        ),
        ("mutations caught", Box::new(|| mutations(&cfg))),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let line = run();
        failed += usize::from(!line.pass);
        println!(
            "criterion {:>2} {} {name} [{:.1}s]: {}",
            k + 1,
            if line.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            line.detail
        );
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
