//! The separation and intensionality demos.

use std::fmt::Write as _;

use csq_core::calculus::Term;
use csq_core::comb::{self, CombTerm};
use csq_core::cpc::{self, CpcProcess, Pattern};
use csq_core::encodings;
use csq_core::harness::concurrent::{fired_machine_cases, SF_CASES};
use csq_core::harness::CheckConfig;
use csq_core::name::Name;
use csq_core::process::{explore_process, par_all, ProcessBounds, Success};
use serde_json::{json, Value};

pub const NAMES: [&str; 4] = ["parallel-or", "self-reducer", "factorise", "sf-machine"];

pub struct DemoReport {
    pub text: String,
    pub json: Value,
    /// The demo showed what it is meant to show.
    pub ok: bool,
}

pub fn run(name: &str, bounds: ProcessBounds, unicode: bool) -> Option<DemoReport> {
    Some(match name {
        "parallel-or" => parallel_or(bounds, unicode),
        "self-reducer" => self_reducer(bounds, unicode),
        "factorise" => factorise(),
        "sf-machine" => sf_machine(bounds, unicode),
        _ => return None,
    })
}

fn verdict(s: Success) -> &'static str {
    match s {
        Success::Reached => "succeeds",
        Success::Never => "never succeeds",
        Success::NotWithinBounds => "not_within_bounds",
    }
}

fn parallel_or(bounds: ProcessBounds, unicode: bool) -> DemoReport {
    let cases = encodings::parallel_or_demo(bounds);
    let arg = |t: bool| if t { "T" } else { "⊥" };
    let mut text = String::from("G = n1(x).m<x>.0 | n2(x).m<x>.0, against each pair of arguments\n");
    writeln!(text, "{:<4} {:<4} {:<8} process", "n1", "n2", "m-barb").unwrap();
    let mut ok = true;
    let mut rows = Vec::new();
    for c in &cases {
        let expected = c.left_true || c.right_true;
        ok &= c.complete && c.m_barb == expected;
        let shown = Term::Pi(c.process.clone()).render(unicode);
        writeln!(text, "{:<4} {:<4} {:<8} {shown}", arg(c.left_true), arg(c.right_true), if c.m_barb { "yes" } else { "no" })
            .unwrap();
        rows.push(json!({
            "left": arg(c.left_true),
            "right": arg(c.right_true),
            "process": Term::Pi(c.process.clone()).render(false),
            "m_barb": c.m_barb,
            "complete": c.complete,
        }));
    }
    DemoReport { text, json: json!({ "demo": "parallel-or", "ok": ok, "cases": rows }), ok }
}

fn self_reducer(bounds: ProcessBounds, unicode: bool) -> DemoReport {
    let r = encodings::self_reducer_demo(bounds);
    let show = |p: &CpcProcess| Term::Cpc(p.clone()).render(unicode);
    let mut text = format!("P = {}\n", show(&r.process));
    let mut rows = Vec::new();
    for (q, v) in &r.verdicts {
        writeln!(text, "{:<28} {}", show(q), verdict(*v)).unwrap();
        rows.push(json!({ "process": Term::Cpc(q.clone()).render(false), "verdict": verdict(*v) }));
    }
    let ok = r.verdicts.first().map(|v| v.1) == Some(Success::Never) && r.verdicts.get(1).map(|v| v.1) == Some(Success::Reached);
    if ok {
        text.push_str("P alone never succeeds, P | P does\n");
    }
    DemoReport { text, json: json!({ "demo": "self-reducer", "ok": ok, "verdicts": rows }), ok }
}

fn factorise() -> DemoReport {
    let components: Vec<CombTerm> = ["S", "F", "F F"].iter().map(|s| comb::parse(s).expect("literal")).collect();
    let report = comb::factorise_demo(&components).expect("normal SF components");
    let mut text = String::new();
    let mut cases = Vec::new();
    let mut ok = report.distinguished;
    for c in &report.cases {
        let last = c.trace.last();
        let exposed = matches!(last.spine(), (_, args) if args.last() == Some(&&c.component));
        ok &= c.acts_as_identity && exposed;
        writeln!(text, "X = {}", c.component).unwrap();
        writeln!(text, "  {} z ->* z: {}", c.identity, if c.acts_as_identity { "yes" } else { "no" }).unwrap();
        writeln!(text, "  {}", c.trace.initial).unwrap();
        for s in &c.trace.steps {
            writeln!(text, "    -> {}   [{}]", s.result, s.rule).unwrap();
        }
        cases.push(json!({
            "component": c.component.to_string(),
            "identity": c.identity.to_string(),
            "acts_as_identity": c.acts_as_identity,
            "initial": c.trace.initial.to_string(),
            "result": last.to_string(),
            "steps": c.trace.steps.len(),
        }));
    }
    writeln!(
        text,
        "{}",
        if report.distinguished {
            "all three are identities, yet factorisation exposes a different X in each"
        } else {
            "the identities were not told apart"
        }
    )
    .unwrap();
    DemoReport { text, json: json!({ "demo": "factorise", "ok": ok, "cases": cases }), ok }
}

fn sf_machine(bounds: ProcessBounds, unicode: bool) -> DemoReport {
    let cases = cpc::sf_machine_cases();
    let enc = encodings::by_id("sf-cpc").expect("sf-cpc is registered");
    let cfg = CheckConfig { repl_budget: bounds.repl_budget, max_states: bounds.max_states, ..CheckConfig::default() };
    let mut text = String::from("R, the SF-reducing machine:\n");
    let mut rows = Vec::new();
    let mut ok = true;
    let witnesses: Vec<&str> = SF_CASES.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).collect();
    for (k, case) in cases.iter().enumerate() {
        let witness = witnesses.get(k).copied().unwrap_or("");
        let fired = comb::parse(witness).ok().is_some_and(|t| fired_machine_cases(enc, &t, &cfg).0.contains(&k));
        ok &= fired;
        writeln!(text, "{:>3}. {}", k + 1, Term::Cpc(case.clone()).render(unicode)).unwrap();
        writeln!(text, "     fires on [[{witness}]]_c: {}", if fired { "yes" } else { "no" }).unwrap();
        rows.push(json!({ "case": k + 1, "process": Term::Cpc(case.clone()).render(false), "witness": witness, "fires": fired }));
    }
    // [[F F S F]]_c runs to the construction of S
    let c = Name::user("c");
    let m = comb::parse("F F S F").expect("literal");
    let g = explore_process(&encodings::sf_to_cpc(&m, &c), bounds, &|p: CpcProcess| cpc::collapse_machine(&p));
    let want = cpc::collapse_machine(&CpcProcess::new_par(
        CpcProcess::emit(Pattern::compound(Pattern::Var(c.clone()), cpc::sf_construction(&comb::parse("S").expect("literal")))),
        par_all(cases.iter().cloned()),
    ));
    let reached = g.contains(&want);
    ok &= reached;
    writeln!(
        text,
        "[[F F S F]]_c =>* {}: {}",
        Term::Cpc(want.clone()).render(unicode),
        if reached { "reached" } else { "not reached" }
    )
    .unwrap();
    DemoReport { text, json: json!({ "demo": "sf-machine", "ok": ok, "cases": rows, "ffsf_reaches_s": reached }), ok }
}
