//! Criteria suites: which checks apply to which encoding, their default
//! corpora, and the bookkeeping shared by all of them.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::calculus::{self, CalculusId, Term};
use crate::encodings::{Encoding, Mutation};
use crate::harness::concurrent;
use crate::harness::gen::DEFAULT_SEED;
use crate::harness::oracle::{EquivalenceOracle, OracleMode};
use crate::harness::report::{Counterexample, CriteriaReport, ReportBounds, SuiteReport, Verdict};
use crate::harness::sequential;
use crate::process::ProcessBounds;

/// One executable criterion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    /// `(λ*x.M) N` and `M{N/x}` share a reduct.
    BracketAbstraction,
    /// Each source step is matched by target reductions (joinability for
    /// the sequential encodings, a nonempty reduction for SK into SF).
    Simulation,
    /// Application (or `|`) is translated to itself.
    Homomorphism,
    /// Every subterm's translation sits where its context puts it.
    Compositionality,
    /// Application becomes `ν n₁ ν n₂ (ap | ⟦M⟧_n₁ | ⟦N⟧_n₂)` with the
    /// fixed `ap`.
    Parallelisation,
    /// Renaming free names commutes with the translation.
    NameInvariance,
    /// Forward: every source step is reached up to the oracle. Reverse:
    /// every target state can still reach some source reduct's class.
    OperationalCorrespondence,
    /// Terminating sources have finite acyclic targets, with a bounded
    /// number of administrative steps.
    DivergenceReflection,
    SuccessSensitiveness,
    /// Source and target states offer the same number of interactions.
    RedexCount,
    /// `⟦M⟧_c` reaches `c•⌈M⌉ | R`.
    Construction,
    /// Every machine case takes part in some interaction of the corpus.
    MachineCoverage,
}

impl Suite {
    pub const ALL: [Suite; 12] = [
        Suite::BracketAbstraction,
        Suite::Simulation,
        Suite::Homomorphism,
        Suite::Compositionality,
        Suite::Parallelisation,
        Suite::NameInvariance,
        Suite::OperationalCorrespondence,
        Suite::DivergenceReflection,
        Suite::SuccessSensitiveness,
        Suite::RedexCount,
        Suite::Construction,
        Suite::MachineCoverage,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::BracketAbstraction => "bracket-abstraction",
            Suite::Simulation => "simulation",
            Suite::Homomorphism => "homomorphism",
            Suite::Compositionality => "compositionality",
            Suite::Parallelisation => "parallelisation",
            Suite::NameInvariance => "name-invariance",
            Suite::OperationalCorrespondence => "operational-correspondence",
            Suite::DivergenceReflection => "divergence-reflection",
            Suite::SuccessSensitiveness => "success-sensitiveness",
            Suite::RedexCount => "redex-count",
            Suite::Construction => "construction",
            Suite::MachineCoverage => "machine-coverage",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ALL.into_iter().find(|x| x.as_str() == s).ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

/// The suites that apply to an encoding, in reporting order.
pub fn suites_for(enc: &Encoding) -> &'static [Suite] {
    use Suite::*;
    match enc.id {
        "lambda-sk" => &[BracketAbstraction, Simulation, Homomorphism, Compositionality, NameInvariance],
        "sk-lambda" => &[Simulation, Homomorphism, Compositionality, NameInvariance],
        "sk-sf" => &[Simulation, Homomorphism, Compositionality, NameInvariance],
        "lambdav-pi" => &[Parallelisation, OperationalCorrespondence, DivergenceReflection, NameInvariance],
        "sf-cpc" => {
            &[Parallelisation, Construction, OperationalCorrespondence, DivergenceReflection, MachineCoverage, NameInvariance]
        }
        "sk-cpc" => &[Parallelisation, Construction, OperationalCorrespondence, DivergenceReflection, NameInvariance],
        "sf-cpc-alt" => &[Construction, OperationalCorrespondence],
        "pi-cpc" => &[
            Homomorphism,
            Compositionality,
            NameInvariance,
            OperationalCorrespondence,
            RedexCount,
            SuccessSensitiveness,
            DivergenceReflection,
        ],
        _ => &[],
    }
}

/// Settings shared by every suite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckConfig {
    pub seed: u64,
    /// Rounds of the bounded bisimulation game.
    pub depth: usize,
    pub repl_budget: usize,
    /// State cap of every exploration.
    pub max_states: usize,
    /// Step cap of reductions, and depth cap of explorations.
    pub max_steps: usize,
    pub mode: OracleMode,
    pub mutation: Option<Mutation>,
    /// Replaces the generated corpus with these source texts.
    pub terms: Option<Vec<String>>,
    /// Corpus size override for generated corpora.
    pub corpus_size: Option<usize>,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            depth: 6,
            repl_budget: 2,
            max_states: 20_000,
            max_steps: 300,
            mode: OracleMode::BoundedWeakBarbedBisim,
            mutation: None,
            terms: None,
            corpus_size: None,
        }
    }
}

impl CheckConfig {
    pub fn report_bounds(&self) -> ReportBounds {
        ReportBounds { depth: self.depth, repl_budget: self.repl_budget, max_states: self.max_states, max_steps: self.max_steps }
    }

    /// The bounds a re-run of inconclusive entries uses.
    pub fn escalated(&self) -> CheckConfig {
        CheckConfig { depth: self.depth.max(10), max_states: self.max_states * 4, ..self.clone() }
    }

    pub fn process_bounds(&self) -> ProcessBounds {
        ProcessBounds { depth: self.max_steps, max_states: self.max_states, repl_budget: self.repl_budget }
    }

    pub fn oracle(&self) -> EquivalenceOracle {
        EquivalenceOracle { depth: self.depth, repl_budget: self.repl_budget, mode: self.mode, max_states: 4_000 }
    }

    /// The mutation, if it targets `enc`.
    pub fn mutation_for(&self, enc: &Encoding) -> Option<Mutation> {
        self.mutation.filter(|m| m.encoding().id == enc.id)
    }

    pub fn size_or(&self, n: usize) -> usize {
        self.corpus_size.unwrap_or(n)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CheckError {
    #[error("suite {suite} does not apply to {encoding}")]
    NotApplicable { suite: Suite, encoding: &'static str },
    #[error("corpus term `{term}`: {message}")]
    BadTerm { term: String, message: String },
}

/// The result of checking one corpus entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail(String),
    Inconclusive,
}

/// Checks every entry, re-running inconclusive ones at escalated bounds
/// when `rerun` holds. With re-runs, the suite is inconclusive if a tenth
/// or more of the entries needed one, or if any stays inconclusive.
pub(crate) fn tally<I>(
    name: Suite,
    enc: &Encoding,
    cfg: &CheckConfig,
    items: &[I],
    text: impl Fn(&I) -> String,
    check: impl Fn(&I, &CheckConfig) -> Outcome,
    rerun: bool,
) -> SuiteReport {
    let mut first_fail = None;
    let mut inconclusive = Vec::new();
    for (k, item) in items.iter().enumerate() {
        match check(item, cfg) {
            Outcome::Pass => {}
            Outcome::Fail(reason) => {
                first_fail.get_or_insert(Counterexample { term: text(item), reason });
            }
            Outcome::Inconclusive => inconclusive.push(k),
        }
    }
    let mut notes = Vec::new();
    let mut remaining = inconclusive.clone();
    if rerun && !inconclusive.is_empty() && first_fail.is_none() {
        let high = cfg.escalated();
        notes.push(format!(
            "{} of {} entries inconclusive; re-run at depth {}, {} states",
            inconclusive.len(),
            items.len(),
            high.depth,
            high.max_states
        ));
        remaining.clear();
        for &k in &inconclusive {
            match check(&items[k], &high) {
                Outcome::Pass => {}
                Outcome::Fail(reason) => {
                    first_fail.get_or_insert(Counterexample { term: text(&items[k]), reason });
                }
                Outcome::Inconclusive => remaining.push(k),
            }
        }
    }
    if !remaining.is_empty() {
        let shown: Vec<String> = remaining.iter().take(3).map(|&k| format!("`{}`", text(&items[k]))).collect();
        notes.push(format!("still inconclusive: {}{}", shown.join(", "), if remaining.len() > 3 { ", ..." } else { "" }));
    }
    let verdict = if first_fail.is_some() {
        Verdict::Fail
    } else if !remaining.is_empty() || (rerun && inconclusive.len() * 10 >= items.len().max(1) && !inconclusive.is_empty()) {
        Verdict::InconclusiveBound
    } else {
        Verdict::Pass
    };
    SuiteReport {
        criterion: name.as_str().into(),
        encoding: enc.id.into(),
        verdict,
        seed: cfg.seed,
        checked: items.len(),
        inconclusive: remaining.len(),
        counterexample: first_fail,
        bounds: cfg.report_bounds(),
        notes,
    }
}

/// Parses replay texts in the given calculus.
pub(crate) fn parse_terms(calculus: CalculusId, texts: &[String]) -> Result<Vec<Term>, CheckError> {
    texts
        .iter()
        .map(|t| calculus::parse(calculus, t).map_err(|e| CheckError::BadTerm { term: t.clone(), message: e.to_string() }))
        .collect()
}

/// Lines of a fixture file, without comments and blank lines.
pub(crate) fn fixture_lines(src: &str) -> impl Iterator<Item = &str> {
    src.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'))
}

pub fn run_suite(enc: &'static Encoding, suite: Suite, cfg: &CheckConfig) -> Result<SuiteReport, CheckError> {
    if !suites_for(enc).contains(&suite) {
        return Err(CheckError::NotApplicable { suite, encoding: enc.id });
    }
    match enc.id {
        "lambda-sk" | "sk-lambda" | "sk-sf" => sequential::run(enc, suite, cfg),
        _ => concurrent::run(enc, suite, cfg),
    }
}

/// Runs every applicable suite.
pub fn run_all(enc: &'static Encoding, cfg: &CheckConfig) -> Result<CriteriaReport, CheckError> {
    let suites = suites_for(enc).iter().map(|&s| run_suite(enc, s, cfg)).collect::<Result<Vec<_>, _>>()?;
    Ok(CriteriaReport::new(enc.id, cfg.mutation_for(enc).map(|m| m.as_str().into()), cfg.seed, suites))
}

/// The outcome of running an encoding's suites with a mutation applied.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct MutationReport {
    pub mutation: String,
    pub encoding: String,
    /// Every suite that failed, in suite order.
    pub caught_by: Vec<String>,
    /// The first failing suite's counterexample.
    pub counterexample: Option<Counterexample>,
    /// Re-running that suite on the counterexample alone fails again.
    pub replay_fails: bool,
}

impl MutationReport {
    pub fn caught(&self) -> bool {
        !self.caught_by.is_empty() && self.replay_fails
    }
}

/// Runs every suite of the mutated encoding, then replays the first
/// counterexample on its own.
pub fn check_mutation(m: Mutation, cfg: &CheckConfig) -> Result<MutationReport, CheckError> {
    let enc = m.encoding();
    let cfg = CheckConfig { mutation: Some(m), ..cfg.clone() };
    let mut report = MutationReport {
        mutation: m.as_str().into(),
        encoding: enc.id.into(),
        caught_by: Vec::new(),
        counterexample: None,
        replay_fails: false,
    };
    for &suite in suites_for(enc) {
        let r = run_suite(enc, suite, &cfg)?;
        let (Verdict::Fail, Some(cx)) = (r.verdict, r.counterexample) else { continue };
        report.caught_by.push(suite.as_str().into());
        if report.counterexample.is_none() {
            let replay = CheckConfig { terms: Some(alloc::vec![cx.term.clone()]), ..cfg.clone() };
            report.replay_fails = run_suite(enc, suite, &replay)?.verdict == Verdict::Fail;
            report.counterexample = Some(cx);
        }
    }
    Ok(report)
}
