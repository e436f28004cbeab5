//! JSON reduction traces and their replay.

use std::fmt;

use csq_core::calculus::{self, CalculusId, Term};
use csq_core::process;
use csq_core::trace::{Status, Trace};
use serde::{Deserialize, Serialize};

/// The schema every emitted trace validates against.
pub const SCHEMA: &str = include_str!("../schema/trace.schema.json");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceFile {
    pub calculus: String,
    pub initial: String,
    pub steps: Vec<StepRecord>,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepRecord {
    pub rule: String,
    pub path: Vec<usize>,
    pub result: String,
}

impl TraceFile {
    pub fn new<T: Clone>(calculus: CalculusId, trace: &Trace<T>, wrap: impl Fn(T) -> Term) -> Self {
        let text = |t: &T| wrap(t.clone()).render(false);
        TraceFile {
            calculus: calculus.as_str().into(),
            initial: text(&trace.initial),
            steps: trace
                .steps
                .iter()
                .map(|s| StepRecord { rule: s.rule.clone(), path: s.path.clone(), result: text(&s.result) })
                .collect(),
            status: trace.status,
        }
    }
}

#[derive(Debug, PartialEq, Eq)]
pub enum ReplayError {
    UnknownCalculus(String),
    BadInitial(String),
    /// Step `index` (from 0) does not apply, or gives another result.
    Diverges {
        index: usize,
        expected: String,
        got: Option<String>,
    },
}

impl fmt::Display for ReplayError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReplayError::UnknownCalculus(c) => write!(f, "unknown calculus `{c}`"),
            ReplayError::BadInitial(e) => write!(f, "initial term: {e}"),
            ReplayError::Diverges { index, expected, got: None } => {
                write!(f, "step {index}: no redex at the recorded path (expected `{expected}`)")
            }
            ReplayError::Diverges { index, expected, got: Some(got) } => {
                write!(f, "step {index}: got `{got}`, recorded `{expected}`")
            }
        }
    }
}

impl std::error::Error for ReplayError {}

/// Contracts the redex at `path`, by the rule the calculus uses.
pub fn contract(calculus: CalculusId, t: &Term, path: &[usize]) -> Option<Term> {
    match t {
        Term::Lambda(l) => l.contract_at(path, calculus.lambda_mode()?).map(Term::Lambda),
        Term::Comb(c) => calculus.combinatory()?.contract_at(c, path).map(|(_, r)| Term::Comb(r)),
        Term::Pi(p) => process::step_at(p, path, replay_budget(path)).map(Term::Pi),
        Term::Cpc(p) => process::step_at(p, path, replay_budget(path)).map(Term::Cpc),
    }
}

/// Process paths record which unfolding of a replicated thread took part.
fn replay_budget(path: &[usize]) -> usize {
    [path.get(1), path.get(4)].into_iter().flatten().copied().max().unwrap_or(0).max(1)
}

/// Re-runs every step from the initial term and compares the printed
/// results byte for byte.
pub fn replay(file: &TraceFile) -> Result<(), ReplayError> {
    let calc: CalculusId = file.calculus.parse().map_err(|_| ReplayError::UnknownCalculus(file.calculus.clone()))?;
    let mut cur = calculus::parse(calc, &file.initial).map_err(|e| ReplayError::BadInitial(e.to_string()))?;
    for (index, step) in file.steps.iter().enumerate() {
        let next = contract(calc, &cur, &step.path);
        let got = next.as_ref().map(|t| t.render(false));
        if got.as_deref() != Some(step.result.as_str()) {
            return Err(ReplayError::Diverges { index, expected: step.result.clone(), got });
        }
        cur = next.expect("compared equal above");
    }
    Ok(())
}
