//! Verdicts and reports of the criteria suites.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    /// Bounds were exhausted before an answer; never counted as a pass.
    InconclusiveBound,
    Fail,
}

impl Verdict {
    /// The worse of two verdicts.
    pub fn and(self, other: Verdict) -> Verdict {
        self.max(other)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::InconclusiveBound => "inconclusive_bound",
            Verdict::Fail => "fail",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A failing corpus entry. `term` is the source text the suite accepts
/// as a standalone corpus, so the failure can be replayed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub term: String,
    pub reason: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ReportBounds {
    /// Rounds of the bisimulation game.
    pub depth: usize,
    pub repl_budget: usize,
    pub max_states: usize,
    pub max_steps: usize,
}

/// The outcome of one suite on one encoding.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub criterion: String,
    pub encoding: String,
    pub verdict: Verdict,
    pub seed: u64,
    /// Corpus entries examined.
    pub checked: usize,
    /// Entries still inconclusive after any re-run.
    pub inconclusive: usize,
    pub counterexample: Option<Counterexample>,
    pub bounds: ReportBounds,
    pub notes: Vec<String>,
}

impl SuiteReport {
    pub fn summary_line(&self) -> String {
        let mut line =
            format!("{:<8} {} {} ({} checked", self.verdict.as_str().to_uppercase(), self.encoding, self.criterion, self.checked);
        if self.inconclusive > 0 {
            line.push_str(&format!(", {} inconclusive", self.inconclusive));
        }
        line.push(')');
        if let Some(cx) = &self.counterexample {
            line.push_str(&format!(": {} -- {}", cx.term, cx.reason));
        }
        line
    }
}

/// All suites run for one encoding.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriteriaReport {
    pub encoding: String,
    pub mutation: Option<String>,
    pub seed: u64,
    pub verdict: Verdict,
    pub suites: Vec<SuiteReport>,
}

impl CriteriaReport {
    pub fn new(encoding: &str, mutation: Option<String>, seed: u64, suites: Vec<SuiteReport>) -> Self {
        let verdict = suites.iter().fold(Verdict::Pass, |v, s| v.and(s.verdict));
        Self { encoding: encoding.into(), mutation, seed, verdict, suites }
    }

    pub fn first_failure(&self) -> Option<&SuiteReport> {
        self.suites.iter().find(|s| s.verdict == Verdict::Fail)
    }

    /// One line per suite.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for s in &self.suites {
            out.push_str(&s.summary_line());
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worst_verdict_wins() {
        assert_eq!(Verdict::Pass.and(Verdict::InconclusiveBound), Verdict::InconclusiveBound);
        assert_eq!(Verdict::Fail.and(Verdict::Pass), Verdict::Fail);
    }
}
