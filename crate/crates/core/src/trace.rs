//! Reduction traces shared by the interpreters.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// How a reduction run ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    NormalForm,
    Cutoff,
    /// A term repeated (up to α), so the run would never terminate.
    Cycle,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::NormalForm => "normal_form",
            Status::Cutoff => "cutoff",
            Status::Cycle => "cycle",
        })
    }
}

/// Which redex a deterministic run contracts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    /// Outermost first; among siblings, the function side first.
    #[default]
    Leftmost,
    /// Outermost first; among siblings, the argument side first.
    RightToLeft,
}

/// One contraction: the rule used, where it fired, and the whole result.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step<T> {
    pub rule: String,
    /// Child indices from the root to the redex.
    pub path: Vec<usize>,
    pub result: T,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace<T> {
    pub initial: T,
    pub steps: Vec<Step<T>>,
    pub status: Status,
}

impl<T> Trace<T> {
    pub fn last(&self) -> &T {
        self.steps.last().map_or(&self.initial, |s| &s.result)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}
