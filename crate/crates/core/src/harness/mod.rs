//! Executable encoding criteria: generators, the equivalence oracle,
//! the suites and their reports.

pub mod concurrent;
pub mod gen;
pub mod oracle;
pub mod report;
pub mod sequential;
pub mod suites;

pub use report::{Counterexample, CriteriaReport, SuiteReport, Verdict};
pub use suites::{check_mutation, run_all, run_suite, suites_for, CheckConfig, CheckError, MutationReport, Suite};
