//! Randomized verification sweeps and gap probes.
//!
//! A verification suite compares a construction against the definitional
//! oracle and fails on any mismatch. A probe searches for inputs on which a
//! construction, taken as published, departs from the definitions; what it
//! finds is reported and never counts as a failure.

use std::fmt;

use serde::Serialize;

pub mod probe;
pub mod verify;

pub use probe::{run_probe, ProbeOutcome, ProbeReport, Verdict, PROBES};
pub use verify::{run_suite, SweepConfig, VerifyReport, SUITES};

/// One disagreement between an automaton and its oracle.
#[derive(Clone, Debug, Serialize)]
pub struct Mismatch {
    pub trial: usize,
    pub word: String,
    pub expected: String,
    pub actual: String,
    /// Text of the inputs, enough to replay the case.
    pub instance: String,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "  trial {} word {}: expected {} got {}",
            self.trial, self.word, self.expected, self.actual
        )?;
        for line in self.instance.lines() {
            writeln!(f, "    | {line}")?;
        }
        Ok(())
    }
}
