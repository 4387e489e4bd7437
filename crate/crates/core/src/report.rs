use std::fmt;

use serde::Serialize;

/// Outcome of one checked claim.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub id: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(id: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            passed,
            detail: detail.into(),
        }
    }

    /// A check asserting `actual == expected`, with both in the detail.
    pub fn equal<T: PartialEq + fmt::Debug>(id: impl Into<String>, actual: T, expected: T) -> Self {
        let passed = actual == expected;
        Self::new(id, passed, format!("got {actual:?}, expected {expected:?}"))
    }
}

/// A named list of checks.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub subject: String,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(subject: impl Into<String>) -> Self {
        Self {
            subject: subject.into(),
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = Check>) {
        self.checks.extend(checks);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.subject)?;
        for c in &self.checks {
            writeln!(f, "  [{}] {}: {}", if c.passed { "pass" } else { "FAIL" }, c.id, c.detail)?;
        }
        Ok(())
    }
}
