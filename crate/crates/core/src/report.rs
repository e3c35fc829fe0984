//! Law-check records shared by every checking suite.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawRecord {
    pub suite: String,
    pub law: String,
    pub passed: bool,
    /// Number of elementwise instances compared.
    pub checked: u64,
    pub witness: Option<String>,
}

impl LawRecord {
    pub fn pass(suite: impl Into<String>, law: impl Into<String>, checked: u64) -> Self {
        LawRecord { suite: suite.into(), law: law.into(), passed: true, checked, witness: None }
    }

    pub fn fail(suite: impl Into<String>, law: impl Into<String>, checked: u64, witness: impl Into<String>) -> Self {
        LawRecord { suite: suite.into(), law: law.into(), passed: false, checked, witness: Some(witness.into()) }
    }

    /// Attach an informational note to a passing record.
    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.witness = Some(note.into());
        self
    }

    pub fn from_outcome(suite: &str, law: &str, checked: u64, outcome: Result<(), String>) -> Self {
        match outcome {
            Ok(()) => LawRecord::pass(suite, law, checked),
            Err(w) => LawRecord::fail(suite, law, checked, w),
        }
    }
}

impl fmt::Display for LawRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} {}/{} ({} checked)", self.suite, self.law, self.checked)?;
        if let Some(w) = &self.witness {
            write!(f, ": {w}")?;
        }
        Ok(())
    }
}

/// An ordered collection of records.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub records: Vec<LawRecord>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn push(&mut self, record: LawRecord) {
        self.records.push(record);
    }

    pub fn extend(&mut self, records: impl IntoIterator<Item = LawRecord>) {
        self.records.extend(records);
    }

    pub fn all_passed(&self) -> bool {
        self.records.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &LawRecord> {
        self.records.iter().filter(|r| !r.passed)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&r.to_string());
            out.push('\n');
        }
        let failed = self.failures().count();
        out.push_str(&format!("{} records, {} failed\n", self.records.len(), failed));
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report records serialize")
    }
}
