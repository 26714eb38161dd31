//! Pass/fail bookkeeping shared by the audits.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// How many witnesses a check keeps.
pub const WITNESS_CAP: usize = 5;

/// One audited property: how many instances were examined and which failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub instances: usize,
    pub failures: usize,
    /// The first few failing instances, in enumeration order.
    pub witnesses: Vec<String>,
    /// Set when the check did not apply (its hypothesis never held, say).
    pub note: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            instances: 0,
            failures: 0,
            witnesses: Vec::new(),
            note: None,
        }
    }

    /// Counts one instance; `witness` is only evaluated on failure.
    pub fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.instances += 1;
        if !ok {
            self.failures += 1;
            if self.witnesses.len() < WITNESS_CAP {
                self.witnesses.push(witness());
            }
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn verdict(&self) -> &'static str {
        if self.passed() {
            "pass"
        } else {
            "fail"
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} ({} instances, {} failures)",
            self.name,
            self.verdict(),
            self.instances,
            self.failures
        )?;
        if let Some(n) = &self.note {
            write!(f, " [{n}]")?;
        }
        Ok(())
    }
}

/// A titled list of checks together with the search window they covered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditReport {
    pub title: String,
    pub window: String,
    pub checks: Vec<Check>,
    /// Conclusions drawn from the checks as a whole.
    pub notes: Vec<String>,
}

impl AuditReport {
    pub fn new(title: impl Into<String>, window: impl Into<String>) -> Self {
        AuditReport {
            title: title.into(),
            window: window.into(),
            checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} [window: {}]", self.title, self.window)?;
        for c in &self.checks {
            writeln!(f, "  {c}")?;
            for w in &c.witnesses {
                writeln!(f, "    witness: {w}")?;
            }
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        Ok(())
    }
}
