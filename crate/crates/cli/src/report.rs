//! Run reports, rendered as line-oriented text or JSON.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use divring_core::report::{AuditReport, Check};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// Observations from an experiment that cannot settle its question.
    Evidence,
}

impl Verdict {
    fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Evidence => "evidence",
        }
    }
}

/// One audited property or one observation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Record {
    pub section: String,
    pub axiom: String,
    pub instance: String,
    pub verdict: Verdict,
    pub witness: Option<String>,
    pub witnesses: Vec<String>,
    pub note: Option<String>,
}

impl Record {
    pub fn new(section: impl Into<String>, axiom: impl Into<String>, instance: impl Into<String>, ok: bool) -> Self {
        Record {
            section: section.into(),
            axiom: axiom.into(),
            instance: instance.into(),
            verdict: if ok { Verdict::Pass } else { Verdict::Fail },
            witness: None,
            witnesses: Vec::new(),
            note: None,
        }
    }

    pub fn evidence(section: impl Into<String>, axiom: impl Into<String>, instance: impl Into<String>) -> Self {
        Record {
            verdict: Verdict::Evidence,
            ..Record::new(section, axiom, instance, true)
        }
    }

    pub fn with_witnesses(mut self, witnesses: Vec<String>) -> Self {
        self.witness = witnesses.first().cloned();
        self.witnesses = witnesses;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    fn from_check(section: &str, window: &str, c: &Check) -> Self {
        let rec = Record::new(
            section,
            c.name.clone(),
            format!("{} instances, {} failures, {window}", c.instances, c.failures),
            c.passed(),
        )
        .with_witnesses(c.witnesses.clone());
        match &c.note {
            Some(n) => rec.with_note(n.clone()),
            None => rec,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Term {
    pub coeff: String,
    pub element: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Violations,
    BudgetExhausted,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Violations => 1,
            Status::BudgetExhausted => 3,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Violations => "violations",
            Status::BudgetExhausted => "budget exhausted",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub command: String,
    pub config: BTreeMap<String, String>,
    pub status: Status,
    pub terms: Vec<Term>,
    pub lines: Vec<String>,
    pub results: Vec<Record>,
    pub notes: Vec<String>,
    /// Set when a budget or ceiling stopped the run before it finished.
    pub budget: Option<String>,
}

impl Report {
    pub fn new(command: &str, config: BTreeMap<String, String>) -> Self {
        Report {
            command: command.into(),
            config,
            status: Status::Pass,
            terms: Vec::new(),
            lines: Vec::new(),
            results: Vec::new(),
            notes: Vec::new(),
            budget: None,
        }
    }

    pub fn push(&mut self, r: Record) {
        self.results.push(r);
        self.refresh();
    }

    pub fn line(&mut self, l: impl Into<String>) {
        self.lines.push(l.into());
    }

    pub fn note(&mut self, n: impl Into<String>) {
        self.notes.push(n.into());
    }

    pub fn exhausted(&mut self, why: impl Into<String>) {
        self.budget = Some(why.into());
        self.refresh();
    }

    pub fn add_audit(&mut self, audit: &AuditReport) {
        for c in &audit.checks {
            self.results.push(Record::from_check(&audit.title, &audit.window, c));
        }
        self.notes.extend(audit.notes.iter().cloned());
        self.refresh();
    }

    fn refresh(&mut self) {
        self.status = if self.budget.is_some() {
            Status::BudgetExhausted
        } else if self.results.iter().any(|r| r.verdict == Verdict::Fail) {
            Status::Violations
        } else {
            Status::Pass
        };
    }

    pub fn failures(&self) -> impl Iterator<Item = &Record> {
        self.results.iter().filter(|r| r.verdict == Verdict::Fail)
    }

    pub fn record(&self, axiom: &str) -> Option<&Record> {
        self.results.iter().find(|r| r.axiom == axiom)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "divring {}", self.command);
        out.push_str("config:\n");
        for (k, v) in &self.config {
            let _ = writeln!(out, "  {k}={v}");
        }
        for t in &self.terms {
            let _ = writeln!(out, "{} * {}", t.coeff, t.element);
        }
        for l in &self.lines {
            let _ = writeln!(out, "{l}");
        }
        let mut section: Option<&str> = None;
        for r in &self.results {
            if section != Some(r.section.as_str()) {
                let _ = writeln!(out, "{}", r.section);
                section = Some(&r.section);
            }
            let _ = write!(out, "  {}: {} ({})", r.axiom, r.verdict.as_str(), r.instance);
            if let Some(n) = &r.note {
                let _ = write!(out, " [{n}]");
            }
            out.push('\n');
            for w in &r.witnesses {
                let _ = writeln!(out, "    witness: {w}");
            }
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        if let Some(b) = &self.budget {
            let _ = writeln!(out, "budget: {b}");
        }
        let _ = writeln!(out, "status: {}", self.status.as_str());
        out
    }
}
