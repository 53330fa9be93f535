//! Check reports with explicit counterexample witnesses.
//!
//! Every checker enumerates its quantifier instances in canonical order and
//! records the failing bindings, capped at [`MAX_WITNESSES`] per report but
//! always counting all violations. A report passes iff it carries no
//! witnesses, and every witness can be replayed against the structure it
//! came from.

use serde::Serialize;

use crate::acts::ActId;
use crate::space::Event;

/// Witness lists stay short; the violation count is still exact.
pub const MAX_WITNESSES: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessValue {
    Event(Event),
    Act(ActId),
    Consequence(u8),
    Label(String),
}

/// One binding of the quantified variables that violates a checked statement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub bindings: Vec<(String, WitnessValue)>,
    pub note: Option<String>,
}

impl Witness {
    pub fn new() -> Witness {
        Witness { bindings: Vec::new(), note: None }
    }

    pub fn event(mut self, name: &str, e: Event) -> Witness {
        self.bindings.push((name.to_string(), WitnessValue::Event(e)));
        self
    }

    pub fn act(mut self, name: &str, a: ActId) -> Witness {
        self.bindings.push((name.to_string(), WitnessValue::Act(a)));
        self
    }

    pub fn consequence(mut self, name: &str, c: u8) -> Witness {
        self.bindings.push((name.to_string(), WitnessValue::Consequence(c)));
        self
    }

    pub fn label(mut self, name: &str, text: &str) -> Witness {
        self.bindings.push((name.to_string(), WitnessValue::Label(text.to_string())));
        self
    }

    pub fn noted(mut self, text: impl Into<String>) -> Witness {
        self.note = Some(text.into());
        self
    }

    pub fn get_event(&self, name: &str) -> Option<Event> {
        self.bindings.iter().find_map(|(n, v)| match v {
            WitnessValue::Event(e) if n == name => Some(*e),
            _ => None,
        })
    }

    pub fn get_act(&self, name: &str) -> Option<ActId> {
        self.bindings.iter().find_map(|(n, v)| match v {
            WitnessValue::Act(a) if n == name => Some(*a),
            _ => None,
        })
    }

    pub fn get_consequence(&self, name: &str) -> Option<u8> {
        self.bindings.iter().find_map(|(n, v)| match v {
            WitnessValue::Consequence(c) if n == name => Some(*c),
            _ => None,
        })
    }

    pub fn get_label(&self, name: &str) -> Option<&str> {
        self.bindings.iter().find_map(|(n, v)| match v {
            WitnessValue::Label(t) if n == name => Some(t.as_str()),
            _ => None,
        })
    }
}

impl Default for Witness {
    fn default() -> Self {
        Self::new()
    }
}

/// Outcome of one exhaustive check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub subject: String,
    pub passed: bool,
    pub witnesses: Vec<Witness>,
    pub checked_count: u64,
    pub violation_count: u64,
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn render(&self) -> String {
        if self.passed {
            format!("{}: PASS ({} instances)", self.subject, self.checked_count)
        } else {
            format!(
                "{}: FAIL ({} violations of {} instances)",
                self.subject, self.violation_count, self.checked_count
            )
        }
    }
}

/// Accumulates instances for a report, keeping at most [`MAX_WITNESSES`]
/// witnesses while counting every violation.
pub(crate) struct ReportBuilder {
    subject: String,
    witnesses: Vec<Witness>,
    checked: u64,
    violations: u64,
    notes: Vec<String>,
}

impl ReportBuilder {
    pub fn new(subject: impl Into<String>) -> ReportBuilder {
        ReportBuilder {
            subject: subject.into(),
            witnesses: Vec::new(),
            checked: 0,
            violations: 0,
            notes: Vec::new(),
        }
    }

    /// Records one instance; `witness` is only materialized on failure.
    #[inline]
    pub fn instance(&mut self, holds: bool, witness: impl FnOnce() -> Witness) {
        self.checked += 1;
        if !holds {
            self.violations += 1;
            if self.witnesses.len() < MAX_WITNESSES {
                self.witnesses.push(witness());
            }
        }
    }

    /// Bumps the instance count without re-counting each binding.
    pub fn count_instances(&mut self, n: u64) {
        self.checked += n;
    }

    /// Records a violation whose instance was already counted in bulk.
    pub fn violation(&mut self, witness: impl FnOnce() -> Witness) {
        self.violations += 1;
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(witness());
        }
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn finish(self) -> CheckReport {
        CheckReport {
            subject: self.subject,
            passed: self.violations == 0,
            witnesses: self.witnesses,
            checked_count: self.checked,
            violation_count: self.violations,
            notes: self.notes,
        }
    }
}
