//! Machine and human report rendering. The JSON report is the source of
//! truth: field order is fixed by the structs and all maps are sorted, so
//! identical inputs produce byte-identical output.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use gqp::{
    CheckReport, ConditionalPreferenceStructure, Event, EventRelation, FamilyFlags, StateSpace,
    Witness, WitnessValue,
};

/// Rendering context: witnesses from preference checks need the act set,
/// witnesses from relation checks only the state names.
pub enum Ctx<'a> {
    Structure(&'a ConditionalPreferenceStructure),
    Relation(&'a StateSpace),
}

impl<'a> Ctx<'a> {
    fn space(&self) -> &StateSpace {
        match self {
            Ctx::Structure(p) => p.space(),
            Ctx::Relation(s) => s,
        }
    }

    fn event_names(&self, e: Event) -> Vec<String> {
        e.states()
            .filter(|&s| s < self.space().len())
            .map(|s| self.space().name(s).to_string())
            .collect()
    }

    fn act_map(&self, id: gqp::ActId) -> BTreeMap<String, String> {
        match self {
            Ctx::Structure(p) => {
                let act = p.acts().get(id);
                (0..p.space().len())
                    .map(|s| {
                        (
                            p.space().name(s).to_string(),
                            p.scale().name(act.value_at(s)).to_string(),
                        )
                    })
                    .collect()
            }
            Ctx::Relation(_) => BTreeMap::new(),
        }
    }

    fn consequence_name(&self, c: u8) -> String {
        match self {
            Ctx::Structure(p) => p.scale().name(c).to_string(),
            Ctx::Relation(_) => format!("#{c}"),
        }
    }
}

#[derive(Serialize)]
pub struct JsonBinding {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub event: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub act: Option<BTreeMap<String, String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub consequence: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Serialize)]
pub struct JsonWitness {
    pub bindings: Vec<JsonBinding>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Serialize)]
pub struct JsonReport {
    pub subject: String,
    pub passed: bool,
    pub checked: u64,
    pub violations: u64,
    pub witnesses: Vec<JsonWitness>,
    pub notes: Vec<String>,
}

pub fn json_witness(w: &Witness, ctx: &Ctx) -> JsonWitness {
    let bindings = w
        .bindings
        .iter()
        .map(|(name, value)| {
            let mut b = JsonBinding {
                name: name.clone(),
                event: None,
                act: None,
                consequence: None,
                label: None,
            };
            match value {
                WitnessValue::Event(e) => b.event = Some(ctx.event_names(*e)),
                WitnessValue::Act(a) => b.act = Some(ctx.act_map(*a)),
                WitnessValue::Consequence(c) => b.consequence = Some(ctx.consequence_name(*c)),
                WitnessValue::Label(t) => b.label = Some(t.clone()),
            }
            b
        })
        .collect();
    JsonWitness { bindings, note: w.note.clone() }
}

pub fn json_report(r: &CheckReport, ctx: &Ctx) -> JsonReport {
    JsonReport {
        subject: r.subject.clone(),
        passed: r.passed,
        checked: r.checked_count,
        violations: r.violation_count,
        witnesses: r.witnesses.iter().map(|w| json_witness(w, ctx)).collect(),
        notes: r.notes.clone(),
    }
}

#[derive(Serialize)]
pub struct JsonFamilies {
    pub total: bool,
    pub standard: bool,
    pub purely_nonstandard: bool,
    pub complement_criterion: bool,
    pub criterion_agrees: bool,
}

impl From<FamilyFlags> for JsonFamilies {
    fn from(f: FamilyFlags) -> Self {
        JsonFamilies {
            total: f.total,
            standard: f.standard,
            purely_nonstandard: f.purely_nonstandard,
            complement_criterion: f.complement_criterion,
            criterion_agrees: f.criterion_agrees,
        }
    }
}

#[derive(Serialize)]
pub struct JsonSearch {
    pub states: usize,
    pub consequences: usize,
    pub mode: String,
    pub examined: u64,
    pub satisfying: u64,
    pub exhausted: bool,
    pub witness_found: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<JsonSearchWitness>,
}

/// An act rendered as a state-to-consequence map.
pub type NamedAct = BTreeMap<String, String>;
/// One relation entry: conditioning event plus the related act pair.
pub type NamedPreference = (Vec<String>, NamedAct, NamedAct);
/// An event pair rendered through state names.
pub type NamedEventPair = (Vec<String>, Vec<String>);

#[derive(Serialize)]
pub struct JsonSearchWitness {
    pub event: Vec<String>,
    pub f: NamedAct,
    pub g: NamedAct,
    pub relation: Vec<NamedPreference>,
}

/// The single machine report emitted per invocation.
#[derive(Serialize)]
pub struct MachineReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub document_sha256: Option<String>,
    pub options: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub passed: bool,
    pub reports: Vec<JsonReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relation: Option<Vec<NamedEventPair>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chain: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub families: Option<JsonFamilies>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extension_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extensions: Option<Vec<Vec<NamedEventPair>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search: Option<JsonSearch>,
}

impl MachineReport {
    pub fn new(command: &str) -> MachineReport {
        MachineReport {
            tool: "gqp",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            document_sha256: None,
            options: BTreeMap::new(),
            seed: None,
            passed: true,
            reports: Vec::new(),
            relation: None,
            chain: None,
            families: None,
            extension_count: None,
            extensions: None,
            search: None,
        }
    }

    pub fn option(&mut self, key: &str, value: impl Into<Value>) {
        self.options.insert(key.to_string(), value.into());
    }

    pub fn push_report(&mut self, report: &CheckReport, ctx: &Ctx) {
        self.passed &= report.passed;
        self.reports.push(json_report(report, ctx));
    }
}

pub fn relation_pairs_named(r: &EventRelation) -> Vec<NamedEventPair> {
    let ctx = Ctx::Relation(r.space());
    r.pairs()
        .into_iter()
        .map(|(a, b)| (ctx.event_names(a), ctx.event_names(b)))
        .collect()
}

fn render_event_human(names: &[String]) -> String {
    format!("{{{}}}", names.join(","))
}

fn render_witness_human(w: &JsonWitness) -> String {
    let mut parts = Vec::new();
    for b in &w.bindings {
        if let Some(e) = &b.event {
            parts.push(format!("{}={}", b.name, render_event_human(e)));
        } else if let Some(a) = &b.act {
            let inner: Vec<String> = a.iter().map(|(s, c)| format!("{s}->{c}")).collect();
            parts.push(format!("{}=({})", b.name, inner.join(",")));
        } else if let Some(c) = &b.consequence {
            parts.push(format!("{}={}", b.name, c));
        } else if let Some(l) = &b.label {
            parts.push(format!("{}={}", b.name, l));
        }
    }
    let mut line = parts.join(", ");
    if let Some(note) = &w.note {
        if line.is_empty() {
            line = note.clone();
        } else {
            line.push_str(&format!(" ({note})"));
        }
    }
    line
}

/// Human rendering of the whole machine report.
pub fn render_human(report: &MachineReport) -> String {
    let mut out = String::new();
    for r in &report.reports {
        if r.passed {
            out.push_str(&format!("{}: PASS ({} instances)\n", r.subject, r.checked));
        } else {
            out.push_str(&format!(
                "{}: FAIL ({} violations of {} instances)\n",
                r.subject, r.violations, r.checked
            ));
        }
        for note in &r.notes {
            out.push_str(&format!("  note: {note}\n"));
        }
        for w in &r.witnesses {
            out.push_str(&format!("  witness: {}\n", render_witness_human(w)));
        }
    }
    if let Some(chain) = &report.chain {
        out.push_str(&format!("plausibility: {chain}\n"));
    } else if let Some(rel) = &report.relation {
        out.push_str("plausibility pairs (A <= B):\n");
        for (a, b) in rel {
            out.push_str(&format!(
                "  {} <= {}\n",
                render_event_human(a),
                render_event_human(b)
            ));
        }
    }
    if let Some(f) = &report.families {
        out.push_str(&format!(
            "families: total={} standard={} purely_nonstandard={} complement_criterion={} agrees={}\n",
            f.total, f.standard, f.purely_nonstandard, f.complement_criterion, f.criterion_agrees
        ));
    }
    if let Some(count) = report.extension_count {
        out.push_str(&format!("total extensions: {count}\n"));
    }
    if let Some(s) = &report.search {
        out.push_str(&format!(
            "search: examined={} satisfying={} exhausted={} witness_found={}\n",
            s.examined, s.satisfying, s.exhausted, s.witness_found
        ));
        if let Some(w) = &s.witness {
            out.push_str(&format!(
                "  counterexample at A={}: acts differ while value events are equally plausible\n",
                render_event_human(&w.event)
            ));
        }
    }
    out.push_str(&format!("result: {}\n", if report.passed { "PASS" } else { "FAIL" }));
    out
}
