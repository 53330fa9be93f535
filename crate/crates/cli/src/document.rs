//! The JSON document format accepted by every command.
//!
//! Rationals are strings of the form `"p/q"` or `"p"`; JSON numbers are
//! rejected for every numeric field that must stay exact, so a document can
//! never smuggle a float into the arithmetic.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use serde::Deserialize;
use sha2::{Digest, Sha256};

use gqp::{
    parse_rational, saturate, Act, ActSet, BigRational, ConditionalPreferenceStructure,
    ConsequenceScale, EventRelation, Hyperreal, ProbabilityModel, RankedModel, StateSpace,
    DEFAULT_ACT_LIMIT,
};

#[derive(Debug, Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Explicit,
    Expectation,
    Hyperreal,
    Ranked,
    EventRelation,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConsequenceSpec {
    pub name: String,
    #[serde(default)]
    pub value: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub event: Vec<String>,
    pub left: BTreeMap<String, String>,
    pub right: BTreeMap<String, String>,
}

#[derive(Debug, Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ActUniverse {
    All,
    TwoValued,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkbenchDocument {
    pub mode: Mode,
    pub states: Vec<String>,
    #[serde(default)]
    pub consequences: Vec<ConsequenceSpec>,
    /// Per-state probability weights as coefficient arrays (constant term
    /// first); expectation documents use single-element arrays.
    #[serde(default)]
    pub weights: Option<BTreeMap<String, Vec<String>>>,
    #[serde(default)]
    pub truncation_degree: Option<usize>,
    /// Ranked mode: states from least to most plausible.
    #[serde(default)]
    pub order: Option<Vec<String>>,
    #[serde(default)]
    pub acts: Option<ActUniverse>,
    #[serde(default)]
    pub act_limit: Option<usize>,
    #[serde(default)]
    pub generators: Option<Vec<GeneratorSpec>>,
    /// Event-relation mode: pairs [A, B] meaning A <= B, events as state
    /// name arrays.
    #[serde(default)]
    pub relation: Option<Vec<(Vec<String>, Vec<String>)>>,
}

#[derive(Debug)]
pub struct DocumentError(pub String);

impl fmt::Display for DocumentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for DocumentError {}

impl From<gqp::Error> for DocumentError {
    fn from(e: gqp::Error) -> Self {
        DocumentError(e.to_string())
    }
}

pub enum Loaded {
    Structure(ConditionalPreferenceStructure),
    Relation(EventRelation),
}

pub struct Document {
    pub loaded: Loaded,
    pub sha256: String,
}

fn err(msg: impl Into<String>) -> DocumentError {
    DocumentError(msg.into())
}

fn parse_scale(specs: &[ConsequenceSpec]) -> Result<ConsequenceScale, DocumentError> {
    if specs.is_empty() {
        return Err(err("document lists no consequences"));
    }
    let names: Vec<&str> = specs.iter().map(|c| c.name.as_str()).collect();
    let with_values = specs.iter().filter(|c| c.value.is_some()).count();
    if with_values == 0 {
        return Ok(ConsequenceScale::new(names)?);
    }
    if with_values != specs.len() {
        return Err(err("either every consequence carries a value or none does"));
    }
    let values: Vec<BigRational> = specs
        .iter()
        .map(|c| parse_rational(c.value.as_deref().unwrap()))
        .collect::<gqp::Result<_>>()?;
    Ok(ConsequenceScale::with_values(names, values)?)
}

fn parse_weights(
    doc: &WorkbenchDocument,
    space: &StateSpace,
    degree: usize,
) -> Result<Vec<Hyperreal>, DocumentError> {
    let table = doc.weights.as_ref().ok_or_else(|| err("document carries no weights"))?;
    let mut weights = Vec::with_capacity(space.len());
    for name in space.names() {
        let coeffs = table
            .get(name)
            .ok_or_else(|| err(format!("missing weight for state `{name}`")))?;
        if coeffs.is_empty() {
            return Err(err(format!("empty weight for state `{name}`")));
        }
        if coeffs.len() > degree + 1 {
            return Err(err(format!(
                "weight for `{name}` has {} coefficients, above truncation degree {degree}",
                coeffs.len()
            )));
        }
        let mut parsed = vec![BigRational::from_integer(0.into()); degree + 1];
        for (k, text) in coeffs.iter().enumerate() {
            parsed[k] = parse_rational(text)?;
        }
        weights.push(Hyperreal::new(parsed));
    }
    for name in table.keys() {
        space.index_of(name)?;
    }
    Ok(weights)
}

fn act_from_map(
    space: &StateSpace,
    scale: &ConsequenceScale,
    map: &BTreeMap<String, String>,
) -> Result<Act, DocumentError> {
    let mut values = vec![0u8; space.len()];
    for (state, cons) in map {
        values[space.index_of(state)?] = scale.index_of(cons)?;
    }
    for name in space.names() {
        if !map.contains_key(name) {
            return Err(err(format!("act leaves state `{name}` unassigned")));
        }
    }
    Ok(Act::new(values))
}

pub fn load(path: &Path) -> Result<Document, DocumentError> {
    let bytes = fs::read(path)
        .map_err(|e| err(format!("cannot read {}: {e}", path.display())))?;
    let sha256 = hex_digest(&bytes);
    let doc: WorkbenchDocument = serde_json::from_slice(&bytes)
        .map_err(|e| err(format!("{}: {e}", path.display())))?;
    let loaded = build(&doc)?;
    Ok(Document { loaded, sha256 })
}

fn hex_digest(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn build(doc: &WorkbenchDocument) -> Result<Loaded, DocumentError> {
    let space = StateSpace::new(doc.states.iter().cloned())?;
    match doc.mode {
        Mode::Expectation => {
            let scale = parse_scale(&doc.consequences)?;
            let weights = parse_weights(doc, &space, 0)?;
            let rationals = weights.iter().map(|w| w.standard_part().clone()).collect();
            let m = ProbabilityModel::standard(space, rationals)?;
            let limit = doc.act_limit.unwrap_or(DEFAULT_ACT_LIMIT);
            Ok(Loaded::Structure(gqp::expectation_structure_with_limit(&m, &scale, limit)?))
        }
        Mode::Hyperreal => {
            let scale = parse_scale(&doc.consequences)?;
            let degree = doc
                .truncation_degree
                .unwrap_or_else(|| ProbabilityModel::default_degree(&space));
            let weights = parse_weights(doc, &space, degree)?;
            let m = ProbabilityModel::new(space, weights)?;
            let limit = doc.act_limit.unwrap_or(DEFAULT_ACT_LIMIT);
            Ok(Loaded::Structure(gqp::hyperreal_structure_with_limit(&m, &scale, limit)?))
        }
        Mode::Ranked => {
            let scale = parse_scale(&doc.consequences)?;
            let names = doc.order.as_ref().ok_or_else(|| err("ranked document needs `order`"))?;
            let order: Vec<usize> = names
                .iter()
                .map(|n| space.index_of(n).map_err(DocumentError::from))
                .collect::<Result<_, _>>()?;
            let m = RankedModel::new(space, order)?;
            let limit = doc.act_limit.unwrap_or(DEFAULT_ACT_LIMIT);
            Ok(Loaded::Structure(gqp::ranked_structure_with_limit(&m, &scale, limit)?))
        }
        Mode::Explicit => {
            let scale = parse_scale(&doc.consequences)?;
            let limit = doc.act_limit.unwrap_or(DEFAULT_ACT_LIMIT);
            let acts = match doc.acts.unwrap_or(ActUniverse::All) {
                ActUniverse::All => ActSet::enumerate_all(&space, &scale, limit)?,
                ActUniverse::TwoValued => ActSet::two_valued_universe(&space, &scale),
            };
            let mut generators = Vec::new();
            for g in doc.generators.as_deref().unwrap_or_default() {
                let event = space.event_from_names(g.event.iter().map(String::as_str))?;
                let left = act_from_map(&space, &scale, &g.left)?;
                let right = act_from_map(&space, &scale, &g.right)?;
                let left = acts
                    .id_of(&left)
                    .ok_or_else(|| err("generator act is outside the act universe"))?;
                let right = acts
                    .id_of(&right)
                    .ok_or_else(|| err("generator act is outside the act universe"))?;
                generators.push((event, left, right));
            }
            Ok(Loaded::Structure(saturate(space, scale, acts, &generators)?))
        }
        Mode::EventRelation => {
            let pairs_spec = doc
                .relation
                .as_ref()
                .ok_or_else(|| err("event_relation document needs `relation`"))?;
            let mut pairs = Vec::with_capacity(pairs_spec.len());
            for (a, b) in pairs_spec {
                pairs.push((
                    space.event_from_names(a.iter().map(String::as_str))?,
                    space.event_from_names(b.iter().map(String::as_str))?,
                ));
            }
            Ok(Loaded::Relation(EventRelation::from_pairs(space, &pairs)?))
        }
    }
}

