//! Relations on events: derivation from preference structures, the
//! generalized-qualitative-probability axioms, negligibility between events,
//! family classification, and the equal-partition indifference check.
//!
//! An [`EventRelation`] holds one u64 row per event, so the whole relation
//! on a space of up to six states fits in a few hundred bytes and every
//! membership query is a bit test.

use std::fmt;

use serde::Serialize;

use crate::acts::ActId;
use crate::error::{Error, Result};
use crate::postulates::{constants_order, is_negligible_compared, is_null_event};
use crate::report::{CheckReport, ReportBuilder, Witness};
use crate::space::{Event, StateSpace};
use crate::structure::ConditionalPreferenceStructure as Cps;

/// Event relations index all `2^n` events per row, so `n` stays small.
pub const MAX_RELATION_STATES: usize = 6;

/// A binary relation on the events of a finite state space; `le(a, b)` reads
/// "a is not more plausible than b".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventRelation {
    space: StateSpace,
    rows: Vec<u64>,
}

impl EventRelation {
    pub fn new(space: StateSpace) -> Result<EventRelation> {
        if space.len() > MAX_RELATION_STATES {
            return Err(Error::RelationTooLarge { got: space.len(), max: MAX_RELATION_STATES });
        }
        let rows = vec![0; space.event_count()];
        Ok(EventRelation { space, rows })
    }

    pub fn reflexive(space: StateSpace) -> Result<EventRelation> {
        let mut r = EventRelation::new(space)?;
        for a in 0..r.event_count() {
            r.rows[a] |= 1 << a;
        }
        Ok(r)
    }

    /// The smallest relation satisfying the axioms: set inclusion.
    pub fn subset_order(space: StateSpace) -> Result<EventRelation> {
        let mut r = EventRelation::new(space)?;
        for a in 0..r.event_count() as u64 {
            for b in 0..r.event_count() as u64 {
                if a & !b == 0 {
                    r.rows[a as usize] |= 1 << b;
                }
            }
        }
        Ok(r)
    }

    pub fn from_pairs(space: StateSpace, pairs: &[(Event, Event)]) -> Result<EventRelation> {
        let mut r = EventRelation::new(space)?;
        for &(a, b) in pairs {
            r.set(a, b);
        }
        Ok(r)
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn n_states(&self) -> usize {
        self.space.len()
    }

    pub fn event_count(&self) -> usize {
        self.rows.len()
    }

    pub fn events(&self) -> impl Iterator<Item = Event> {
        (0..self.rows.len() as u32).map(Event)
    }

    #[inline]
    pub fn le(&self, a: Event, b: Event) -> bool {
        self.rows[a.0 as usize] >> b.0 & 1 != 0
    }

    pub fn set(&mut self, a: Event, b: Event) {
        self.rows[a.0 as usize] |= 1 << b.0;
    }

    pub fn strict(&self, a: Event, b: Event) -> bool {
        self.le(a, b) && !self.le(b, a)
    }

    pub fn equivalent(&self, a: Event, b: Event) -> bool {
        self.le(a, b) && self.le(b, a)
    }

    pub fn incomparable(&self, a: Event, b: Event) -> bool {
        !self.le(a, b) && !self.le(b, a)
    }

    /// Negligibility between events: `b` is not below the empty event and
    /// the union is not more plausible than `b - a`. The arguments need not
    /// be disjoint.
    pub fn is_negligible(&self, a: Event, b: Event) -> bool {
        !self.le(b, Event::EMPTY) && self.le(a.union(b), b.difference(a))
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.rows.len()).all(|a| self.rows[a] >> a & 1 != 0)
    }

    pub fn is_transitive(&self) -> bool {
        (0..self.rows.len()).all(|a| {
            let mut row = self.rows[a];
            let mut reach = row;
            while row != 0 {
                let b = row.trailing_zeros() as usize;
                row &= row - 1;
                reach |= self.rows[b];
            }
            reach & !self.rows[a] == 0
        })
    }

    pub fn is_total(&self) -> bool {
        let n = self.rows.len();
        (0..n).all(|a| (0..n).all(|b| self.rows[a] >> b & 1 != 0 || self.rows[b] >> a & 1 != 0))
    }

    /// True iff every pair of `other` is present here.
    pub fn contains(&self, other: &EventRelation) -> bool {
        self.rows.iter().zip(&other.rows).all(|(a, b)| b & !a == 0)
    }

    pub fn reflexive_transitive_closure(&self) -> EventRelation {
        let mut rows = self.rows.clone();
        let n = rows.len();
        for (a, row) in rows.iter_mut().enumerate() {
            *row |= 1 << a;
        }
        for k in 0..n {
            for a in 0..n {
                if rows[a] >> k & 1 != 0 {
                    rows[a] |= rows[k];
                }
            }
        }
        EventRelation { space: self.space.clone(), rows }
    }

    pub fn pair_count(&self) -> u64 {
        self.rows.iter().map(|r| r.count_ones() as u64).sum()
    }

    /// All pairs in canonical order.
    pub fn pairs(&self) -> Vec<(Event, Event)> {
        let mut out = Vec::new();
        for a in self.events() {
            for b in self.events() {
                if self.le(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub(crate) fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub(crate) fn from_rows(space: StateSpace, rows: Vec<u64>) -> EventRelation {
        EventRelation { space, rows }
    }

    /// For total preorders, renders the ascending chain of equivalence
    /// classes, e.g. `{} < {a} < {b} ~ {a,b}`. Returns `None` when the
    /// relation is not total.
    pub fn render_chain(&self) -> Option<String> {
        if !self.is_total() || !self.is_transitive() || !self.is_reflexive() {
            return None;
        }
        let mut events: Vec<Event> = self.events().collect();
        events.sort_by(|&a, &b| {
            if self.equivalent(a, b) {
                a.0.cmp(&b.0)
            } else if self.strict(a, b) {
                std::cmp::Ordering::Less
            } else {
                std::cmp::Ordering::Greater
            }
        });
        let mut out = String::new();
        for (i, &e) in events.iter().enumerate() {
            if i > 0 {
                out.push_str(if self.equivalent(events[i - 1], e) { " ~ " } else { " < " });
            }
            out.push_str(&self.space.render_event(e));
        }
        Some(out)
    }
}

/// Derives the plausibility relation: `A <= B` iff for every strictly
/// ordered constant pair, winning on B is weakly preferred to winning on A,
/// conditioned on the union. Requires an agreeing constants order with at
/// least one strict pair.
pub fn derive_plausibility(p: &Cps) -> Result<EventRelation> {
    let order = constants_order(p)?;
    let strict = order.strict_pairs();
    if strict.is_empty() {
        return Err(Error::NoStrictConstants);
    }
    let mut r = EventRelation::new(p.space().clone())?;
    for a in p.space().events() {
        for b in p.space().events() {
            let u = a.union(b);
            let mut le = true;
            for &(d, c) in &strict {
                let w_a = p.two_valued_id(a, c, d)?;
                let w_b = p.two_valued_id(b, c, d)?;
                if !p.le_ids(u, w_a, w_b) {
                    le = false;
                    break;
                }
            }
            if le {
                r.set(a, b);
            }
        }
    }
    Ok(r)
}

const COND_REFLEXIVITY: &str = "reflexivity";
const COND_TRANSITIVITY: &str = "transitivity";
const COND_UNION_MONOTONE: &str = "union-monotonicity";
const COND_UNION_CANCEL: &str = "union-cancellation";
const COND_ABSORPTION: &str = "absorption-implies-null";
const COND_EMPTY_LEAST: &str = "empty-least";

/// Checks reflexivity, transitivity, and the four defining conditions of a
/// generalized qualitative probability, exhaustively over event tuples.
/// Witnesses carry a `condition` label naming the violated clause.
pub fn check_gqp(r: &EventRelation) -> CheckReport {
    let mut b = ReportBuilder::new("gqp-axioms");
    for a in r.events() {
        b.instance(r.le(a, a), || Witness::new().label("condition", COND_REFLEXIVITY).event("A", a));
        b.instance(r.le(Event::EMPTY, a), || {
            Witness::new().label("condition", COND_EMPTY_LEAST).event("A", a)
        });
    }
    for a in r.events() {
        for e in r.events() {
            if r.le(a, e) {
                for c in r.events() {
                    if r.le(e, c) && !r.le(a, c) {
                        b.violation(|| {
                            Witness::new()
                                .label("condition", COND_TRANSITIVITY)
                                .event("A", a)
                                .event("B", e)
                                .event("C", c)
                        });
                    }
                }
            }
        }
        b.count_instances((r.event_count() * r.event_count()) as u64);
    }
    for a in r.events() {
        for e in r.events() {
            for d in r.events() {
                let disjoint = a.is_disjoint_from(d) && e.is_disjoint_from(d);
                let cond1 = !(disjoint && r.le(a, e)) || r.le(a.union(d), e.union(d));
                b.instance(cond1, || {
                    Witness::new()
                        .label("condition", COND_UNION_MONOTONE)
                        .event("A", a)
                        .event("B", e)
                        .event("D", d)
                });
                let cond2 = !(disjoint && r.le(a.union(d), e.union(d)) && !r.le(d.union(e), d))
                    || r.le(a, e);
                b.instance(cond2, || {
                    Witness::new()
                        .label("condition", COND_UNION_CANCEL)
                        .event("A", a)
                        .event("B", e)
                        .event("D", d)
                });
            }
            let cond3 = !(a.is_disjoint_from(e) && r.le(a, e) && r.le(a.union(e), a))
                || r.le(e, Event::EMPTY);
            b.instance(cond3, || {
                Witness::new().label("condition", COND_ABSORPTION).event("A", a).event("B", e)
            });
        }
    }
    b.finish()
}

/// Re-evaluates a witness from [`check_gqp`]; `true` means the violation
/// reproduces.
pub fn replay_gqp_witness(r: &EventRelation, w: &Witness) -> bool {
    let ev = |n: &str| w.get_event(n);
    match w.get_label("condition") {
        Some(COND_REFLEXIVITY) => ev("A").is_some_and(|a| !r.le(a, a)),
        Some(COND_EMPTY_LEAST) => ev("A").is_some_and(|a| !r.le(Event::EMPTY, a)),
        Some(COND_TRANSITIVITY) => match (ev("A"), ev("B"), ev("C")) {
            (Some(a), Some(b), Some(c)) => r.le(a, b) && r.le(b, c) && !r.le(a, c),
            _ => false,
        },
        Some(COND_UNION_MONOTONE) => match (ev("A"), ev("B"), ev("D")) {
            (Some(a), Some(b), Some(d)) => {
                a.is_disjoint_from(d)
                    && b.is_disjoint_from(d)
                    && r.le(a, b)
                    && !r.le(a.union(d), b.union(d))
            }
            _ => false,
        },
        Some(COND_UNION_CANCEL) => match (ev("A"), ev("B"), ev("D")) {
            (Some(a), Some(b), Some(d)) => {
                a.is_disjoint_from(d)
                    && b.is_disjoint_from(d)
                    && r.le(a.union(d), b.union(d))
                    && !r.le(d.union(b), d)
                    && !r.le(a, b)
            }
            _ => false,
        },
        Some(COND_ABSORPTION) => match (ev("A"), ev("B")) {
            (Some(a), Some(b)) => {
                a.is_disjoint_from(b)
                    && r.le(a, b)
                    && r.le(a.union(b), a)
                    && !r.le(b, Event::EMPTY)
            }
            _ => false,
        },
        _ => false,
    }
}

/// The derived properties checked by [`check_gqp_lemmas`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum GqpLemmaId {
    Preorder,
    UnionMonotone,
    UnionCancellation,
    EmptyLeast,
    DisjointSumNull,
    NullCharacterization,
    NegligibleMatchesPreferences,
    SubsetMonotone,
    StrictUnionCancellation,
    StrictUnionIntroduction,
    PairwiseUnionMonotone,
    SomePartStrictlyBelow,
    NegligibleSubsetLeft,
    NegligibleSupersetRight,
    NegligibleImpliesStrict,
    NegligibleSplitSubset,
    NegligibleSplitDisjoint,
    NegligibleModularity,
    NegligibleSandwich,
    NegligibleUnionClosure,
    NegligibleUnionSplit,
    CancelOrNegligibleUnion,
    CancelOrPartsNegligible,
    CancelAsymmetric,
    UnionExchange,
    NegligibleGlossAgreement,
}

impl GqpLemmaId {
    pub const ALL: [GqpLemmaId; 26] = [
        GqpLemmaId::Preorder,
        GqpLemmaId::UnionMonotone,
        GqpLemmaId::UnionCancellation,
        GqpLemmaId::EmptyLeast,
        GqpLemmaId::DisjointSumNull,
        GqpLemmaId::NullCharacterization,
        GqpLemmaId::NegligibleMatchesPreferences,
        GqpLemmaId::SubsetMonotone,
        GqpLemmaId::StrictUnionCancellation,
        GqpLemmaId::StrictUnionIntroduction,
        GqpLemmaId::PairwiseUnionMonotone,
        GqpLemmaId::SomePartStrictlyBelow,
        GqpLemmaId::NegligibleSubsetLeft,
        GqpLemmaId::NegligibleSupersetRight,
        GqpLemmaId::NegligibleImpliesStrict,
        GqpLemmaId::NegligibleSplitSubset,
        GqpLemmaId::NegligibleSplitDisjoint,
        GqpLemmaId::NegligibleModularity,
        GqpLemmaId::NegligibleSandwich,
        GqpLemmaId::NegligibleUnionClosure,
        GqpLemmaId::NegligibleUnionSplit,
        GqpLemmaId::CancelOrNegligibleUnion,
        GqpLemmaId::CancelOrPartsNegligible,
        GqpLemmaId::CancelAsymmetric,
        GqpLemmaId::UnionExchange,
        GqpLemmaId::NegligibleGlossAgreement,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            GqpLemmaId::Preorder => "event-preorder",
            GqpLemmaId::UnionMonotone => "union-monotonicity",
            GqpLemmaId::UnionCancellation => "union-cancellation",
            GqpLemmaId::EmptyLeast => "empty-least",
            GqpLemmaId::DisjointSumNull => "disjoint-sum-null-parts",
            GqpLemmaId::NullCharacterization => "null-iff-below-empty",
            GqpLemmaId::NegligibleMatchesPreferences => "negligible-matches-preferences",
            GqpLemmaId::SubsetMonotone => "subset-monotonicity",
            GqpLemmaId::StrictUnionCancellation => "strict-union-cancellation",
            GqpLemmaId::StrictUnionIntroduction => "strict-union-introduction",
            GqpLemmaId::PairwiseUnionMonotone => "pairwise-union-monotonicity",
            GqpLemmaId::SomePartStrictlyBelow => "some-part-strictly-below-union",
            GqpLemmaId::NegligibleSubsetLeft => "negligible-subset-left",
            GqpLemmaId::NegligibleSupersetRight => "negligible-superset-right",
            GqpLemmaId::NegligibleImpliesStrict => "negligible-implies-strict",
            GqpLemmaId::NegligibleSplitSubset => "negligible-split-subset",
            GqpLemmaId::NegligibleSplitDisjoint => "negligible-split-disjoint",
            GqpLemmaId::NegligibleModularity => "negligible-modularity",
            GqpLemmaId::NegligibleSandwich => "negligible-sandwich",
            GqpLemmaId::NegligibleUnionClosure => "negligible-union-closure",
            GqpLemmaId::NegligibleUnionSplit => "negligible-union-split",
            GqpLemmaId::CancelOrNegligibleUnion => "cancel-or-negligible-union",
            GqpLemmaId::CancelOrPartsNegligible => "cancel-or-parts-negligible",
            GqpLemmaId::CancelAsymmetric => "cancel-asymmetric",
            GqpLemmaId::UnionExchange => "union-exchange",
            GqpLemmaId::NegligibleGlossAgreement => "negligible-gloss-agreement",
        }
    }
}

impl fmt::Display for GqpLemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Runs the whole derived-property suite over an event relation. When a
/// source preference structure is supplied, the nullity and negligibility
/// reports are cross-checked against it; otherwise those two reports are
/// skipped with a note.
pub fn check_gqp_lemmas(r: &EventRelation, source: Option<&Cps>) -> Result<Vec<CheckReport>> {
    GqpLemmaId::ALL.iter().map(|&id| check_gqp_lemma(r, id, source)).collect()
}

pub fn check_gqp_lemma(
    r: &EventRelation,
    id: GqpLemmaId,
    source: Option<&Cps>,
) -> Result<CheckReport> {
    if let Some(p) = source {
        if p.space().len() != r.n_states() {
            return Err(Error::SpaceMismatch(p.space().len(), r.n_states()));
        }
    }
    let mut b = ReportBuilder::new(id.as_str());
    match id {
        GqpLemmaId::Preorder => {
            for a in r.events() {
                b.instance(r.le(a, a), || {
                    Witness::new().label("condition", COND_REFLEXIVITY).event("A", a)
                });
                for e in r.events() {
                    for c in r.events() {
                        b.instance(!(r.le(a, e) && r.le(e, c)) || r.le(a, c), || {
                            Witness::new()
                                .label("condition", COND_TRANSITIVITY)
                                .event("A", a)
                                .event("B", e)
                                .event("C", c)
                        });
                    }
                }
            }
        }
        GqpLemmaId::UnionMonotone | GqpLemmaId::UnionCancellation => {
            for a in r.events() {
                for e in r.events() {
                    for d in r.events() {
                        let holds = gqp_triple_holds(r, id, a, e, d);
                        b.instance(holds, || {
                            Witness::new().event("A", a).event("B", e).event("D", d)
                        });
                    }
                }
            }
        }
        GqpLemmaId::EmptyLeast => {
            for a in r.events() {
                b.instance(r.le(Event::EMPTY, a), || Witness::new().event("A", a));
            }
        }
        GqpLemmaId::DisjointSumNull => {
            for a in r.events() {
                for e in r.events() {
                    let holds = !(a.is_disjoint_from(e) && r.le(a, e) && r.le(a.union(e), a))
                        || (r.le(a, Event::EMPTY) && r.le(e, Event::EMPTY));
                    b.instance(holds, || Witness::new().event("A", a).event("B", e));
                }
            }
        }
        GqpLemmaId::NullCharacterization => match source {
            Some(p) => {
                for a in r.events() {
                    b.instance(is_null_event(p, a) == r.le(a, Event::EMPTY), || {
                        Witness::new().event("A", a)
                    });
                }
            }
            None => b.note("no source structure supplied; nullity is definitional here"),
        },
        GqpLemmaId::NegligibleMatchesPreferences => match source {
            Some(p) => {
                for a in r.events() {
                    for e in r.events() {
                        if !a.is_disjoint_from(e) {
                            b.count_instances(1);
                            continue;
                        }
                        let holds =
                            is_negligible_compared(p, a, e)? == r.le(e.union(a), e);
                        b.instance(holds, || Witness::new().event("A", a).event("B", e));
                    }
                }
            }
            None => b.note("no source structure supplied; skipped"),
        },
        GqpLemmaId::SubsetMonotone => {
            for a in r.events() {
                for e in r.events() {
                    b.instance(!a.is_subset_of(e) || r.le(a, e), || {
                        Witness::new().event("A", a).event("B", e)
                    });
                }
            }
        }
        GqpLemmaId::StrictUnionCancellation
        | GqpLemmaId::StrictUnionIntroduction
        | GqpLemmaId::CancelOrNegligibleUnion
        | GqpLemmaId::CancelOrPartsNegligible
        | GqpLemmaId::CancelAsymmetric => {
            for a in r.events() {
                for e in r.events() {
                    for d in r.events() {
                        b.instance(gqp_triple_holds(r, id, a, e, d), || {
                            Witness::new().event("A", a).event("B", e).event("D", d)
                        });
                    }
                }
            }
        }
        GqpLemmaId::SomePartStrictlyBelow => {
            for a in r.events() {
                for e in r.events() {
                    let u = a.union(e);
                    let holds = !(a.is_disjoint_from(e) && r.strict(Event::EMPTY, u))
                        || r.strict(a, u)
                        || r.strict(e, u);
                    b.instance(holds, || Witness::new().event("A", a).event("B", e));
                }
            }
        }
        GqpLemmaId::NegligibleSubsetLeft
        | GqpLemmaId::NegligibleSupersetRight
        | GqpLemmaId::NegligibleSplitSubset
        | GqpLemmaId::NegligibleSplitDisjoint
        | GqpLemmaId::NegligibleModularity
        | GqpLemmaId::NegligibleUnionClosure
        | GqpLemmaId::NegligibleUnionSplit => {
            for a in r.events() {
                for e in r.events() {
                    for c in r.events() {
                        b.instance(gqp_triple_holds(r, id, a, e, c), || {
                            let (n2, n3) = triple_binding_names(id);
                            Witness::new().event("A", a).event(n2, e).event(n3, c)
                        });
                    }
                }
            }
        }
        GqpLemmaId::NegligibleImpliesStrict => {
            for a in r.events() {
                for e in r.events() {
                    b.instance(!r.is_negligible(a, e) || r.strict(a, e), || {
                        Witness::new().event("A", a).event("B", e)
                    });
                }
            }
        }
        GqpLemmaId::NegligibleSandwich => {
            for a in r.events() {
                for e in r.events() {
                    for c in r.events() {
                        for d in r.events() {
                            let holds = !(r.le(a, e) && r.is_negligible(e, c) && r.le(c, d))
                                || r.is_negligible(a, d);
                            b.instance(holds, || {
                                Witness::new()
                                    .event("A", a)
                                    .event("B", e)
                                    .event("C", c)
                                    .event("D", d)
                            });
                        }
                    }
                }
            }
        }
        GqpLemmaId::PairwiseUnionMonotone => {
            for a in r.events() {
                for e in r.events() {
                    if !a.is_disjoint_from(e) {
                        b.count_instances((r.event_count() * r.event_count()) as u64);
                        continue;
                    }
                    for a2 in r.events() {
                        for b2 in r.events() {
                            let holds = !(r.le(a2, a) && r.le(b2, e))
                                || r.le(a2.union(b2), a.union(e));
                            b.instance(holds, || {
                                Witness::new()
                                    .event("A", a)
                                    .event("B", e)
                                    .event("A'", a2)
                                    .event("B'", b2)
                            });
                        }
                    }
                }
            }
        }
        GqpLemmaId::UnionExchange => {
            for a in r.events() {
                for e in r.events() {
                    if !a.is_disjoint_from(e) {
                        b.count_instances((r.event_count() * r.event_count()) as u64);
                        continue;
                    }
                    for a2 in r.events() {
                        for b2 in r.events() {
                            let holds = !(r.le(a.union(e), a2.union(b2)) && r.le(b2, e))
                                || r.le(a, a2)
                                || r.is_negligible(a.union(a2), b2);
                            b.instance(holds, || {
                                Witness::new()
                                    .event("A", a)
                                    .event("B", e)
                                    .event("A'", a2)
                                    .event("B'", b2)
                            });
                        }
                    }
                }
            }
        }
        GqpLemmaId::NegligibleGlossAgreement => {
            for a in r.events() {
                for e in r.events() {
                    let gloss = r.is_negligible(a.intersection(e), e)
                        && r.is_negligible(a.difference(e), e);
                    b.instance(r.is_negligible(a, e) == gloss, || {
                        Witness::new().event("A", a).event("B", e)
                    });
                }
            }
        }
    }
    Ok(b.finish())
}

fn triple_binding_names(id: GqpLemmaId) -> (&'static str, &'static str) {
    match id {
        GqpLemmaId::NegligibleUnionClosure => ("A'", "B"),
        GqpLemmaId::NegligibleUnionSplit => ("B", "B'"),
        _ => ("B", "C"),
    }
}

fn gqp_triple_holds(r: &EventRelation, id: GqpLemmaId, a: Event, e: Event, t: Event) -> bool {
    match id {
        GqpLemmaId::UnionMonotone => {
            !(a.is_disjoint_from(t) && e.is_disjoint_from(t) && r.le(a, e))
                || r.le(a.union(t), e.union(t))
        }
        GqpLemmaId::UnionCancellation => {
            !(a.is_disjoint_from(t)
                && e.is_disjoint_from(t)
                && r.le(a.union(t), e.union(t))
                && !r.le(t.union(e), t))
                || r.le(a, e)
        }
        GqpLemmaId::StrictUnionCancellation => {
            !(a.is_disjoint_from(t)
                && e.is_disjoint_from(t)
                && r.strict(a.union(t), e.union(t)))
                || r.strict(a, e)
        }
        GqpLemmaId::StrictUnionIntroduction => {
            !(a.is_disjoint_from(t)
                && e.is_disjoint_from(t)
                && r.strict(a, e)
                && r.strict(t, e.union(t)))
                || r.strict(a.union(t), e.union(t))
        }
        GqpLemmaId::CancelOrNegligibleUnion => {
            !(a.is_disjoint_from(t) && e.is_disjoint_from(t) && r.le(a.union(t), e.union(t)))
                || r.le(a, e)
                || r.is_negligible(a, e.union(t))
        }
        GqpLemmaId::CancelOrPartsNegligible => {
            !(a.is_disjoint_from(t) && e.is_disjoint_from(t) && r.le(a.union(t), e.union(t)))
                || r.le(a, e)
                || r.is_negligible(a.union(e), t)
        }
        GqpLemmaId::CancelAsymmetric => {
            !(a.is_disjoint_from(t) && r.le(a.union(t), e.union(t)))
                || r.le(a, e)
                || r.is_negligible(a.union(e), t)
        }
        // Negligibility triple forms: (a, e, t) bound per triple_binding_names.
        GqpLemmaId::NegligibleSubsetLeft => {
            !(a.is_subset_of(e) && r.is_negligible(e, t)) || r.is_negligible(a, t)
        }
        GqpLemmaId::NegligibleSupersetRight => {
            !(r.is_negligible(a, e) && e.is_subset_of(t)) || r.is_negligible(a, t)
        }
        GqpLemmaId::NegligibleSplitSubset => {
            !(e.is_subset_of(t) && r.is_negligible(a, t))
                || r.is_negligible(a, e)
                || r.is_negligible(e, t)
        }
        GqpLemmaId::NegligibleSplitDisjoint => {
            !(e.is_disjoint_from(t) && r.is_negligible(a, t))
                || r.is_negligible(a, e)
                || r.is_negligible(e, t)
        }
        GqpLemmaId::NegligibleModularity => {
            !r.is_negligible(a, t) || r.is_negligible(a, e) || r.is_negligible(e, t)
        }
        GqpLemmaId::NegligibleUnionClosure => {
            // bound as (A, A', B)
            !(r.is_negligible(a, t) && r.is_negligible(e, t)) || r.is_negligible(a.union(e), t)
        }
        GqpLemmaId::NegligibleUnionSplit => {
            // bound as (A, B, B')
            !r.is_negligible(a, e.union(t)) || r.is_negligible(a, e) || r.is_negligible(a, t)
        }
        _ => unreachable!("not a triple lemma"),
    }
}

/// Re-evaluates a witness from the lemma suite; `true` means the violation
/// reproduces.
pub fn replay_gqp_lemma(
    r: &EventRelation,
    id: GqpLemmaId,
    w: &Witness,
    source: Option<&Cps>,
) -> Result<bool> {
    let ev = |n: &str| w.get_event(n).ok_or(Error::UnregisteredAct);
    Ok(match id {
        GqpLemmaId::Preorder => match w.get_label("condition") {
            Some(COND_REFLEXIVITY) => !r.le(ev("A")?, ev("A")?),
            Some(COND_TRANSITIVITY) => {
                let (a, e, c) = (ev("A")?, ev("B")?, ev("C")?);
                r.le(a, e) && r.le(e, c) && !r.le(a, c)
            }
            _ => false,
        },
        GqpLemmaId::UnionMonotone
        | GqpLemmaId::UnionCancellation
        | GqpLemmaId::StrictUnionCancellation
        | GqpLemmaId::StrictUnionIntroduction
        | GqpLemmaId::CancelOrNegligibleUnion
        | GqpLemmaId::CancelOrPartsNegligible
        | GqpLemmaId::CancelAsymmetric => {
            !gqp_triple_holds(r, id, ev("A")?, ev("B")?, ev("D")?)
        }
        GqpLemmaId::NegligibleSubsetLeft
        | GqpLemmaId::NegligibleSupersetRight
        | GqpLemmaId::NegligibleSplitSubset
        | GqpLemmaId::NegligibleSplitDisjoint
        | GqpLemmaId::NegligibleModularity
        | GqpLemmaId::NegligibleUnionClosure
        | GqpLemmaId::NegligibleUnionSplit => {
            let (n2, n3) = triple_binding_names(id);
            !gqp_triple_holds(r, id, ev("A")?, ev(n2)?, ev(n3)?)
        }
        GqpLemmaId::EmptyLeast => !r.le(Event::EMPTY, ev("A")?),
        GqpLemmaId::DisjointSumNull => {
            let (a, e) = (ev("A")?, ev("B")?);
            a.is_disjoint_from(e)
                && r.le(a, e)
                && r.le(a.union(e), a)
                && !(r.le(a, Event::EMPTY) && r.le(e, Event::EMPTY))
        }
        GqpLemmaId::NullCharacterization => {
            let a = ev("A")?;
            let p = source.ok_or(Error::UnregisteredAct)?;
            is_null_event(p, a) != r.le(a, Event::EMPTY)
        }
        GqpLemmaId::NegligibleMatchesPreferences => {
            let (a, e) = (ev("A")?, ev("B")?);
            let p = source.ok_or(Error::UnregisteredAct)?;
            is_negligible_compared(p, a, e)? != r.le(e.union(a), e)
        }
        GqpLemmaId::SubsetMonotone => {
            let (a, e) = (ev("A")?, ev("B")?);
            a.is_subset_of(e) && !r.le(a, e)
        }
        GqpLemmaId::SomePartStrictlyBelow => {
            let (a, e) = (ev("A")?, ev("B")?);
            let u = a.union(e);
            a.is_disjoint_from(e)
                && r.strict(Event::EMPTY, u)
                && !r.strict(a, u)
                && !r.strict(e, u)
        }
        GqpLemmaId::NegligibleImpliesStrict => {
            let (a, e) = (ev("A")?, ev("B")?);
            r.is_negligible(a, e) && !r.strict(a, e)
        }
        GqpLemmaId::NegligibleSandwich => {
            let (a, e, c, d) = (ev("A")?, ev("B")?, ev("C")?, ev("D")?);
            r.le(a, e) && r.is_negligible(e, c) && r.le(c, d) && !r.is_negligible(a, d)
        }
        GqpLemmaId::PairwiseUnionMonotone => {
            let (a, e, a2, b2) = (ev("A")?, ev("B")?, ev("A'")?, ev("B'")?);
            a.is_disjoint_from(e)
                && r.le(a2, a)
                && r.le(b2, e)
                && !r.le(a2.union(b2), a.union(e))
        }
        GqpLemmaId::UnionExchange => {
            let (a, e, a2, b2) = (ev("A")?, ev("B")?, ev("A'")?, ev("B'")?);
            a.is_disjoint_from(e)
                && r.le(a.union(e), a2.union(b2))
                && r.le(b2, e)
                && !r.le(a, a2)
                && !r.is_negligible(a.union(a2), b2)
        }
        GqpLemmaId::NegligibleGlossAgreement => {
            let (a, e) = (ev("A")?, ev("B")?);
            let gloss = r.is_negligible(a.intersection(e), e)
                && r.is_negligible(a.difference(e), e);
            r.is_negligible(a, e) != gloss
        }
    })
}

/// Family membership flags for an event relation, plus the complementation
/// criterion and whether it agrees with the standardness flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FamilyFlags {
    pub total: bool,
    pub standard: bool,
    pub purely_nonstandard: bool,
    pub complement_criterion: bool,
    pub criterion_agrees: bool,
}

pub fn classify_family(r: &EventRelation) -> FamilyFlags {
    let full = Event((r.event_count() - 1) as u32);
    let mut total = true;
    let mut standard = true;
    let mut purely_nonstandard = true;
    let mut complement_criterion = true;
    for a in r.events() {
        for e in r.events() {
            if !r.le(a, e) && !r.le(e, a) {
                total = false;
            }
            if a.is_disjoint_from(e) && !a.is_empty() && !r.strict(e, a.union(e)) {
                standard = false;
            }
            if r.strict(a, e) && !r.equivalent(e.difference(a), a.union(e)) {
                purely_nonstandard = false;
            }
            if r.le(a, e) && !r.le(full.difference(e), full.difference(a)) {
                complement_criterion = false;
            }
        }
    }
    FamilyFlags {
        total,
        standard,
        purely_nonstandard,
        complement_criterion,
        criterion_agrees: standard == complement_criterion,
    }
}

/// The event on which an act takes the value `z`, inside `within`.
fn value_event(p: &Cps, act: ActId, within: Event, z: u8) -> Event {
    let a = p.acts().get(act);
    Event::from_indices(
        within
            .states()
            .take_while(|&s| s < a.len())
            .filter(|&s| a.value_at(s) == z),
    )
}

/// Checks one instance of the equal-partition indifference statement: if
/// for every consequence z the events where f and g take z inside A are
/// equally plausible, then f and g must be indifferent on A.
pub fn check_equipartition(p: &Cps, a: Event, f: ActId, g: ActId) -> Result<CheckReport> {
    let r = derive_plausibility(p)?;
    let mut b = ReportBuilder::new("value-equivalent-indifference");
    if equipartition_hypothesis(p, &r, a, f, g) {
        b.instance(p.le_ids(a, f, g) && p.le_ids(a, g, f), || {
            Witness::new().event("A", a).act("f", f).act("g", g)
        });
    } else {
        b.note("hypothesis not satisfied: some value events are not equally plausible");
    }
    Ok(b.finish())
}

/// Sweeps every (event, act, act) triple, checking indifference whenever the
/// value partitions are pairwise equally plausible.
pub fn check_equipartition_sweep(p: &Cps) -> Result<CheckReport> {
    let r = derive_plausibility(p)?;
    let mut b = ReportBuilder::new("value-equivalent-indifference");
    for a in p.space().events() {
        for f in p.acts().ids() {
            for g in p.acts().ids() {
                if !equipartition_hypothesis(p, &r, a, f, g) {
                    b.count_instances(1);
                    continue;
                }
                b.instance(p.le_ids(a, f, g) && p.le_ids(a, g, f), || {
                    Witness::new().event("A", a).act("f", f).act("g", g)
                });
            }
        }
    }
    Ok(b.finish())
}

pub fn equipartition_hypothesis(p: &Cps, r: &EventRelation, a: Event, f: ActId, g: ActId) -> bool {
    (0..p.scale().len() as u8)
        .all(|z| r.equivalent(value_event(p, f, a, z), value_event(p, g, a, z)))
}

/// Re-evaluates an equipartition witness; `true` means the violation
/// reproduces.
pub fn replay_equipartition(p: &Cps, w: &Witness) -> Result<bool> {
    let a = w.get_event("A").ok_or(Error::UnregisteredAct)?;
    let f = w.get_act("f").ok_or(Error::UnregisteredAct)?;
    let g = w.get_act("g").ok_or(Error::UnregisteredAct)?;
    let r = derive_plausibility(p)?;
    Ok(equipartition_hypothesis(p, &r, a, f, g) && !(p.le_ids(a, f, g) && p.le_ids(a, g, f)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acts::ConsequenceScale;
    use crate::hyperreal::{rat, Hyperreal};
    use crate::models::{
        expectation_structure, hyperreal_structure, ranked_structure, ProbabilityModel,
        RankedModel,
    };
    use crate::space::StateSpace;

    fn zero_one() -> ConsequenceScale {
        ConsequenceScale::with_values(["z", "o"], vec![rat(0, 1), rat(1, 1)]).unwrap()
    }

    fn ev(names: &[usize]) -> Event {
        Event::from_indices(names.iter().copied())
    }

    #[test]
    fn uniform_expectation_orders_events_by_cardinality() {
        let space = StateSpace::new(["a", "b", "c"]).unwrap();
        let m = ProbabilityModel::standard(space, vec![rat(1, 3); 3]).unwrap();
        let p = expectation_structure(&m, &zero_one()).unwrap();
        let r = derive_plausibility(&p).unwrap();
        assert!(r.equivalent(ev(&[0]), ev(&[1])));
        assert!(r.equivalent(ev(&[1]), ev(&[2])));
        assert!(r.strict(ev(&[0]), ev(&[0, 1])));
        assert!(r.strict(Event::EMPTY, ev(&[0])));
        assert!(r.is_total());
    }

    #[test]
    fn ranked_chain_matches_maximal_state_comparison() {
        let space = StateSpace::new(["a", "b", "c"]).unwrap();
        let m = RankedModel::new(space, vec![0, 1, 2]).unwrap();
        let p = ranked_structure(&m, &zero_one()).unwrap();
        let r = derive_plausibility(&p).unwrap();
        assert!(r.strict(Event::EMPTY, ev(&[0])));
        assert!(r.strict(ev(&[0]), ev(&[1])));
        assert!(r.equivalent(ev(&[1]), ev(&[0, 1])));
        assert!(r.strict(ev(&[0, 1]), ev(&[2])));
        assert!(r.equivalent(ev(&[2]), ev(&[0, 2])));
        assert!(r.equivalent(ev(&[0, 2]), ev(&[1, 2])));
        assert!(r.equivalent(ev(&[1, 2]), ev(&[0, 1, 2])));
        let chain = r.render_chain().unwrap();
        assert_eq!(chain, "{} < {a} < {b} ~ {a,b} < {c} ~ {a,c} ~ {b,c} ~ {a,b,c}");
    }

    fn eps3_model() -> ProbabilityModel {
        // Weights (1 - eps - eps^2, eps, eps^2).
        let space = StateSpace::new(["a", "b", "c"]).unwrap();
        let degree = 6;
        let mk = |coeffs: &[(usize, i64)]| {
            let mut cs = vec![rat(0, 1); degree + 1];
            for &(k, v) in coeffs {
                cs[k] = rat(v, 1);
            }
            Hyperreal::new(cs)
        };
        let weights = vec![
            mk(&[(0, 1), (1, -1), (2, -1)]),
            mk(&[(1, 1)]),
            mk(&[(2, 1)]),
        ];
        ProbabilityModel::new(space, weights).unwrap()
    }

    #[test]
    fn hyperreal_plausibility_collapses_infinitesimal_unions() {
        let p = hyperreal_structure(&eps3_model(), &zero_one()).unwrap();
        let r = derive_plausibility(&p).unwrap();
        assert!(r.le(ev(&[1, 2]), ev(&[0])));
        assert!(!r.le(ev(&[0]), ev(&[1, 2])));
        assert!(r.equivalent(ev(&[0]), ev(&[0, 1])));
    }

    #[test]
    fn negligibility_on_infinitesimal_weights() {
        let space = StateSpace::new(["a", "b"]).unwrap();
        let mk = |coeffs: &[(usize, i64)]| {
            let mut cs = vec![rat(0, 1); 4 + 1];
            for &(k, v) in coeffs {
                cs[k] = rat(v, 1);
            }
            Hyperreal::new(cs)
        };
        let m = ProbabilityModel::new(space, vec![mk(&[(0, 1), (1, -1)]), mk(&[(1, 1)])]).unwrap();
        let p = hyperreal_structure(&m, &zero_one()).unwrap();
        let r = derive_plausibility(&p).unwrap();
        // The infinitesimal-weight state is negligible with respect to the
        // heavy one, but never the other way round.
        assert!(r.is_negligible(ev(&[1]), ev(&[0])));
        assert!(!r.is_negligible(ev(&[0]), ev(&[1])));
        // First conjunct matters: nothing is negligible w.r.t. a null event.
        assert!(!r.is_negligible(ev(&[0]), Event::EMPTY));
    }

    #[test]
    fn uniform_model_has_no_negligible_atoms() {
        let space = StateSpace::new(["a", "b"]).unwrap();
        let m = ProbabilityModel::standard(space, vec![rat(1, 2), rat(1, 2)]).unwrap();
        let p = expectation_structure(&m, &zero_one()).unwrap();
        let r = derive_plausibility(&p).unwrap();
        assert!(!r.is_negligible(ev(&[0]), ev(&[1])));
    }

    #[test]
    fn derived_relations_pass_the_axioms() {
        let p = hyperreal_structure(&eps3_model(), &zero_one()).unwrap();
        let r = derive_plausibility(&p).unwrap();
        let report = check_gqp(&r);
        assert!(report.passed, "{:?}", report.witnesses);
        for lemma in check_gqp_lemmas(&r, Some(&p)).unwrap() {
            assert!(lemma.passed, "{}: {:?}", lemma.subject, lemma.witnesses);
        }
    }

    #[test]
    fn constructed_absorption_violation_is_caught_with_named_witness() {
        // Reflexive, empty-least, subset pairs, {a} <= {b}, S <= {a}, closed
        // transitively: violates the absorption condition at (A,B)=({a},{b}).
        let space = StateSpace::new(["a", "b"]).unwrap();
        let mut r = EventRelation::subset_order(space).unwrap();
        r.set(ev(&[0]), ev(&[1]));
        r.set(ev(&[0, 1]), ev(&[0]));
        let r = r.reflexive_transitive_closure();
        let report = check_gqp(&r);
        assert!(!report.passed);
        let w = report
            .witnesses
            .iter()
            .find(|w| w.get_label("condition") == Some(COND_ABSORPTION))
            .expect("absorption witness");
        assert_eq!(w.get_event("A"), Some(ev(&[0])));
        assert_eq!(w.get_event("B"), Some(ev(&[1])));
        assert!(replay_gqp_witness(&r, w));
        // The sum lemma restates that condition and fails with it.
        let sum = check_gqp_lemma(&r, GqpLemmaId::DisjointSumNull, None).unwrap();
        assert!(!sum.passed);
        assert!(replay_gqp_lemma(&r, GqpLemmaId::DisjointSumNull, &sum.witnesses[0], None).unwrap());
    }

    #[test]
    fn subset_order_is_a_gqp_on_two_states() {
        let space = StateSpace::new(["a", "b"]).unwrap();
        let r = EventRelation::subset_order(space).unwrap();
        assert!(check_gqp(&r).passed);
        assert!(r.incomparable(ev(&[0]), ev(&[1])));
    }

    #[test]
    fn families_of_the_three_models() {
        let space = StateSpace::new(["a", "b", "c"]).unwrap();
        let m = ProbabilityModel::standard(space.clone(), vec![rat(1, 2), rat(1, 3), rat(1, 6)])
            .unwrap();
        let p = expectation_structure(&m, &zero_one()).unwrap();
        let f = classify_family(&derive_plausibility(&p).unwrap());
        assert!(f.total && f.standard && !f.purely_nonstandard && f.criterion_agrees);

        let ranked = RankedModel::new(space, vec![0, 1, 2]).unwrap();
        let p = ranked_structure(&ranked, &zero_one()).unwrap();
        let f = classify_family(&derive_plausibility(&p).unwrap());
        assert!(f.total && !f.standard && f.purely_nonstandard && f.criterion_agrees);

        let p = hyperreal_structure(&eps3_model(), &zero_one()).unwrap();
        let f = classify_family(&derive_plausibility(&p).unwrap());
        assert!(f.total && !f.standard && f.criterion_agrees);
    }

    #[test]
    fn ranked_strict_pairs_are_negligible_pairs() {
        // On a four-state ranked model every strict comparison comes from an
        // overwhelming maximum, so strictness and negligibility coincide.
        let space = StateSpace::new(["a", "b", "c", "d"]).unwrap();
        let m = RankedModel::new(space, vec![0, 1, 2, 3]).unwrap();
        let p = ranked_structure(&m, &zero_one()).unwrap();
        let r = derive_plausibility(&p).unwrap();
        for a in r.events() {
            for b in r.events() {
                if r.strict(a, b) {
                    assert!(r.is_negligible(a, b), "{a:?} < {b:?} but not negligible");
                }
            }
        }
    }

    #[test]
    fn equipartition_holds_on_the_uniform_swap() {
        let space = StateSpace::new(["a", "b"]).unwrap();
        let m = ProbabilityModel::standard(space, vec![rat(1, 2), rat(1, 2)]).unwrap();
        let p = expectation_structure(&m, &zero_one()).unwrap();
        let f = p.act_id(&crate::acts::Act::new(vec![1, 0])).unwrap();
        let g = p.act_id(&crate::acts::Act::new(vec![0, 1])).unwrap();
        let report = check_equipartition(&p, p.space().full_event(), f, g).unwrap();
        assert!(report.passed);
        assert_eq!(report.checked_count, 1);
        // Identical acts satisfy the hypothesis trivially.
        let r = check_equipartition(&p, p.space().full_event(), f, f).unwrap();
        assert!(r.passed && r.checked_count == 1);
    }
}
