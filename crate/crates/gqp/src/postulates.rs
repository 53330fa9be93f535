//! Decidable checks of the rationality postulates and their derived lemmas.
//!
//! Each check exhaustively instantiates a universally quantified statement
//! over the structure's events, registered acts, and consequence pairs, in
//! canonical order, and reports violations as replayable witnesses. Q4's
//! conclusion is a disjunction whose second arm is negligibility; Q5 ranges
//! over non-null events by default (a strict mode conditions on non-empty
//! events instead); Q6 is existential; Q7 synthesizes spliced acts and
//! refuses to silently narrow its quantifier when those acts are missing.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::acts::ActId;
use crate::error::{Error, Result};
use crate::report::{CheckReport, ReportBuilder, Witness};
use crate::space::{subsets_of, Event};
use crate::structure::ConditionalPreferenceStructure as Cps;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PostulateId {
    Q0,
    Q1,
    Q2,
    Q3,
    Q4,
    QPrime4,
    Q5,
    Q6,
    Q7,
    R,
}

impl PostulateId {
    pub const ALL: [PostulateId; 10] = [
        PostulateId::Q0,
        PostulateId::Q1,
        PostulateId::Q2,
        PostulateId::Q3,
        PostulateId::Q4,
        PostulateId::QPrime4,
        PostulateId::Q5,
        PostulateId::Q6,
        PostulateId::Q7,
        PostulateId::R,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            PostulateId::Q0 => "Q0",
            PostulateId::Q1 => "Q1",
            PostulateId::Q2 => "Q2",
            PostulateId::Q3 => "Q3",
            PostulateId::Q4 => "Q4",
            PostulateId::QPrime4 => "Q'4",
            PostulateId::Q5 => "Q5",
            PostulateId::Q6 => "Q6",
            PostulateId::Q7 => "Q7",
            PostulateId::R => "R",
        }
    }
}

impl fmt::Display for PostulateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PostulateId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "q0" => Ok(PostulateId::Q0),
            "q1" => Ok(PostulateId::Q1),
            "q2" => Ok(PostulateId::Q2),
            "q3" => Ok(PostulateId::Q3),
            "q4" => Ok(PostulateId::Q4),
            "q'4" | "qp4" | "q4'" => Ok(PostulateId::QPrime4),
            "q5" => Ok(PostulateId::Q5),
            "q6" => Ok(PostulateId::Q6),
            "q7" => Ok(PostulateId::Q7),
            "r" => Ok(PostulateId::R),
            other => Err(format!("unknown postulate `{other}`")),
        }
    }
}

/// The derived consequences checked by [`check_derived_lemmas`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum LemmaId {
    EquivalentSubstitution,
    EmptyEventIndifference,
    IndifferenceUnion,
    IndifferenceDecomposition,
    StrictOrNegligibleUnion,
    StrictFromUnion,
    UnionPreference,
    UnionStrictPreference,
    SureThing,
    BetExtension,
    LosingBetPreference,
}

impl LemmaId {
    pub const ALL: [LemmaId; 11] = [
        LemmaId::EquivalentSubstitution,
        LemmaId::EmptyEventIndifference,
        LemmaId::IndifferenceUnion,
        LemmaId::IndifferenceDecomposition,
        LemmaId::StrictOrNegligibleUnion,
        LemmaId::StrictFromUnion,
        LemmaId::UnionPreference,
        LemmaId::UnionStrictPreference,
        LemmaId::SureThing,
        LemmaId::BetExtension,
        LemmaId::LosingBetPreference,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            LemmaId::EquivalentSubstitution => "equivalent-acts-substitution",
            LemmaId::EmptyEventIndifference => "empty-event-indifference",
            LemmaId::IndifferenceUnion => "indifference-union",
            LemmaId::IndifferenceDecomposition => "indifference-decomposition",
            LemmaId::StrictOrNegligibleUnion => "strict-or-negligible-union",
            LemmaId::StrictFromUnion => "strict-from-union",
            LemmaId::UnionPreference => "union-preference",
            LemmaId::UnionStrictPreference => "union-strict-preference",
            LemmaId::SureThing => "sure-thing",
            LemmaId::BetExtension => "bet-extension",
            LemmaId::LosingBetPreference => "losing-bet-preference",
        }
    }
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CheckOptions {
    /// Condition Q5 on non-empty rather than non-null events.
    pub q5_nonempty: bool,
}

/// True iff every ordered act pair is related at `event`.
pub fn is_null_event(p: &Cps, event: Event) -> bool {
    p.relation_is_total_indifference(event)
}

/// True iff preferences on the disjoint union coincide exactly with the
/// preferences on `b`, for every registered act pair.
pub fn is_negligible_compared(p: &Cps, a: Event, b: Event) -> Result<bool> {
    if !a.is_disjoint_from(b) {
        return Err(Error::NotDisjoint);
    }
    Ok(p.relations_equal(a.union(b), b))
}

/// The event-independent preference relation on consequences.
///
/// Read off the non-null events, which must all agree; the degenerate
/// structure where every event is null yields the total relation.
#[derive(Debug, Clone)]
pub struct ConstantsOrder {
    count: usize,
    le: Vec<bool>,
}

impl ConstantsOrder {
    pub fn consequence_count(&self) -> usize {
        self.count
    }

    pub fn le(&self, c: u8, d: u8) -> bool {
        self.le[c as usize * self.count + d as usize]
    }

    pub fn strict(&self, d: u8, c: u8) -> bool {
        self.le(d, c) && !self.le(c, d)
    }

    /// Pairs `(lose, win)` with `lose < win`, in canonical order.
    pub fn strict_pairs(&self) -> Vec<(u8, u8)> {
        let mut out = Vec::new();
        for d in 0..self.count as u8 {
            for c in 0..self.count as u8 {
                if self.strict(d, c) {
                    out.push((d, c));
                }
            }
        }
        out
    }

    pub fn has_strict_pair(&self) -> bool {
        !self.strict_pairs().is_empty()
    }
}

pub fn constants_order(p: &Cps) -> Result<ConstantsOrder> {
    let k = p.scale().len();
    let ids: Vec<ActId> = (0..k as u8).map(|c| p.constant_id(c)).collect::<Result<_>>()?;
    let non_null: Vec<Event> = p.space().events().filter(|&e| !is_null_event(p, e)).collect();
    let mut le = vec![true; k * k];
    if non_null.is_empty() {
        return Ok(ConstantsOrder { count: k, le });
    }
    for c in 0..k {
        for d in 0..k {
            let first = p.le_ids(non_null[0], ids[c], ids[d]);
            for &e in &non_null[1..] {
                if p.le_ids(e, ids[c], ids[d]) != first {
                    return Err(Error::ConstantsDisagree {
                        c: c as u8,
                        d: d as u8,
                        event_a: non_null[0].0,
                        event_b: e.0,
                    });
                }
            }
            le[c * k + d] = first;
        }
    }
    Ok(ConstantsOrder { count: k, le })
}

pub fn check_postulate(p: &Cps, id: PostulateId) -> Result<CheckReport> {
    check_postulate_with(p, id, CheckOptions::default())
}

pub fn check_postulate_with(p: &Cps, id: PostulateId, opts: CheckOptions) -> Result<CheckReport> {
    match id {
        PostulateId::Q0 => Ok(check_q0(p)),
        PostulateId::Q1 => Ok(check_q1(p)),
        PostulateId::Q2 => Ok(check_q2(p)),
        PostulateId::Q3 => Ok(check_q3(p)),
        PostulateId::Q4 => Ok(check_q4(p, true)),
        PostulateId::QPrime4 => Ok(check_q4(p, false)),
        PostulateId::Q5 => check_q5(p, opts),
        PostulateId::Q6 => check_q6(p),
        PostulateId::Q7 => check_q7(p),
        PostulateId::R => check_r(p),
    }
}

fn check_q0(p: &Cps) -> CheckReport {
    let mut b = ReportBuilder::new(PostulateId::Q0.as_str());
    for event in p.space().events() {
        for f in p.acts().ids() {
            b.instance(p.le_ids(event, f, f), || Witness::new().event("A", event).act("f", f));
        }
    }
    b.finish()
}

fn check_q1(p: &Cps) -> CheckReport {
    let mut b = ReportBuilder::new(PostulateId::Q1.as_str());
    let n = p.acts().len();
    for event in p.space().events() {
        b.count_instances((n * n * n) as u64);
        let m = p.relation(event);
        for f in 0..n {
            for g in 0..n {
                if m.get(f, g) && !m.row_subset(f, g) {
                    for h in 0..n {
                        if m.get(g, h) && !m.get(f, h) {
                            b.violation(|| {
                                Witness::new()
                                    .event("A", event)
                                    .act("f", ActId(f))
                                    .act("g", ActId(g))
                                    .act("h", ActId(h))
                            });
                        }
                    }
                }
            }
        }
    }
    b.finish()
}

fn check_q2(p: &Cps) -> CheckReport {
    let mut b = ReportBuilder::new(PostulateId::Q2.as_str());
    for event in p.space().events() {
        for f in p.acts().ids() {
            for g in p.acts().ids() {
                let holds = p.agreement_class(event, f) != p.agreement_class(event, g)
                    || (p.le_ids(event, f, g) && p.le_ids(event, g, f));
                b.instance(holds, || Witness::new().event("A", event).act("f", f).act("g", g));
            }
        }
    }
    b.finish()
}

fn check_q3(p: &Cps) -> CheckReport {
    let mut b = ReportBuilder::new(PostulateId::Q3.as_str());
    for (a, bb) in p.space().disjoint_pairs() {
        let u = a.union(bb);
        for f in p.acts().ids() {
            for g in p.acts().ids() {
                let antecedent = p.le_ids(a, f, g) && p.le_ids(bb, f, g) && p.le_ids(bb, g, f);
                let holds = !antecedent || p.le_ids(u, f, g);
                b.instance(holds, || Witness::new().event("A", a).event("B", bb).act("f", f).act("g", g));
            }
        }
    }
    b.finish()
}

/// Q4 when `allow_negligible`, the strengthened variant otherwise.
fn check_q4(p: &Cps, allow_negligible: bool) -> CheckReport {
    let subject = if allow_negligible { PostulateId::Q4 } else { PostulateId::QPrime4 };
    let mut b = ReportBuilder::new(subject.as_str());
    for (a, bb) in p.space().disjoint_pairs() {
        let u = a.union(bb);
        let negligible = allow_negligible && p.relations_equal(u, bb);
        for f in p.acts().ids() {
            for g in p.acts().ids() {
                let antecedent = p.le_ids(u, f, g) && p.le_ids(bb, f, g) && p.le_ids(bb, g, f);
                let holds = !antecedent || p.le_ids(a, f, g) || negligible;
                b.instance(holds, || Witness::new().event("A", a).event("B", bb).act("f", f).act("g", g));
            }
        }
    }
    b.finish()
}

fn check_q5(p: &Cps, opts: CheckOptions) -> Result<CheckReport> {
    let mut b = ReportBuilder::new(PostulateId::Q5.as_str());
    if opts.q5_nonempty {
        b.note("conditioning on non-empty events (strict mode)");
    }
    let k = p.scale().len() as u8;
    let ids: Vec<ActId> = (0..k).map(|c| p.constant_id(c)).collect::<Result<_>>()?;
    let eligible: Vec<bool> = p
        .space()
        .events()
        .map(|e| if opts.q5_nonempty { !e.is_empty() } else { !is_null_event(p, e) })
        .collect();
    for c in 0..k {
        for d in 0..k {
            for a in p.space().events() {
                if !eligible[a.0 as usize] || !p.le_ids(a, ids[c as usize], ids[d as usize]) {
                    b.count_instances(p.space().event_count() as u64);
                    continue;
                }
                for e in p.space().events() {
                    b.instance(p.le_ids(e, ids[c as usize], ids[d as usize]), || {
                        Witness::new()
                            .consequence("c", c)
                            .consequence("d", d)
                            .event("A", a)
                            .event("B", e)
                    });
                }
            }
        }
    }
    Ok(b.finish())
}

fn check_q6(p: &Cps) -> Result<CheckReport> {
    let order = constants_order(p)?;
    let mut b = ReportBuilder::new(PostulateId::Q6.as_str());
    b.count_instances((order.consequence_count() * order.consequence_count()) as u64);
    if !order.has_strict_pair() {
        b.violation(|| {
            Witness::new().noted("no pair of constants is strictly ordered; the constants relation has no strict part")
        });
    }
    Ok(b.finish())
}

/// Bitset of acts whose restriction to `event` is the constant `c`; every
/// act qualifies on the empty event.
fn acts_constant_on(p: &Cps, event: Event, c: u8) -> Vec<u64> {
    let n = p.acts().len();
    let mut bits = vec![0u64; n.div_ceil(64)];
    for (id, act) in p.acts().iter() {
        if event.states().take_while(|&s| s < act.len()).all(|s| act.value_at(s) == c) {
            bits[id.0 / 64] |= 1 << (id.0 % 64);
        }
    }
    bits
}

fn iter_bits(bits: &[u64]) -> impl Iterator<Item = usize> + '_ {
    bits.iter().enumerate().flat_map(|(w, &word)| {
        (0..64).filter(move |b| word >> b & 1 != 0).map(move |b| w * 64 + b)
    })
}

/// Lookup table of `act overwritten to c on event`, built once per check.
struct SpliceTable {
    n_events: usize,
    k: usize,
    ids: Vec<Option<ActId>>,
}

impl SpliceTable {
    fn build(p: &Cps) -> SpliceTable {
        let n_events = p.space().event_count();
        let k = p.scale().len();
        let mut ids = Vec::with_capacity(p.acts().len() * n_events * k);
        for (_, act) in p.acts().iter() {
            for event in p.space().events() {
                for c in 0..k as u8 {
                    ids.push(p.acts().id_of(&act.overwritten(event, c)));
                }
            }
        }
        SpliceTable { n_events, k, ids }
    }

    fn get(&self, f: ActId, event: Event, c: u8) -> Result<ActId> {
        self.ids[(f.0 * self.n_events + event.0 as usize) * self.k + c as usize]
            .ok_or(Error::MissingSplicedAct)
    }
}

fn check_q7(p: &Cps) -> Result<CheckReport> {
    let mut b = ReportBuilder::new(PostulateId::Q7.as_str());
    let k = p.scale().len() as u8;
    let splices = SpliceTable::build(p);
    for (a, bb) in p.space().disjoint_pairs() {
        let u = a.union(bb);
        let rest_mask = p.space().complement(u);
        for c in 0..k {
            for d in 0..k {
                let w_a = p.two_valued_id(a, c, d)?;
                let w_b = p.two_valued_id(bb, c, d)?;
                if !p.le_ids(u, w_a, w_b) {
                    continue;
                }
                let f_pool = acts_constant_on(p, a, d);
                let g_pool = acts_constant_on(p, bb, d);
                for rest in subsets_of(rest_mask) {
                    let dd = u.union(rest);
                    for f in iter_bits(&f_pool) {
                        let f = ActId(f);
                        for g in iter_bits(&g_pool) {
                            let g = ActId(g);
                            if !p.le_ids(dd, f, g) {
                                b.count_instances(1);
                                continue;
                            }
                            let f2 = splices.get(f, a, c)?;
                            let g2 = splices.get(g, bb, c)?;
                            b.instance(p.le_ids(dd, f2, g2), || {
                                Witness::new()
                                    .event("A", a)
                                    .event("B", bb)
                                    .event("D", dd)
                                    .consequence("c", c)
                                    .consequence("d", d)
                                    .act("f", f)
                                    .act("g", g)
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(b.finish())
}

fn check_r(p: &Cps) -> Result<CheckReport> {
    let order = constants_order(p)?;
    let strict = order.strict_pairs();
    let mut b = ReportBuilder::new(PostulateId::R.as_str());
    let mut disjoint_violations = 0u64;
    for a in p.space().events() {
        for e in p.space().events() {
            let u = a.union(e);
            for &(d, c) in &strict {
                if !p.le_ids(u, p.two_valued_id(a, c, d)?, p.two_valued_id(e, c, d)?) {
                    continue;
                }
                for &(d2, c2) in &strict {
                    let holds =
                        p.le_ids(u, p.two_valued_id(a, c2, d2)?, p.two_valued_id(e, c2, d2)?);
                    if !holds && a.is_disjoint_from(e) {
                        disjoint_violations += 1;
                    }
                    b.instance(holds, || {
                        Witness::new()
                            .event("A", a)
                            .event("B", e)
                            .consequence("c", c)
                            .consequence("d", d)
                            .consequence("c'", c2)
                            .consequence("d'", d2)
                    });
                }
            }
        }
    }
    if strict.is_empty() {
        b.note("no strict constant pair; the statement is vacuous");
    }
    b.note(if disjoint_violations == 0 {
        "disjoint-events restriction: PASS".to_string()
    } else {
        format!("disjoint-events restriction: FAIL ({disjoint_violations} violations)")
    });
    Ok(b.finish())
}

/// Runs all eleven derived-consequence checks, exhaustively instantiated.
pub fn check_derived_lemmas(p: &Cps) -> Result<Vec<CheckReport>> {
    LemmaId::ALL.iter().map(|&id| check_derived_lemma(p, id)).collect()
}

pub fn check_derived_lemma(p: &Cps, id: LemmaId) -> Result<CheckReport> {
    match id {
        LemmaId::EquivalentSubstitution => Ok(check_equivalent_substitution(p)),
        LemmaId::EmptyEventIndifference => Ok(check_empty_event(p)),
        LemmaId::IndifferenceUnion => Ok(check_pairwise(p, id)),
        LemmaId::IndifferenceDecomposition => Ok(check_pairwise(p, id)),
        LemmaId::StrictOrNegligibleUnion => Ok(check_pairwise(p, id)),
        LemmaId::StrictFromUnion => Ok(check_pairwise(p, id)),
        LemmaId::UnionPreference => Ok(check_pairwise(p, id)),
        LemmaId::UnionStrictPreference => Ok(check_pairwise(p, id)),
        LemmaId::SureThing => Ok(check_sure_thing(p)),
        LemmaId::BetExtension => check_bet_extension(p),
        LemmaId::LosingBetPreference => check_losing_bet(p),
    }
}

fn check_equivalent_substitution(p: &Cps) -> CheckReport {
    let mut b = ReportBuilder::new(LemmaId::EquivalentSubstitution.as_str());
    for event in p.space().events() {
        let n_cls = p.agreement_class_count(event);
        // First decision seen for each agreement-class pair; any later
        // disagreement yields a witness quadruple.
        let mut seen: Vec<Option<(bool, ActId, ActId)>> = vec![None; n_cls * n_cls];
        for f in p.acts().ids() {
            for g in p.acts().ids() {
                let key = p.agreement_class(event, f) as usize * n_cls
                    + p.agreement_class(event, g) as usize;
                let le = p.le_ids(event, f, g);
                match seen[key] {
                    None => {
                        seen[key] = Some((le, f, g));
                        b.instance(true, Witness::new);
                    }
                    Some((first, f0, g0)) => {
                        let (held, failed) = if first { ((f0, g0), (f, g)) } else { ((f, g), (f0, g0)) };
                        b.instance(le == first, || {
                            Witness::new()
                                .event("A", event)
                                .act("f", held.0)
                                .act("g", held.1)
                                .act("f'", failed.0)
                                .act("g'", failed.1)
                        });
                    }
                }
            }
        }
    }
    b.finish()
}

fn check_empty_event(p: &Cps) -> CheckReport {
    let mut b = ReportBuilder::new(LemmaId::EmptyEventIndifference.as_str());
    for h in p.acts().ids() {
        for h2 in p.acts().ids() {
            b.instance(p.le_ids(Event::EMPTY, h, h2), || Witness::new().act("h", h).act("h'", h2));
        }
    }
    b.finish()
}

/// The disjoint-pair lemmas that quantify over (A, B, f, g).
fn check_pairwise(p: &Cps, id: LemmaId) -> CheckReport {
    let mut b = ReportBuilder::new(id.as_str());
    for (a, bb) in p.space().disjoint_pairs() {
        let u = a.union(bb);
        let negligible = p.relations_equal(u, bb);
        for f in p.acts().ids() {
            for g in p.acts().ids() {
                let holds = pairwise_instance_holds(p, id, a, bb, u, negligible, f, g);
                b.instance(holds, || Witness::new().event("A", a).event("B", bb).act("f", f).act("g", g));
            }
        }
    }
    b.finish()
}

#[allow(clippy::too_many_arguments)]
fn pairwise_instance_holds(
    p: &Cps,
    id: LemmaId,
    a: Event,
    bb: Event,
    u: Event,
    negligible: bool,
    f: ActId,
    g: ActId,
) -> bool {
    let indiff = |e: Event| p.le_ids(e, f, g) && p.le_ids(e, g, f);
    let strict = |e: Event| p.le_ids(e, f, g) && !p.le_ids(e, g, f);
    match id {
        LemmaId::IndifferenceUnion => !(indiff(a) && indiff(bb)) || indiff(u),
        LemmaId::IndifferenceDecomposition => {
            !(indiff(u) && indiff(bb)) || indiff(a) || negligible
        }
        LemmaId::StrictOrNegligibleUnion => {
            !(strict(a) && indiff(bb)) || strict(u) || (negligible && indiff(u))
        }
        LemmaId::StrictFromUnion => !(strict(u) && indiff(bb)) || strict(a),
        LemmaId::UnionPreference => {
            !(p.le_ids(a, f, g) && p.le_ids(bb, f, g)) || p.le_ids(u, f, g)
        }
        LemmaId::UnionStrictPreference => !(strict(a) && strict(bb)) || strict(u),
        _ => unreachable!("not a pairwise lemma"),
    }
}

fn check_sure_thing(p: &Cps) -> CheckReport {
    let mut b = ReportBuilder::new(LemmaId::SureThing.as_str());
    for (a, bb) in p.space().disjoint_pairs() {
        let u = a.union(bb);
        let n_cls = p.agreement_class_count(a);
        // Over pairs agreeing on B, the union decision may only depend on
        // the two restrictions to A.
        let mut seen: Vec<Option<(bool, ActId, ActId)>> = vec![None; n_cls * n_cls];
        for f in p.acts().ids() {
            for g in p.acts().ids() {
                if p.agreement_class(bb, f) != p.agreement_class(bb, g) {
                    b.instance(true, Witness::new);
                    continue;
                }
                let key = p.agreement_class(a, f) as usize * n_cls
                    + p.agreement_class(a, g) as usize;
                let le = p.le_ids(u, f, g);
                match seen[key] {
                    None => {
                        seen[key] = Some((le, f, g));
                        b.instance(true, Witness::new);
                    }
                    Some((first, f0, g0)) => {
                        let (held, failed) = if first { ((f0, g0), (f, g)) } else { ((f, g), (f0, g0)) };
                        b.instance(le == first, || {
                            Witness::new()
                                .event("A", a)
                                .event("B", bb)
                                .act("f", held.0)
                                .act("g", held.1)
                                .act("f'", failed.0)
                                .act("g'", failed.1)
                        });
                    }
                }
            }
        }
    }
    b.finish()
}

fn check_bet_extension(p: &Cps) -> Result<CheckReport> {
    let mut b = ReportBuilder::new(LemmaId::BetExtension.as_str());
    let k = p.scale().len() as u8;
    for a in p.space().events() {
        for e in p.space().events() {
            let u = a.union(e);
            let rest_mask = p.space().complement(u);
            for c in 0..k {
                for d in 0..k {
                    let w_a = p.two_valued_id(a, c, d)?;
                    let w_b = p.two_valued_id(e, c, d)?;
                    let gate = p.le_ids(u, w_a, w_b);
                    for rest in subsets_of(rest_mask) {
                        let dd = u.union(rest);
                        b.instance(!gate || p.le_ids(dd, w_a, w_b), || {
                            Witness::new()
                                .event("A", a)
                                .event("B", e)
                                .event("D", dd)
                                .consequence("c", c)
                                .consequence("d", d)
                        });
                    }
                }
            }
        }
    }
    Ok(b.finish())
}

fn check_losing_bet(p: &Cps) -> Result<CheckReport> {
    let order = constants_order(p)?;
    let plausibility = crate::plausibility::derive_plausibility(p)?;
    let mut b = ReportBuilder::new(LemmaId::LosingBetPreference.as_str());
    let k = p.scale().len() as u8;
    for a in p.space().events() {
        for e in p.space().events() {
            if !plausibility.le(a, e) {
                b.count_instances((k as u64) * (k as u64));
                continue;
            }
            let u = a.union(e);
            for c in 0..k {
                for d in 0..k {
                    if !order.le(c, d) {
                        b.count_instances(1);
                        continue;
                    }
                    let w_b = p.two_valued_id(e, c, d)?;
                    let w_a = p.two_valued_id(a, c, d)?;
                    b.instance(p.le_ids(u, w_b, w_a), || {
                        Witness::new()
                            .event("A", a)
                            .event("B", e)
                            .consequence("c", c)
                            .consequence("d", d)
                    });
                }
            }
        }
    }
    Ok(b.finish())
}

/// Re-evaluates a postulate witness; `true` means the violation reproduces.
pub fn replay_postulate(p: &Cps, id: PostulateId, w: &Witness, opts: CheckOptions) -> Result<bool> {
    let ev = |name: &str| w.get_event(name).ok_or(Error::UnregisteredAct);
    let act = |name: &str| w.get_act(name).ok_or(Error::UnregisteredAct);
    let cons = |name: &str| w.get_consequence(name).ok_or(Error::UnregisteredAct);
    Ok(match id {
        PostulateId::Q0 => !p.le_ids(ev("A")?, act("f")?, act("f")?),
        PostulateId::Q1 => {
            let (a, f, g, h) = (ev("A")?, act("f")?, act("g")?, act("h")?);
            p.le_ids(a, f, g) && p.le_ids(a, g, h) && !p.le_ids(a, f, h)
        }
        PostulateId::Q2 => {
            let (a, f, g) = (ev("A")?, act("f")?, act("g")?);
            p.agreement_class(a, f) == p.agreement_class(a, g)
                && !(p.le_ids(a, f, g) && p.le_ids(a, g, f))
        }
        PostulateId::Q3 => {
            let (a, bb, f, g) = (ev("A")?, ev("B")?, act("f")?, act("g")?);
            let u = a.union(bb);
            a.is_disjoint_from(bb)
                && p.le_ids(a, f, g)
                && p.le_ids(bb, f, g)
                && p.le_ids(bb, g, f)
                && !p.le_ids(u, f, g)
        }
        PostulateId::Q4 | PostulateId::QPrime4 => {
            let (a, bb, f, g) = (ev("A")?, ev("B")?, act("f")?, act("g")?);
            let u = a.union(bb);
            let escape = id == PostulateId::Q4 && is_negligible_compared(p, a, bb)?;
            a.is_disjoint_from(bb)
                && p.le_ids(u, f, g)
                && p.le_ids(bb, f, g)
                && p.le_ids(bb, g, f)
                && !p.le_ids(a, f, g)
                && !escape
        }
        PostulateId::Q5 => {
            let (c, d, a, e) = (cons("c")?, cons("d")?, ev("A")?, ev("B")?);
            let (cid, did) = (p.constant_id(c)?, p.constant_id(d)?);
            let eligible = if opts.q5_nonempty { !a.is_empty() } else { !is_null_event(p, a) };
            eligible && p.le_ids(a, cid, did) && !p.le_ids(e, cid, did)
        }
        PostulateId::Q6 => !constants_order(p)?.has_strict_pair(),
        PostulateId::Q7 => {
            let (a, bb, dd) = (ev("A")?, ev("B")?, ev("D")?);
            let (c, d) = (cons("c")?, cons("d")?);
            let (f, g) = (act("f")?, act("g")?);
            let u = a.union(bb);
            let w_a = p.two_valued_id(a, c, d)?;
            let w_b = p.two_valued_id(bb, c, d)?;
            let f_act = p.acts().get(f).clone();
            let g_act = p.acts().get(g).clone();
            let f2 = p.act_id(&f_act.overwritten(a, c))?;
            let g2 = p.act_id(&g_act.overwritten(bb, c))?;
            let f_shape = a.states().all(|s| f_act.value_at(s) == d);
            let g_shape = bb.states().all(|s| g_act.value_at(s) == d);
            a.is_disjoint_from(bb)
                && u.is_subset_of(dd)
                && p.le_ids(u, w_a, w_b)
                && f_shape
                && g_shape
                && p.le_ids(dd, f, g)
                && !p.le_ids(dd, f2, g2)
        }
        PostulateId::R => {
            let (a, e) = (ev("A")?, ev("B")?);
            let (c, d) = (cons("c")?, cons("d")?);
            let (c2, d2) = (cons("c'")?, cons("d'")?);
            let order = constants_order(p)?;
            let u = a.union(e);
            order.strict(d, c)
                && order.strict(d2, c2)
                && p.le_ids(u, p.two_valued_id(a, c, d)?, p.two_valued_id(e, c, d)?)
                && !p.le_ids(u, p.two_valued_id(a, c2, d2)?, p.two_valued_id(e, c2, d2)?)
        }
    })
}

/// Re-evaluates a derived-lemma witness; `true` means the violation
/// reproduces.
pub fn replay_lemma(p: &Cps, id: LemmaId, w: &Witness) -> Result<bool> {
    let ev = |name: &str| w.get_event(name).ok_or(Error::UnregisteredAct);
    let act = |name: &str| w.get_act(name).ok_or(Error::UnregisteredAct);
    let cons = |name: &str| w.get_consequence(name).ok_or(Error::UnregisteredAct);
    Ok(match id {
        LemmaId::EquivalentSubstitution => {
            let a = ev("A")?;
            let (f, g, f2, g2) = (act("f")?, act("g")?, act("f'")?, act("g'")?);
            p.agreement_class(a, f) == p.agreement_class(a, f2)
                && p.agreement_class(a, g) == p.agreement_class(a, g2)
                && p.le_ids(a, f, g)
                && !p.le_ids(a, f2, g2)
        }
        LemmaId::EmptyEventIndifference => {
            !p.le_ids(Event::EMPTY, act("h")?, act("h'")?)
        }
        LemmaId::IndifferenceUnion
        | LemmaId::IndifferenceDecomposition
        | LemmaId::StrictOrNegligibleUnion
        | LemmaId::StrictFromUnion
        | LemmaId::UnionPreference
        | LemmaId::UnionStrictPreference => {
            let (a, bb, f, g) = (ev("A")?, ev("B")?, act("f")?, act("g")?);
            let u = a.union(bb);
            let negligible = is_negligible_compared(p, a, bb)?;
            !pairwise_instance_holds(p, id, a, bb, u, negligible, f, g)
        }
        LemmaId::SureThing => {
            let (a, bb) = (ev("A")?, ev("B")?);
            let (f, g, f2, g2) = (act("f")?, act("g")?, act("f'")?, act("g'")?);
            let u = a.union(bb);
            a.is_disjoint_from(bb)
                && p.agreement_class(a, f) == p.agreement_class(a, f2)
                && p.agreement_class(a, g) == p.agreement_class(a, g2)
                && p.agreement_class(bb, f) == p.agreement_class(bb, g)
                && p.agreement_class(bb, f2) == p.agreement_class(bb, g2)
                && p.le_ids(u, f, g)
                && !p.le_ids(u, f2, g2)
        }
        LemmaId::BetExtension => {
            let (a, e, dd) = (ev("A")?, ev("B")?, ev("D")?);
            let (c, d) = (cons("c")?, cons("d")?);
            let u = a.union(e);
            let w_a = p.two_valued_id(a, c, d)?;
            let w_b = p.two_valued_id(e, c, d)?;
            u.is_subset_of(dd) && p.le_ids(u, w_a, w_b) && !p.le_ids(dd, w_a, w_b)
        }
        LemmaId::LosingBetPreference => {
            let (a, e) = (ev("A")?, ev("B")?);
            let (c, d) = (cons("c")?, cons("d")?);
            let order = constants_order(p)?;
            let plausibility = crate::plausibility::derive_plausibility(p)?;
            let u = a.union(e);
            plausibility.le(a, e)
                && order.le(c, d)
                && !p.le_ids(u, p.two_valued_id(e, c, d)?, p.two_valued_id(a, c, d)?)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acts::{Act, ActSet, ConsequenceScale};
    use crate::space::StateSpace;
    use crate::structure::{saturate, PairClass, StructureBuilder};

    fn one_state() -> (StateSpace, ConsequenceScale, ActSet) {
        let space = StateSpace::new(["a"]).unwrap();
        let scale = ConsequenceScale::new(["lo", "mid", "hi"]).unwrap();
        let acts = ActSet::enumerate_all(&space, &scale, 100).unwrap();
        (space, scale, acts)
    }

    #[test]
    fn broken_transitivity_yields_the_expected_witness() {
        let (space, scale, acts) = one_state();
        let s = space.full_event();
        let lo = acts.id_of(&Act::constant(1, 0)).unwrap();
        let mid = acts.id_of(&Act::constant(1, 1)).unwrap();
        let hi = acts.id_of(&Act::constant(1, 2)).unwrap();
        let mut b = StructureBuilder::new(space, scale, acts).unwrap();
        b.add_pair(s, lo, hi);
        b.add_pair(s, hi, mid);
        b.close_preorder();
        b.remove_pair(s, lo, mid);
        let p = b.build();

        let report = check_postulate(&p, PostulateId::Q1).unwrap();
        assert!(!report.passed);
        let w = &report.witnesses[0];
        assert_eq!(w.get_event("A"), Some(s));
        assert_eq!(w.get_act("f"), Some(lo));
        assert_eq!(w.get_act("g"), Some(hi));
        assert_eq!(w.get_act("h"), Some(mid));
        assert!(replay_postulate(&p, PostulateId::Q1, w, CheckOptions::default()).unwrap());
    }

    #[test]
    fn saturated_structures_pass_the_preorder_postulates() {
        let (space, scale, acts) = one_state();
        let s = space.full_event();
        let lo = acts.id_of(&Act::constant(1, 0)).unwrap();
        let hi = acts.id_of(&Act::constant(1, 2)).unwrap();
        let p = saturate(space, scale, acts, &[(s, lo, hi)]).unwrap();
        for id in [PostulateId::Q0, PostulateId::Q1, PostulateId::Q2] {
            let r = check_postulate(&p, id).unwrap();
            assert!(r.passed, "{} failed: {:?}", r.subject, r.witnesses);
        }
        // Q2 implying Q0 is visible here: both pass on any saturated output.
    }

    #[test]
    fn empty_event_relates_everything_and_is_null() {
        let (space, scale, acts) = one_state();
        let p = saturate(space, scale, acts, &[]).unwrap();
        assert!(is_null_event(&p, Event::EMPTY));
        for f in p.acts().ids() {
            for g in p.acts().ids() {
                assert_eq!(p.classify_ids(Event::EMPTY, f, g), PairClass::Indifferent);
            }
        }
        let r = check_derived_lemma(&p, LemmaId::EmptyEventIndifference).unwrap();
        assert!(r.passed);
    }

    #[test]
    fn negligibility_requires_disjoint_events() {
        let (space, scale, acts) = one_state();
        let p = saturate(space, scale, acts, &[]).unwrap();
        let s = p.space().full_event();
        assert!(matches!(is_negligible_compared(&p, s, s), Err(Error::NotDisjoint)));
        assert!(is_negligible_compared(&p, Event::EMPTY, s).unwrap());
    }

    #[test]
    fn all_null_structure_has_total_constants_order() {
        let (space, scale, acts) = one_state();
        let mut b = StructureBuilder::new(space, scale, acts).unwrap();
        for e in [Event::EMPTY, Event(1)] {
            b.set_relation_from(e, |_, _| true);
        }
        let p = b.build();
        let order = constants_order(&p).unwrap();
        assert!(order.le(0, 2) && order.le(2, 0));
        assert!(!order.has_strict_pair());
        let q6 = check_postulate(&p, PostulateId::Q6).unwrap();
        assert!(!q6.passed);
        assert!(replay_postulate(&p, PostulateId::Q6, &q6.witnesses[0], CheckOptions::default()).unwrap());
    }

    #[test]
    fn null_and_negligibility_on_the_concrete_models() {
        use crate::hyperreal::rat;
        use crate::models::{expectation_structure, ranked_structure, ProbabilityModel, RankedModel};
        let scale =
            ConsequenceScale::with_values(["z", "o"], vec![rat(0, 1), rat(1, 1)]).unwrap();

        let space = StateSpace::new(["a", "b", "c"]).unwrap();
        let m = ProbabilityModel::standard(space.clone(), vec![rat(1, 3); 3]).unwrap();
        let uniform = expectation_structure(&m, &scale).unwrap();
        assert!(!is_null_event(&uniform, Event(0b001)));
        assert!(!is_negligible_compared(&uniform, Event(0b001), Event(0b010)).unwrap());

        let ranked = RankedModel::new(space, vec![0, 1, 2]).unwrap();
        let ranked = ranked_structure(&ranked, &scale).unwrap();
        // Preferences on {a,c} and on {c} both look at state c only.
        assert!(is_negligible_compared(&ranked, Event(0b001), Event(0b100)).unwrap());
    }

    #[test]
    fn constants_order_reads_off_the_value_order() {
        use crate::hyperreal::rat;
        use crate::models::{expectation_structure, ranked_structure, ProbabilityModel, RankedModel};
        let scale = ConsequenceScale::with_values(
            ["z", "h", "o"],
            vec![rat(0, 1), rat(1, 2), rat(1, 1)],
        )
        .unwrap();
        let space = StateSpace::new(["a", "b"]).unwrap();
        let m = ProbabilityModel::standard(space.clone(), vec![rat(1, 2), rat(1, 2)]).unwrap();
        let p = expectation_structure(&m, &scale).unwrap();
        let order = constants_order(&p).unwrap();
        assert!(order.strict(0, 1) && order.strict(1, 2) && order.strict(0, 2));
        assert!(!order.strict(2, 1));

        let ranked = RankedModel::new(space, vec![0, 1]).unwrap();
        let p = ranked_structure(&ranked, &scale).unwrap();
        let order = constants_order(&p).unwrap();
        assert_eq!(order.strict_pairs(), vec![(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn negligible_union_matches_part_exactly() {
        // When preferences on the union coincide with those on B, both the
        // indifference and the strict classification must coincide as well.
        let (space, scale, acts) = one_state();
        let p = saturate(space, scale, acts, &[]).unwrap();
        let s = p.space().full_event();
        if is_negligible_compared(&p, Event::EMPTY, s).unwrap() {
            for f in p.acts().ids() {
                for g in p.acts().ids() {
                    assert_eq!(p.classify_ids(s, f, g), p.classify_ids(Event::EMPTY.union(s), f, g));
                }
            }
        }
    }
}
