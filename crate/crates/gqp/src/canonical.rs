//! From event relations back to preferences: the two-valued canonical
//! construction and its round trip, complete enumeration of total
//! extensions, the extension-intersection check, and a bounded search for
//! structures that falsify the equal-partition indifference statement
//! without the splice postulate.

use num::{BigRational, One, Zero};
use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};
use serde::Serialize;

use crate::acts::{ActId, ActSet, ConsequenceScale};
use crate::error::{Error, Result};
use crate::plausibility::{
    check_gqp, derive_plausibility, equipartition_hypothesis, EventRelation,
};
use crate::postulates::{check_postulate, PostulateId};
use crate::report::{CheckReport, ReportBuilder, Witness};
use crate::space::{Event, StateSpace};
use crate::structure::{ConditionalPreferenceStructure as Cps, StructureBuilder};

/// Extension enumeration is exhaustive, so the event count stays tiny.
pub const MAX_EXTENSION_EVENTS: usize = 16;

fn require_gqp(r: &EventRelation) -> Result<()> {
    let report = check_gqp(r);
    if !report.passed {
        return Err(Error::NotAGqp(format!(
            "{} axiom violations, first: {:?}",
            report.violation_count,
            report.witnesses.first().map(|w| &w.bindings)
        )));
    }
    Ok(())
}

/// Builds the two-consequence preference structure whose acts are the bets
/// `w_A` (pay high on A, low elsewhere), with `w_A <= w_B` at D iff `D∩A` is
/// negligible w.r.t. D or `A∩D` is not more plausible than `B∩D`.
pub fn canonical_structure(r: &EventRelation) -> Result<Cps> {
    require_gqp(r)?;
    let space = r.space().clone();
    let scale = ConsequenceScale::with_values(
        ["low", "high"],
        vec![BigRational::zero(), BigRational::one()],
    )?;
    let acts = ActSet::enumerate_all(&space, &scale, 1 << space.len())?;
    let high_event: Vec<Event> = acts
        .iter()
        .map(|(_, act)| {
            Event::from_indices((0..space.len()).filter(|&s| act.value_at(s) == 1))
        })
        .collect();
    let mut b = StructureBuilder::new(space.clone(), scale, acts)?;
    for d in space.events() {
        b.set_relation_from(d, |f, g| {
            let a = high_event[f.0].intersection(d);
            let e = high_event[g.0].intersection(d);
            r.is_negligible(a, d) || r.le(a, e)
        });
    }
    Ok(b.build())
}

/// Round trip: deriving plausibility from the canonical structure must give
/// back exactly the input relation.
pub fn roundtrip_check(r: &EventRelation) -> Result<CheckReport> {
    let p = canonical_structure(r)?;
    let derived = derive_plausibility(&p)?;
    let mut b = ReportBuilder::new("canonical-roundtrip");
    for a in r.events() {
        for e in r.events() {
            let holds = r.le(a, e) == derived.le(a, e);
            b.instance(holds, || {
                let note = if r.le(a, e) { "pair lost by the round trip" } else { "pair invented by the round trip" };
                Witness::new().event("A", a).event("B", e).noted(note)
            });
        }
    }
    Ok(b.finish())
}

/// A base relation together with every total extension found for it.
#[derive(Debug, Clone)]
pub struct ExtensionSet {
    pub base: EventRelation,
    pub extensions: Vec<EventRelation>,
}

struct ExtensionSearch {
    n_events: usize,
    universe: u64,
    found: Vec<Vec<u64>>,
}

impl ExtensionSearch {
    /// Constraint propagation over present (`w`) and excluded (`neg`)
    /// pairs. Sound: only adds pairs forced in (or excluded from) every
    /// total extension compatible with the current state. Returns false on
    /// contradiction.
    #[allow(clippy::needless_range_loop)]
    fn propagate(&self, w: &mut [u64], neg: &mut [u64]) -> bool {
        loop {
            let mut changed = false;
            let n = self.n_events;
            // Transitive closure and its contrapositives.
            for a in 0..n {
                let mut row = w[a];
                while row != 0 {
                    let b = row.trailing_zeros() as usize;
                    row &= row - 1;
                    let add = w[b] & !w[a];
                    if add != 0 {
                        w[a] |= add;
                        changed = true;
                    }
                    // a<=b present and a<=c excluded force b<=c excluded.
                    let exclude = neg[a] & !neg[b];
                    if exclude != 0 {
                        neg[b] |= exclude;
                        changed = true;
                    }
                }
            }
            for a in 0..n {
                let mut row = neg[a];
                while row != 0 {
                    let c = row.trailing_zeros() as usize;
                    row &= row - 1;
                    for b in 0..n {
                        // b<=c present and a<=c excluded force a<=b excluded.
                        if w[b] >> c & 1 != 0 && neg[a] >> b & 1 == 0 {
                            neg[a] |= 1 << b;
                            changed = true;
                        }
                    }
                }
            }
            // Union monotonicity and cancellation, with contrapositives.
            // Event indices are state bitmasks, so the full state mask is
            // n - 1 and the admissible d values are its submasks avoiding
            // a and b.
            let full_states = n as u32 - 1;
            for a in 0..n as u32 {
                for b in 0..n as u32 {
                    let free = !(a | b) & full_states;
                    let mut d = free;
                    loop {
                        let (au, bu) = ((a | d) as usize, (b | d) as usize);
                        let dbu = (d | b) as usize;
                        if w[a as usize] >> b & 1 != 0 && w[au] >> bu & 1 == 0 {
                            w[au] |= 1 << bu;
                            changed = true;
                        }
                        if neg[au] >> bu & 1 != 0 && neg[a as usize] >> b & 1 == 0 {
                            neg[a as usize] |= 1 << b;
                            changed = true;
                        }
                        if w[au] >> bu & 1 != 0 {
                            if neg[dbu] >> d & 1 != 0 && w[a as usize] >> b & 1 == 0 {
                                // union holds, the side condition is
                                // excluded: cancellation forces a<=b.
                                w[a as usize] |= 1 << b;
                                changed = true;
                            }
                            if neg[a as usize] >> b & 1 != 0 && w[dbu] >> d & 1 == 0 {
                                w[dbu] |= 1 << d;
                                changed = true;
                            }
                        }
                        if neg[a as usize] >> b & 1 != 0
                            && neg[dbu] >> d & 1 != 0
                            && neg[au] >> bu & 1 == 0
                        {
                            neg[au] |= 1 << bu;
                            changed = true;
                        }
                        if d == 0 {
                            break;
                        }
                        d = (d - 1) & free;
                    }
                }
            }
            // Absorption: disjoint a,b with a<=b and a∪b<=a force b<=∅.
            for a in 0..n as u32 {
                for b in 0..n as u32 {
                    if a & b != 0 {
                        continue;
                    }
                    let u = (a | b) as usize;
                    let (ai, bi) = (a as usize, b as usize);
                    if w[ai] >> b & 1 != 0 && w[u] >> a & 1 != 0 && w[bi] & 1 == 0 {
                        w[bi] |= 1;
                        changed = true;
                    }
                    if neg[bi] & 1 != 0 {
                        if w[ai] >> b & 1 != 0 && neg[u] >> a & 1 == 0 {
                            neg[u] |= 1 << a;
                            changed = true;
                        }
                        if w[u] >> a & 1 != 0 && neg[ai] >> b & 1 == 0 {
                            neg[ai] |= 1 << b;
                            changed = true;
                        }
                    }
                }
            }
            // Contradictions: a pair both present and excluded, or a pair
            // excluded in both directions (totality impossible).
            for a in 0..n {
                if w[a] & neg[a] != 0 {
                    return false;
                }
                for b in 0..n {
                    if neg[a] >> b & 1 != 0 && neg[b] >> a & 1 != 0 {
                        return false;
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn search(&mut self, w: &[u64], neg: &[u64]) {
        let n = self.n_events;
        let undecided = (0..n).find_map(|a| {
            let open = !(w[a] | neg[a]) & self.universe;
            (open != 0).then(|| (a, open.trailing_zeros() as usize))
        });
        match undecided {
            None => self.found.push(w.to_vec()),
            Some((a, b)) => {
                let mut w1 = w.to_vec();
                let mut n1 = neg.to_vec();
                w1[a] |= 1 << b;
                if self.propagate(&mut w1, &mut n1) {
                    self.search(&w1, &n1);
                }
                let mut w2 = w.to_vec();
                let mut n2 = neg.to_vec();
                n2[a] |= 1 << b;
                if self.propagate(&mut w2, &mut n2) {
                    self.search(&w2, &n2);
                }
            }
        }
    }
}

/// Enumerates every total generalized qualitative probability extending the
/// base: a superset of its pairs that keeps every strict pair strict, is
/// total, and passes the axioms. Complete within the event-count guard.
pub fn enumerate_total_extensions(r: &EventRelation) -> Result<ExtensionSet> {
    require_gqp(r)?;
    let n_events = r.event_count();
    if n_events > MAX_EXTENSION_EVENTS {
        return Err(Error::TooManyEvents { got: n_events, max: MAX_EXTENSION_EVENTS });
    }
    let universe = if n_events == 64 { u64::MAX } else { (1u64 << n_events) - 1 };
    let mut w: Vec<u64> = r.rows().to_vec();
    let mut neg = vec![0u64; n_events];
    for a in 0..n_events {
        for b in 0..n_events {
            if w[a] >> b & 1 != 0 && w[b] >> a & 1 == 0 {
                neg[b] |= 1 << a;
            }
        }
    }
    let mut s = ExtensionSearch { n_events, universe, found: Vec::new() };
    if s.propagate(&mut w, &mut neg) {
        let w0 = w.clone();
        let n0 = neg.clone();
        s.search(&w0, &n0);
    }
    let mut extensions: Vec<EventRelation> = s
        .found
        .into_iter()
        .map(|rows| EventRelation::from_rows(r.space().clone(), rows))
        .filter(|ext| {
            // The propagation already enforces the axioms; this is a cheap
            // final safety net.
            ext.is_total() && ext.contains(r) && check_gqp(ext).passed
        })
        .collect();
    extensions.sort_by(|a, b| a.rows().cmp(b.rows()));
    Ok(ExtensionSet { base: r.clone(), extensions })
}

/// Intersects all total extensions and reports whether the intersection is
/// exactly the base relation. Having no extensions at all is reported as a
/// distinct failing outcome, never silently.
pub fn conjecture_check(r: &EventRelation) -> Result<CheckReport> {
    let ext = enumerate_total_extensions(r)?;
    let mut b = ReportBuilder::new("total-extension-intersection");
    b.note(format!("total extensions found: {}", ext.extensions.len()));
    if ext.extensions.is_empty() {
        b.count_instances(1);
        b.violation(|| Witness::new().noted("no total extensions exist"));
        return Ok(b.finish());
    }
    let n_events = r.event_count();
    let mut inter = vec![u64::MAX; n_events];
    for e in &ext.extensions {
        for (i, row) in e.rows().iter().enumerate() {
            inter[i] &= row;
        }
    }
    for a in r.events() {
        for e in r.events() {
            let in_inter = inter[a.0 as usize] >> e.0 & 1 != 0;
            b.instance(in_inter == r.le(a, e), || {
                Witness::new().event("A", a).event("B", e).noted(
                    "pair present in every total extension but absent from the base",
                )
            });
        }
    }
    Ok(b.finish())
}

/// Size bounds for the counterexample search.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SearchBounds {
    pub n_states: usize,
    pub n_consequences: usize,
}

#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    Exhaustive,
    Sampled { seed: u64, samples: u64 },
}

/// A structure passing the core postulates on which some pair of acts with
/// pairwise equally-plausible value events still fails to be indifferent.
#[derive(Debug, Clone)]
pub struct SearchWitness {
    pub structure: Cps,
    pub event: Event,
    pub f: ActId,
    pub g: ActId,
}

#[derive(Debug)]
pub struct SearchOutcome {
    pub bounds: SearchBounds,
    pub mode: SearchMode,
    pub examined: u64,
    pub satisfying: u64,
    pub witness: Option<SearchWitness>,
    pub exhausted: bool,
}

const EXHAUSTIVE_GUARD: u128 = 2_000_000;

fn transitive(rows: &[u64], k: usize) -> bool {
    (0..k).all(|a| {
        let mut row = rows[a];
        let mut reach = row;
        while row != 0 {
            let b = row.trailing_zeros() as usize;
            row &= row - 1;
            reach |= rows[b];
        }
        reach & !rows[a] == 0
    })
}

/// All preorders on `k` elements, as reflexive row bitsets, in canonical
/// order. Only used for small `k`.
fn preorders_on(k: usize) -> Vec<Vec<u64>> {
    let off = k * k - k;
    let mut out = Vec::new();
    for code in 0..(1u64 << off) {
        let mut rows = vec![0u64; k];
        let mut bit = 0;
        for (i, row) in rows.iter_mut().enumerate() {
            *row |= 1 << i;
            for j in 0..k {
                if i != j {
                    if code >> bit & 1 != 0 {
                        *row |= 1 << j;
                    }
                    bit += 1;
                }
            }
        }
        if transitive(&rows, k) {
            out.push(rows);
        }
    }
    out
}

fn search_space(bounds: &SearchBounds) -> Result<(StateSpace, ConsequenceScale)> {
    let space = StateSpace::new((0..bounds.n_states).map(|i| format!("s{i}")))?;
    let scale = ConsequenceScale::new((0..bounds.n_consequences).map(|i| format!("c{i}")))?;
    Ok((space, scale))
}

/// Lifts per-event preorders on agreement classes to a full structure.
fn lift_structure(
    space: &StateSpace,
    scale: &ConsequenceScale,
    acts: &ActSet,
    class_of: &[Vec<u32>],
    preorders: &[&Vec<u64>],
) -> Result<Cps> {
    let mut b = StructureBuilder::new(space.clone(), scale.clone(), acts.clone())?;
    for event in space.events() {
        let classes = &class_of[event.0 as usize];
        let rel = preorders[event.0 as usize];
        b.set_relation_from(event, |f, g| {
            rel[classes[f.0] as usize] >> classes[g.0] & 1 != 0
        });
    }
    Ok(b.build())
}

fn passes_core_postulates(p: &Cps) -> Result<bool> {
    for id in [PostulateId::Q3, PostulateId::Q4, PostulateId::Q5, PostulateId::Q6] {
        match check_postulate(p, id) {
            Ok(report) if report.passed => continue,
            Ok(_) => return Ok(false),
            Err(Error::ConstantsDisagree { .. }) | Err(Error::NoStrictConstants) => {
                return Ok(false)
            }
            Err(e) => return Err(e),
        }
    }
    Ok(true)
}

fn equipartition_violation(p: &Cps) -> Result<Option<(Event, ActId, ActId)>> {
    let r = match derive_plausibility(p) {
        Ok(r) => r,
        Err(Error::ConstantsDisagree { .. }) | Err(Error::NoStrictConstants) => return Ok(None),
        Err(e) => return Err(e),
    };
    for a in p.space().events() {
        for f in p.acts().ids() {
            for g in p.acts().ids() {
                if equipartition_hypothesis(p, &r, a, f, g)
                    && !(p.le_ids(a, f, g) && p.le_ids(a, g, f))
                {
                    return Ok(Some((a, f, g)));
                }
            }
        }
    }
    Ok(None)
}

/// Sweeps structures satisfying the core postulates (with no splice
/// postulate imposed) and looks for one on which the equal-partition
/// indifference conclusion fails. Exhaustive below the guard, seeded
/// sampling otherwise; exhaustion is a normal outcome.
pub fn search_counterexample(bounds: SearchBounds, mode: SearchMode) -> Result<SearchOutcome> {
    let (space, scale) = search_space(&bounds)?;
    let acts = ActSet::enumerate_all(&space, &scale, crate::acts::DEFAULT_ACT_LIMIT)?;
    // Agreement classes per event, computed once.
    let probe = StructureBuilder::new(space.clone(), scale.clone(), acts.clone())?.build();
    let class_of: Vec<Vec<u32>> = space
        .events()
        .map(|e| acts.ids().map(|f| probe.agreement_class(e, f)).collect())
        .collect();
    let class_counts: Vec<usize> =
        space.events().map(|e| probe.agreement_class_count(e)).collect();

    let mut outcome = SearchOutcome {
        bounds,
        mode,
        examined: 0,
        satisfying: 0,
        witness: None,
        exhausted: false,
    };

    match mode {
        SearchMode::Exhaustive => {
            let tables: Vec<Vec<Vec<u64>>> = class_counts
                .iter()
                .map(|&k| {
                    if k * k - k > 20 {
                        Err(Error::SearchSpaceTooLarge(u128::MAX))
                    } else {
                        Ok(preorders_on(k))
                    }
                })
                .collect::<Result<_>>()?;
            let total: u128 = tables.iter().map(|t| t.len() as u128).product();
            if total > EXHAUSTIVE_GUARD {
                return Err(Error::SearchSpaceTooLarge(total));
            }
            let mut idx = vec![0usize; tables.len()];
            loop {
                let chosen: Vec<&Vec<u64>> =
                    idx.iter().zip(&tables).map(|(&i, t)| &t[i]).collect();
                let p = lift_structure(&space, &scale, &acts, &class_of, &chosen)?;
                outcome.examined += 1;
                if passes_core_postulates(&p)? {
                    outcome.satisfying += 1;
                    if let Some((event, f, g)) = equipartition_violation(&p)? {
                        outcome.witness = Some(SearchWitness { structure: p, event, f, g });
                        return Ok(outcome);
                    }
                }
                // Odometer step over the per-event preorder tables.
                let mut pos = idx.len();
                loop {
                    if pos == 0 {
                        outcome.exhausted = true;
                        return Ok(outcome);
                    }
                    pos -= 1;
                    idx[pos] += 1;
                    if idx[pos] < tables[pos].len() {
                        break;
                    }
                    idx[pos] = 0;
                }
            }
        }
        SearchMode::Sampled { seed, samples } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples {
                let chosen: Vec<Vec<u64>> = class_counts
                    .iter()
                    .map(|&k| {
                        let mut rows = vec![0u64; k];
                        for (i, row) in rows.iter_mut().enumerate() {
                            *row |= 1 << i;
                            for j in 0..k {
                                if i != j && rng.gen_bool(0.34) {
                                    *row |= 1 << j;
                                }
                            }
                        }
                        // Transitive closure turns an arbitrary draw into a
                        // preorder.
                        for m in 0..k {
                            for i in 0..k {
                                if rows[i] >> m & 1 != 0 {
                                    rows[i] |= rows[m];
                                }
                            }
                        }
                        rows
                    })
                    .collect();
                let refs: Vec<&Vec<u64>> = chosen.iter().collect();
                let p = lift_structure(&space, &scale, &acts, &class_of, &refs)?;
                outcome.examined += 1;
                if passes_core_postulates(&p)? {
                    outcome.satisfying += 1;
                    if let Some((event, f, g)) = equipartition_violation(&p)? {
                        outcome.witness = Some(SearchWitness { structure: p, event, f, g });
                        return Ok(outcome);
                    }
                }
            }
            Ok(outcome)
        }
    }
}
