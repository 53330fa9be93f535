//! Conditional preference structures: one binary relation on acts per event.
//!
//! The relation at each event is stored as a bit matrix over act ids, so
//! membership queries are O(1) and whole-relation comparisons (needed by the
//! negligibility test) are word-wise. Structures are immutable once built;
//! [`StructureBuilder`] is the only mutable stage.

use std::collections::HashMap;

use serde::Serialize;

use crate::acts::{Act, ActId, ActSet, ConsequenceScale};
use crate::error::{Error, Result};
use crate::space::{Event, StateSpace};

/// Square bit matrix over act ids; `get(f, g)` reads "f <= g".
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct BitMatrix {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub fn new(n: usize) -> BitMatrix {
        let words = n.div_ceil(64);
        BitMatrix { n, words, bits: vec![0; words * n.max(1)] }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 != 0
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] |= 1 << (j % 64);
    }

    #[inline]
    pub fn clear(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] &= !(1 << (j % 64));
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    /// True iff row `j` is contained in row `i`.
    pub fn row_subset(&self, i: usize, j: usize) -> bool {
        let (ri, rj) = (i * self.words, j * self.words);
        (0..self.words).all(|w| self.bits[rj + w] & !self.bits[ri + w] == 0)
    }

    pub fn is_full(&self) -> bool {
        let ones: u64 = self.bits.iter().map(|w| w.count_ones() as u64).sum();
        ones == (self.n * self.n) as u64
    }

    /// In-place reflexive-free transitive closure (Warshall over bit rows).
    pub fn transitive_close(&mut self) {
        let mut buf = vec![0u64; self.words];
        for k in 0..self.n {
            buf.copy_from_slice(self.row(k));
            for i in 0..self.n {
                if self.get(i, k) {
                    let base = i * self.words;
                    for (w, &word) in buf.iter().enumerate() {
                        self.bits[base + w] |= word;
                    }
                }
            }
        }
    }
}

/// The four mutually exclusive relations a pair of acts can stand in at an
/// event: second strictly preferred, first strictly preferred, indifferent,
/// or undecided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairClass {
    StrictlyPreferredSecond,
    StrictlyPreferredFirst,
    Indifferent,
    Undecided,
}

impl PairClass {
    pub fn from_le(le_fg: bool, le_gf: bool) -> PairClass {
        match (le_fg, le_gf) {
            (true, true) => PairClass::Indifferent,
            (true, false) => PairClass::StrictlyPreferredSecond,
            (false, true) => PairClass::StrictlyPreferredFirst,
            (false, false) => PairClass::Undecided,
        }
    }

    pub fn mirror(self) -> PairClass {
        match self {
            PairClass::StrictlyPreferredSecond => PairClass::StrictlyPreferredFirst,
            PairClass::StrictlyPreferredFirst => PairClass::StrictlyPreferredSecond,
            other => other,
        }
    }
}

/// Per-event partition of acts by pointwise agreement on the event.
#[derive(Debug, Clone)]
pub(crate) struct EventClasses {
    pub of: Vec<u32>,
    pub count: usize,
}

fn event_classes(acts: &ActSet, event: Event, n_states: usize) -> EventClasses {
    let mut keys: HashMap<Vec<u8>, u32> = HashMap::new();
    let mut of = Vec::with_capacity(acts.len());
    for (_, act) in acts.iter() {
        let key: Vec<u8> = (0..n_states)
            .map(|s| if event.contains(s) { act.value_at(s) } else { 0xff })
            .collect();
        let next = keys.len() as u32;
        let id = *keys.entry(key).or_insert(next);
        of.push(id);
    }
    EventClasses { count: keys.len(), of }
}

/// A family of binary relations on a registered act set, one per event.
#[derive(Debug, Clone)]
pub struct ConditionalPreferenceStructure {
    space: StateSpace,
    scale: ConsequenceScale,
    acts: ActSet,
    rel: Vec<BitMatrix>,
    classes: Vec<EventClasses>,
}

impl ConditionalPreferenceStructure {
    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn scale(&self) -> &ConsequenceScale {
        &self.scale
    }

    pub fn acts(&self) -> &ActSet {
        &self.acts
    }

    pub(crate) fn relation(&self, event: Event) -> &BitMatrix {
        &self.rel[event.0 as usize]
    }

    /// Membership query `f <=_event g` by act id.
    #[inline]
    pub fn le_ids(&self, event: Event, f: ActId, g: ActId) -> bool {
        self.rel[event.0 as usize].get(f.0, g.0)
    }

    pub fn le(&self, event: Event, f: &Act, g: &Act) -> Result<bool> {
        Ok(self.le_ids(event, self.act_id(f)?, self.act_id(g)?))
    }

    pub fn classify_ids(&self, event: Event, f: ActId, g: ActId) -> PairClass {
        PairClass::from_le(self.le_ids(event, f, g), self.le_ids(event, g, f))
    }

    /// Four-way classification of a registered pair at an event.
    pub fn classify_pair(&self, event: Event, f: &Act, g: &Act) -> Result<PairClass> {
        Ok(self.classify_ids(event, self.act_id(f)?, self.act_id(g)?))
    }

    pub fn act_id(&self, act: &Act) -> Result<ActId> {
        self.acts.id_of(act).ok_or(Error::UnregisteredAct)
    }

    /// Id of `w_A^{win,lose}`; the act must be registered.
    pub fn two_valued_id(&self, on: Event, win: u8, lose: u8) -> Result<ActId> {
        self.acts
            .id_of(&crate::acts::two_valued(self.space.len(), on, win, lose))
            .ok_or(Error::MissingTwoValuedAct { event: on.0, win, lose })
    }

    pub fn constant_id(&self, c: u8) -> Result<ActId> {
        self.acts
            .id_of(&Act::constant(self.space.len(), c))
            .ok_or(Error::MissingTwoValuedAct { event: 0, win: c, lose: c })
    }

    /// Class id of `f` under pointwise agreement on `event`.
    #[inline]
    pub(crate) fn agreement_class(&self, event: Event, f: ActId) -> u32 {
        self.classes[event.0 as usize].of[f.0]
    }

    pub(crate) fn agreement_class_count(&self, event: Event) -> usize {
        self.classes[event.0 as usize].count
    }

    /// Relations at two events coincide on every act pair.
    pub(crate) fn relations_equal(&self, a: Event, b: Event) -> bool {
        self.rel[a.0 as usize] == self.rel[b.0 as usize]
    }

    /// Every ordered pair is related at `event`.
    pub(crate) fn relation_is_total_indifference(&self, event: Event) -> bool {
        self.rel[event.0 as usize].is_full()
    }

    /// Full dump of the relation as (event, f, g) triples in canonical order.
    pub fn relation_pairs(&self) -> Vec<(Event, ActId, ActId)> {
        let mut out = Vec::new();
        for event in self.space.events() {
            let m = &self.rel[event.0 as usize];
            for f in 0..self.acts.len() {
                for g in 0..self.acts.len() {
                    if m.get(f, g) {
                        out.push((event, ActId(f), ActId(g)));
                    }
                }
            }
        }
        out
    }
}

/// Mutable staging area for building a structure; `build` freezes it.
pub struct StructureBuilder {
    space: StateSpace,
    scale: ConsequenceScale,
    acts: ActSet,
    rel: Vec<BitMatrix>,
}

impl StructureBuilder {
    pub fn new(space: StateSpace, scale: ConsequenceScale, acts: ActSet) -> Result<StructureBuilder> {
        for (_, act) in acts.iter() {
            if act.len() != space.len() {
                return Err(Error::ActLengthMismatch { got: act.len(), want: space.len() });
            }
            if act.values().iter().any(|&c| c as usize >= scale.len()) {
                return Err(Error::UnknownConsequence(format!(
                    "act refers to consequence index outside the scale of {}",
                    scale.len()
                )));
            }
        }
        let rel = (0..space.event_count()).map(|_| BitMatrix::new(acts.len())).collect();
        Ok(StructureBuilder { space, scale, acts, rel })
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn acts(&self) -> &ActSet {
        &self.acts
    }

    pub fn add_pair(&mut self, event: Event, f: ActId, g: ActId) {
        self.rel[event.0 as usize].set(f.0, g.0);
    }

    pub fn remove_pair(&mut self, event: Event, f: ActId, g: ActId) {
        self.rel[event.0 as usize].clear(f.0, g.0);
    }

    /// Sets the whole relation at `event` from a predicate.
    pub fn set_relation_from(&mut self, event: Event, le: impl Fn(ActId, ActId) -> bool) {
        let m = &mut self.rel[event.0 as usize];
        for f in 0..self.acts.len() {
            for g in 0..self.acts.len() {
                if le(ActId(f), ActId(g)) {
                    m.set(f, g);
                }
            }
        }
    }

    /// Closes every event's relation under reflexivity, indifference between
    /// acts that agree on the event, and transitivity. No closure across
    /// events is performed.
    pub fn close_preorder(&mut self) {
        let n_states = self.space.len();
        for event in self.space.events() {
            let classes = event_classes(&self.acts, event, n_states);
            let m = &mut self.rel[event.0 as usize];
            for f in 0..self.acts.len() {
                for g in 0..self.acts.len() {
                    if classes.of[f] == classes.of[g] {
                        m.set(f, g);
                    }
                }
            }
            m.transitive_close();
        }
    }

    pub fn build(self) -> ConditionalPreferenceStructure {
        let n_states = self.space.len();
        let classes = self
            .space
            .events()
            .map(|e| event_classes(&self.acts, e, n_states))
            .collect();
        ConditionalPreferenceStructure {
            space: self.space,
            scale: self.scale,
            acts: self.acts,
            rel: self.rel,
            classes,
        }
    }
}

/// Smallest relation containing the generating pairs and closed per event
/// under reflexivity, agreement-indifference, and transitivity.
pub fn saturate(
    space: StateSpace,
    scale: ConsequenceScale,
    acts: ActSet,
    generators: &[(Event, ActId, ActId)],
) -> Result<ConditionalPreferenceStructure> {
    let mut b = StructureBuilder::new(space, scale, acts)?;
    for &(event, f, g) in generators {
        b.add_pair(event, f, g);
    }
    b.close_preorder();
    Ok(b.build())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acts::two_valued;

    fn setup() -> (StateSpace, ConsequenceScale, ActSet) {
        let space = StateSpace::new(["a"]).unwrap();
        let scale = ConsequenceScale::new(["lo", "mid", "hi"]).unwrap();
        let acts = ActSet::enumerate_all(&space, &scale, 100).unwrap();
        (space, scale, acts)
    }

    #[test]
    fn saturate_of_nothing_is_reflexive_everywhere() {
        let (space, scale, acts) = setup();
        let p = saturate(space, scale, acts, &[]).unwrap();
        for event in p.space().events() {
            for f in p.acts().ids() {
                assert!(p.le_ids(event, f, f));
            }
        }
        // The empty event relates everything: all acts agree vacuously on it.
        for f in p.acts().ids() {
            for g in p.acts().ids() {
                assert!(p.le_ids(Event::EMPTY, f, g));
            }
        }
    }

    #[test]
    fn saturate_closes_transitively_but_adds_no_converses() {
        let (space, scale, acts) = setup();
        let s = space.full_event();
        let lo = acts.id_of(&Act::constant(1, 0)).unwrap();
        let mid = acts.id_of(&Act::constant(1, 1)).unwrap();
        let hi = acts.id_of(&Act::constant(1, 2)).unwrap();
        let p = saturate(space, scale, acts, &[(s, lo, hi), (s, hi, mid)]).unwrap();
        assert!(p.le_ids(s, lo, mid), "transitive consequence present");
        assert!(!p.le_ids(s, hi, lo), "no symmetric pair invented");
        assert!(!p.le_ids(s, mid, lo));
    }

    #[test]
    fn saturate_is_idempotent_and_monotone() {
        let (space, scale, acts) = setup();
        let s = space.full_event();
        let lo = acts.id_of(&Act::constant(1, 0)).unwrap();
        let hi = acts.id_of(&Act::constant(1, 2)).unwrap();
        let gen1 = [(s, lo, hi)];
        let p1 = saturate(space.clone(), scale.clone(), acts.clone(), &gen1).unwrap();

        // Idempotent: re-saturating from the closed pair dump changes nothing.
        let dump = p1.relation_pairs();
        let p2 = saturate(space.clone(), scale.clone(), acts.clone(), &dump).unwrap();
        for event in space.events() {
            for f in p1.acts().ids() {
                for g in p1.acts().ids() {
                    assert_eq!(p1.le_ids(event, f, g), p2.le_ids(event, f, g));
                }
            }
        }

        // Monotone: a superset of generators yields a superset relation.
        let mid = p1.acts().id_of(&Act::constant(1, 1)).unwrap();
        let gen2 = [(s, lo, hi), (s, hi, mid)];
        let p3 = saturate(space.clone(), scale, acts, &gen2).unwrap();
        for event in space.events() {
            for f in p1.acts().ids() {
                for g in p1.acts().ids() {
                    if p1.le_ids(event, f, g) {
                        assert!(p3.le_ids(event, f, g));
                    }
                }
            }
        }
    }

    #[test]
    fn classification_partitions_and_mirrors() {
        let space = StateSpace::new(["a", "b"]).unwrap();
        let scale = ConsequenceScale::new(["lo", "hi"]).unwrap();
        let acts = ActSet::enumerate_all(&space, &scale, 100).unwrap();
        let s = space.full_event();
        let w_a = acts.id_of(&two_valued(2, Event(0b01), 1, 0)).unwrap();
        let w_b = acts.id_of(&two_valued(2, Event(0b10), 1, 0)).unwrap();
        let p = saturate(space, scale, acts, &[(s, w_a, w_b)]).unwrap();

        assert_eq!(p.classify_ids(s, w_a, w_b), PairClass::StrictlyPreferredSecond);
        assert_eq!(p.classify_ids(s, w_b, w_a), PairClass::StrictlyPreferredFirst);
        assert_eq!(p.classify_ids(s, w_a, w_a), PairClass::Indifferent);
        for f in p.acts().ids() {
            for g in p.acts().ids() {
                let fg = p.classify_ids(s, f, g);
                assert_eq!(fg.mirror(), p.classify_ids(s, g, f));
            }
        }
    }

    #[test]
    fn unregistered_acts_are_rejected() {
        let (space, scale, acts) = setup();
        let p = saturate(space, scale, acts, &[]).unwrap();
        let alien = Act::new(vec![7]);
        assert!(matches!(
            p.classify_pair(Event::EMPTY, &alien, &alien),
            Err(Error::UnregisteredAct)
        ));
    }
}
