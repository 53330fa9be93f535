//! Finite state spaces and their events.
//!
//! Events are subsets of the state space encoded as bitmasks over the state
//! ordering, so the canonical iteration order over events is simply the
//! ascending order of masks. All reports produced elsewhere rely on that
//! order being deterministic.

use serde::Serialize;

use crate::error::{Error, Result};

/// Hard cap on state count. Every per-event table is indexed by all `2^n`
/// events, so this stays small by design.
pub const MAX_STATES: usize = 8;

/// A subset of the state space, as a bitmask over state indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Event(pub u32);

impl Event {
    pub const EMPTY: Event = Event(0);

    pub fn singleton(state: usize) -> Event {
        Event(1 << state)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(states: I) -> Event {
        Event(states.into_iter().fold(0, |m, s| m | (1 << s)))
    }

    pub fn union(self, other: Event) -> Event {
        Event(self.0 | other.0)
    }

    pub fn intersection(self, other: Event) -> Event {
        Event(self.0 & other.0)
    }

    pub fn difference(self, other: Event) -> Event {
        Event(self.0 & !other.0)
    }

    pub fn contains(self, state: usize) -> bool {
        self.0 & (1 << state) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset_of(self, other: Event) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint_from(self, other: Event) -> bool {
        self.0 & other.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Member state indices, ascending.
    pub fn states(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |i| self.0 & (1 << i) != 0)
    }
}

/// All subsets of `mask`, in ascending bitmask order.
pub fn subsets_of(mask: Event) -> impl Iterator<Item = Event> {
    let m = mask.0;
    // Enumerating submasks in increasing order: walk all values up to m and
    // keep those inside the mask. Masks here have at most MAX_STATES bits,
    // so the simple scan is fine and keeps the order canonical.
    (0..=m).map(Event).filter(move |e| e.0 & !m == 0)
}

/// An ordered set of distinct state identifiers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StateSpace {
    names: Vec<String>,
}

impl StateSpace {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::EmptyStateSpace);
        }
        if names.len() > MAX_STATES {
            return Err(Error::TooManyStates { got: names.len(), max: MAX_STATES });
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::DuplicateState(n.clone()));
            }
        }
        Ok(StateSpace { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, state: usize) -> &str {
        &self.names[state]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    pub fn event_count(&self) -> usize {
        1 << self.names.len()
    }

    /// All events in canonical (ascending bitmask) order.
    pub fn events(&self) -> impl Iterator<Item = Event> {
        (0..self.event_count() as u32).map(Event)
    }

    pub fn full_event(&self) -> Event {
        Event((1u32 << self.names.len()) - 1)
    }

    pub fn complement(&self, e: Event) -> Event {
        self.full_event().difference(e)
    }

    pub fn event_from_names<'a, I: IntoIterator<Item = &'a str>>(&self, names: I) -> Result<Event> {
        let mut e = Event::EMPTY;
        for n in names {
            e = e.union(Event::singleton(self.index_of(n)?));
        }
        Ok(e)
    }

    pub fn render_event(&self, e: Event) -> String {
        let members: Vec<&str> = e.states().filter(|&s| s < self.len()).map(|s| self.name(s)).collect();
        format!("{{{}}}", members.join(","))
    }

    /// Ordered pairs of disjoint events, canonical order on both components.
    pub fn disjoint_pairs(&self) -> Vec<(Event, Event)> {
        let mut out = Vec::new();
        for a in self.events() {
            let free = self.complement(a);
            for b in subsets_of(free) {
                out.push((a, b));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_duplicate_states() {
        assert!(matches!(StateSpace::new(Vec::<String>::new()), Err(Error::EmptyStateSpace)));
        assert!(matches!(
            StateSpace::new(["a", "a"]),
            Err(Error::DuplicateState(_))
        ));
    }

    #[test]
    fn boolean_algebra_laws_hold_exhaustively() {
        let space = StateSpace::new(["a", "b", "c", "d"]).unwrap();
        for a in space.events() {
            for b in space.events() {
                // De Morgan and difference-as-intersection, checked on every pair.
                assert_eq!(
                    space.complement(a.union(b)),
                    space.complement(a).intersection(space.complement(b))
                );
                assert_eq!(a.difference(b), a.intersection(space.complement(b)));
                assert_eq!(a.union(b), b.union(a));
                assert_eq!(a.intersection(b), b.intersection(a));
            }
        }
    }

    #[test]
    fn subsets_enumerate_in_canonical_order() {
        let mask = Event(0b101);
        let subs: Vec<u32> = subsets_of(mask).map(|e| e.0).collect();
        assert_eq!(subs, vec![0b000, 0b001, 0b100, 0b101]);
    }

    #[test]
    fn disjoint_pairs_count_matches_three_to_the_n() {
        let space = StateSpace::new(["a", "b", "c"]).unwrap();
        assert_eq!(space.disjoint_pairs().len(), 27);
    }

    #[test]
    fn event_rendering_uses_state_names() {
        let space = StateSpace::new(["a", "b"]).unwrap();
        assert_eq!(space.render_event(Event::EMPTY), "{}");
        assert_eq!(space.render_event(Event(0b11)), "{a,b}");
    }
}
