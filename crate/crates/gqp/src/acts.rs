//! Consequences, acts, and registered act sets.
//!
//! An act is a total map from states to consequences, stored as one
//! consequence index per state. Act sets are explicit and finite; every
//! quantifier elsewhere ranges over the registered acts.

use std::collections::HashMap;

use num::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::space::{Event, StateSpace};

/// Default cap on full act enumeration.
pub const DEFAULT_ACT_LIMIT: usize = 10_000;

const MAX_CONSEQUENCES: usize = 255;

/// An ordered set of distinct consequence identifiers, optionally carrying
/// one exact rational value per consequence (used by the model generators).
#[derive(Debug, Clone, PartialEq)]
pub struct ConsequenceScale {
    names: Vec<String>,
    values: Option<Vec<BigRational>>,
}

impl ConsequenceScale {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::EmptyScale);
        }
        if names.len() > MAX_CONSEQUENCES {
            return Err(Error::TooManyStates { got: names.len(), max: MAX_CONSEQUENCES });
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::DuplicateConsequence(n.clone()));
            }
        }
        Ok(ConsequenceScale { names, values: None })
    }

    pub fn with_values<I, S>(names: I, values: Vec<BigRational>) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut scale = Self::new(names)?;
        if values.len() != scale.names.len() {
            return Err(Error::ValueCountMismatch { got: values.len(), want: scale.names.len() });
        }
        scale.values = Some(values);
        Ok(scale)
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

    pub fn name(&self, c: u8) -> &str {
        &self.names[c as usize]
    }

    pub fn index_of(&self, name: &str) -> Result<u8> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| i as u8)
            .ok_or_else(|| Error::UnknownConsequence(name.to_string()))
    }

    pub fn values(&self) -> Option<&[BigRational]> {
        self.values.as_deref()
    }

    pub fn value(&self, c: u8) -> Result<&BigRational> {
        self.values
            .as_ref()
            .map(|v| &v[c as usize])
            .ok_or(Error::MissingValues)
    }
}

/// A total map from states to consequence indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Act {
    values: Vec<u8>,
}

impl Act {
    pub fn new(values: Vec<u8>) -> Act {
        Act { values }
    }

    pub fn constant(n_states: usize, c: u8) -> Act {
        Act { values: vec![c; n_states] }
    }

    pub fn from_fn(n_states: usize, f: impl Fn(usize) -> u8) -> Act {
        Act { values: (0..n_states).map(f).collect() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value_at(&self, state: usize) -> u8 {
        self.values[state]
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    pub fn is_constant(&self) -> bool {
        self.values.windows(2).all(|w| w[0] == w[1])
    }

    /// Copy of this act with every state of `on` remapped to `c`.
    pub fn overwritten(&self, on: Event, c: u8) -> Act {
        Act {
            values: self
                .values
                .iter()
                .enumerate()
                .map(|(s, &v)| if on.contains(s) { c } else { v })
                .collect(),
        }
    }

    pub fn render(&self, space: &StateSpace, scale: &ConsequenceScale) -> String {
        let parts: Vec<String> = self
            .values
            .iter()
            .enumerate()
            .map(|(s, &c)| format!("{}->{}", space.name(s), scale.name(c)))
            .collect();
        format!("({})", parts.join(","))
    }
}

/// The two-valued act paying `win` on `on` and `lose` elsewhere.
/// `win == lose` is allowed and yields a constant act.
pub fn two_valued(n_states: usize, on: Event, win: u8, lose: u8) -> Act {
    Act::from_fn(n_states, |s| if on.contains(s) { win } else { lose })
}

/// Name-based variant of [`two_valued`]; fails on unknown consequences.
pub fn two_valued_act(
    space: &StateSpace,
    scale: &ConsequenceScale,
    on: Event,
    win: &str,
    lose: &str,
) -> Result<Act> {
    Ok(two_valued(space.len(), on, scale.index_of(win)?, scale.index_of(lose)?))
}

/// True iff `f` and `g` agree pointwise on `on` (vacuously true for the
/// empty event).
pub fn equal_on(f: &Act, g: &Act, on: Event) -> bool {
    on.states()
        .take_while(|&s| s < f.len())
        .all(|s| f.value_at(s) == g.value_at(s))
}

/// Index of an act inside a registered [`ActSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct ActId(pub usize);

/// A finite, explicitly registered act set with stable ids.
#[derive(Debug, Clone)]
pub struct ActSet {
    acts: Vec<Act>,
    ids: HashMap<Vec<u8>, ActId>,
}

impl ActSet {
    /// Registers the given acts in order, dropping duplicates.
    pub fn from_acts<I: IntoIterator<Item = Act>>(acts: I) -> ActSet {
        let mut set = ActSet { acts: Vec::new(), ids: HashMap::new() };
        for a in acts {
            set.insert(a);
        }
        set
    }

    fn insert(&mut self, act: Act) -> ActId {
        if let Some(&id) = self.ids.get(act.values()) {
            return id;
        }
        let id = ActId(self.acts.len());
        self.ids.insert(act.values().to_vec(), id);
        self.acts.push(act);
        id
    }

    /// Every act over the scale, in lexicographic order of assignments.
    /// Fails when `|F|^|S|` exceeds `limit`.
    pub fn enumerate_all(space: &StateSpace, scale: &ConsequenceScale, limit: usize) -> Result<ActSet> {
        let n = space.len();
        let base = scale.len() as u128;
        let total = base.pow(n as u32);
        if total > limit as u128 {
            return Err(Error::ActLimitExceeded { got: total, limit });
        }
        let mut acts = Vec::with_capacity(total as usize);
        for i in 0..total {
            let mut v = vec![0u8; n];
            let mut rest = i;
            for s in (0..n).rev() {
                v[s] = (rest % base) as u8;
                rest /= base;
            }
            acts.push(Act::new(v));
        }
        Ok(ActSet::from_acts(acts))
    }

    /// All two-valued acts `w_A^{c,d}` over every event and consequence pair,
    /// deduplicated and sorted lexicographically.
    pub fn two_valued_universe(space: &StateSpace, scale: &ConsequenceScale) -> ActSet {
        let mut acts: Vec<Act> = Vec::new();
        for a in space.events() {
            for c in 0..scale.len() as u8 {
                for d in 0..scale.len() as u8 {
                    acts.push(two_valued(space.len(), a, c, d));
                }
            }
        }
        acts.sort_by(|x, y| x.values().cmp(y.values()));
        acts.dedup();
        ActSet::from_acts(acts)
    }

    pub fn len(&self) -> usize {
        self.acts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.acts.is_empty()
    }

    pub fn get(&self, id: ActId) -> &Act {
        &self.acts[id.0]
    }

    pub fn id_of(&self, act: &Act) -> Option<ActId> {
        self.ids.get(act.values()).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ActId, &Act)> {
        self.acts.iter().enumerate().map(|(i, a)| (ActId(i), a))
    }

    pub fn ids(&self) -> impl Iterator<Item = ActId> {
        (0..self.acts.len()).map(ActId)
    }

    /// True when every `w_A^{c,d}` is registered, which the plausibility
    /// derivation requires.
    pub fn is_closed_under_two_valued(&self, space: &StateSpace, scale: &ConsequenceScale) -> bool {
        space.events().all(|a| {
            (0..scale.len() as u8).all(|c| {
                (0..scale.len() as u8)
                    .all(|d| self.id_of(&two_valued(space.len(), a, c, d)).is_some())
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> (StateSpace, ConsequenceScale) {
        (
            StateSpace::new(["a", "b"]).unwrap(),
            ConsequenceScale::new(["lo", "hi"]).unwrap(),
        )
    }

    #[test]
    fn two_valued_edge_events() {
        let (space, scale) = small();
        // Empty event pays the low side everywhere; full event the high side.
        let w_empty = two_valued_act(&space, &scale, Event::EMPTY, "hi", "lo").unwrap();
        assert_eq!(w_empty, Act::constant(2, 0));
        let w_full = two_valued_act(&space, &scale, space.full_event(), "hi", "lo").unwrap();
        assert_eq!(w_full, Act::constant(2, 1));
        let w_a = two_valued_act(&space, &scale, Event(0b01), "hi", "lo").unwrap();
        assert_eq!(w_a.values(), &[1, 0]);
    }

    #[test]
    fn two_valued_rejects_unknown_consequence() {
        let (space, scale) = small();
        assert!(matches!(
            two_valued_act(&space, &scale, Event(1), "hi", "mid"),
            Err(Error::UnknownConsequence(_))
        ));
    }

    #[test]
    fn equal_on_edge_cases() {
        let f = Act::new(vec![1, 0]);
        let g = Act::new(vec![1, 1]);
        assert!(equal_on(&f, &g, Event::EMPTY));
        assert!(equal_on(&f, &f, Event(0b11)));
        assert!(equal_on(&f, &g, Event(0b01)));
        assert!(!equal_on(&f, &g, Event(0b10)));
    }

    #[test]
    fn enumeration_is_lexicographic_and_capped() {
        let (space, scale) = small();
        let set = ActSet::enumerate_all(&space, &scale, 100).unwrap();
        assert_eq!(set.len(), 4);
        let vals: Vec<&[u8]> = set.iter().map(|(_, a)| a.values()).collect();
        assert_eq!(vals, vec![&[0, 0][..], &[0, 1], &[1, 0], &[1, 1]]);
        assert!(matches!(
            ActSet::enumerate_all(&space, &scale, 3),
            Err(Error::ActLimitExceeded { .. })
        ));
    }

    #[test]
    fn two_valued_universe_is_closed() {
        let (space, scale) = small();
        let set = ActSet::two_valued_universe(&space, &scale);
        assert!(set.is_closed_under_two_valued(&space, &scale));
        // Over two consequences every act is two-valued, so this is the full set.
        assert_eq!(set.len(), 4);
    }
}
