//! The three concrete preference-structure generators: standard expectation,
//! non-standard (infinitesimal-weight) expectation, and ranked maximal-state
//! comparison. All arithmetic is exact.
//!
//! Conditional expectations are never divided by the conditioning event's
//! probability. Over an event A the weighted sums of two acts share the
//! positive denominator P(A), so the comparison is done on numerators, and
//! "the difference is not infinitesimal after conditioning" becomes an
//! order test: the first nonzero coefficient of the numerator difference
//! must sit at the same power as the first nonzero coefficient of P(A).

use num::BigRational;

use crate::acts::{ActSet, ConsequenceScale, DEFAULT_ACT_LIMIT};
use crate::error::{Error, Result};
use crate::hyperreal::Hyperreal;
use crate::space::{Event, StateSpace};
use crate::structure::{ConditionalPreferenceStructure as Cps, StructureBuilder};

/// Exact probability weights per state, possibly with infinitesimal parts.
/// Only the empty event may have probability zero, and the weights sum to
/// exactly one.
#[derive(Debug, Clone)]
pub struct ProbabilityModel {
    space: StateSpace,
    weights: Vec<Hyperreal>,
}

impl ProbabilityModel {
    pub fn new(space: StateSpace, weights: Vec<Hyperreal>) -> Result<ProbabilityModel> {
        if weights.len() != space.len() {
            return Err(Error::ValueCountMismatch { got: weights.len(), want: space.len() });
        }
        let degree = weights[0].degree();
        let mut sum = Hyperreal::zero(degree);
        for (i, w) in weights.iter().enumerate() {
            if w.degree() != degree {
                return Err(Error::DegreeMismatch(degree, w.degree()));
            }
            if w.is_negative() {
                return Err(Error::NegativeWeight(i));
            }
            if w.is_zero() {
                return Err(Error::ZeroWeight(i));
            }
            sum = sum.add(w)?;
        }
        if sum != Hyperreal::one(degree) {
            return Err(Error::WeightsNotNormalized);
        }
        Ok(ProbabilityModel { space, weights })
    }

    /// Degree-0 weights from plain rationals.
    pub fn standard(space: StateSpace, weights: Vec<BigRational>) -> Result<ProbabilityModel> {
        let hs = weights.into_iter().map(|q| Hyperreal::from_rational(q, 0)).collect();
        ProbabilityModel::new(space, hs)
    }

    /// Recommended truncation degree for a state space: twice the state
    /// count, enough for any product of two event weights.
    pub fn default_degree(space: &StateSpace) -> usize {
        2 * space.len()
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn degree(&self) -> usize {
        self.weights[0].degree()
    }

    pub fn is_standard(&self) -> bool {
        self.weights.iter().all(|w| w.order() == Some(0))
    }

    pub fn state_weight(&self, state: usize) -> &Hyperreal {
        &self.weights[state]
    }

    pub fn event_weight(&self, event: Event) -> Hyperreal {
        let mut sum = Hyperreal::zero(self.degree());
        for s in event.states().take_while(|&s| s < self.space.len()) {
            sum = sum.add(&self.weights[s]).expect("uniform degree");
        }
        sum
    }
}

/// A total order on states; preferences conditioned on an event look only at
/// the event's maximal state.
#[derive(Debug, Clone)]
pub struct RankedModel {
    space: StateSpace,
    rank: Vec<usize>,
}

impl RankedModel {
    /// `order` lists states from least to most plausible.
    pub fn new(space: StateSpace, order: Vec<usize>) -> Result<RankedModel> {
        let n = space.len();
        let mut seen = vec![false; n];
        if order.len() != n {
            return Err(Error::InvalidOrder);
        }
        for &s in &order {
            if s >= n || seen[s] {
                return Err(Error::InvalidOrder);
            }
            seen[s] = true;
        }
        let mut rank = vec![0usize; n];
        for (r, &s) in order.iter().enumerate() {
            rank[s] = r;
        }
        Ok(RankedModel { space, rank })
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    /// The unique maximal state of a non-empty event.
    pub fn max_state(&self, event: Event) -> Option<usize> {
        event
            .states()
            .take_while(|&s| s < self.space.len())
            .max_by_key(|&s| self.rank[s])
    }
}

fn scale_values(scale: &ConsequenceScale) -> Result<&[BigRational]> {
    scale.values().ok_or(Error::MissingValues)
}

/// Weighted consequence sum of each act over each event.
fn numerator_table(
    m: &ProbabilityModel,
    scale: &ConsequenceScale,
    acts: &ActSet,
) -> Result<Vec<Vec<Hyperreal>>> {
    let values = scale_values(scale)?;
    let degree = m.degree();
    let n_events = m.space().event_count();
    let mut table = Vec::with_capacity(acts.len());
    for (_, act) in acts.iter() {
        let mut per_event = Vec::with_capacity(n_events);
        for event in m.space().events() {
            let mut sum = Hyperreal::zero(degree);
            for s in event.states().take_while(|&s| s < m.space().len()) {
                sum = sum.add(&m.state_weight(s).scale(&values[act.value_at(s) as usize]))?;
            }
            per_event.push(sum);
        }
        table.push(per_event);
    }
    Ok(table)
}

/// Preferences by conditional expectation over standard weights: `f <=_A g`
/// iff the weighted sum of f over A is at most that of g; the empty event
/// relates everything.
pub fn expectation_structure(m: &ProbabilityModel, scale: &ConsequenceScale) -> Result<Cps> {
    expectation_structure_with_limit(m, scale, DEFAULT_ACT_LIMIT)
}

pub fn expectation_structure_with_limit(
    m: &ProbabilityModel,
    scale: &ConsequenceScale,
    act_limit: usize,
) -> Result<Cps> {
    if !m.is_standard() {
        return Err(Error::DegreeMismatch(0, m.degree()));
    }
    let acts = ActSet::enumerate_all(m.space(), scale, act_limit)?;
    let table = numerator_table(m, scale, &acts)?;
    let mut b = StructureBuilder::new(m.space().clone(), scale.clone(), acts)?;
    for event in m.space().events() {
        let e = event.0 as usize;
        b.set_relation_from(event, |f, g| {
            event.is_empty() || table[f.0][e].compare(&table[g.0][e]).expect("uniform degree").is_le()
        });
    }
    Ok(b.build())
}

/// Preferences by non-standard conditional expectation: strict preference
/// requires the numerator difference to be non-infinitesimal relative to
/// P(A); otherwise the acts are indifferent on A.
pub fn hyperreal_structure(m: &ProbabilityModel, scale: &ConsequenceScale) -> Result<Cps> {
    hyperreal_structure_with_limit(m, scale, DEFAULT_ACT_LIMIT)
}

pub fn hyperreal_structure_with_limit(
    m: &ProbabilityModel,
    scale: &ConsequenceScale,
    act_limit: usize,
) -> Result<Cps> {
    let acts = ActSet::enumerate_all(m.space(), scale, act_limit)?;
    let table = numerator_table(m, scale, &acts)?;
    let event_order: Vec<Option<usize>> =
        m.space().events().map(|e| m.event_weight(e).order()).collect();
    let mut b = StructureBuilder::new(m.space().clone(), scale.clone(), acts)?;
    for event in m.space().events() {
        let e = event.0 as usize;
        b.set_relation_from(event, |f, g| {
            if event.is_empty() {
                return true;
            }
            // f <=_A g unless f is strictly better: numerator difference
            // positive at exactly the order of P(A).
            let diff = table[f.0][e].sub(&table[g.0][e]).expect("uniform degree");
            !(diff.is_positive() && diff.order() == event_order[e])
        });
    }
    Ok(b.build())
}

/// Preferences decided at the maximal state of the conditioning event.
pub fn ranked_structure(m: &RankedModel, scale: &ConsequenceScale) -> Result<Cps> {
    ranked_structure_with_limit(m, scale, DEFAULT_ACT_LIMIT)
}

pub fn ranked_structure_with_limit(
    m: &RankedModel,
    scale: &ConsequenceScale,
    act_limit: usize,
) -> Result<Cps> {
    let values = scale_values(scale)?;
    let acts = ActSet::enumerate_all(m.space(), scale, act_limit)?;
    let tops: Vec<Option<usize>> = m.space().events().map(|e| m.max_state(e)).collect();
    let mut b = StructureBuilder::new(m.space().clone(), scale.clone(), acts)?;
    let act_values: Vec<Vec<u8>> = b.acts().iter().map(|(_, a)| a.values().to_vec()).collect();
    for event in m.space().events() {
        let top = tops[event.0 as usize];
        b.set_relation_from(event, |f, g| match top {
            None => true,
            Some(s) => values[act_values[f.0][s] as usize] <= values[act_values[g.0][s] as usize],
        });
    }
    Ok(b.build())
}
