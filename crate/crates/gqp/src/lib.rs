//! A workbench for finite-model decision theory over partially ordered
//! preferences.
//!
//! The crate builds conditional preference structures (one relation on acts
//! per event of a finite state space), checks the rationality postulates
//! Q0-Q7 (plus the strengthened Q'4 and the prize-independence property R)
//! with explicit counterexample witnesses, derives the plausibility relation
//! on events, verifies the generalized-qualitative-probability axioms and
//! their derived properties, classifies relations into families (total,
//! standard, purely non-standard), reconstructs preferences from any valid
//! event relation and checks the round trip, enumerates total extensions,
//! and searches small structure spaces for counterexamples.
//!
//! All arithmetic is exact: probabilities are rationals, optionally with
//! infinitesimal parts represented as truncated polynomials in `eps`.

pub mod acts;
pub mod canonical;
pub mod error;
pub mod hyperreal;
pub mod models;
pub mod plausibility;
pub mod postulates;
pub mod report;
pub mod space;
pub mod structure;

pub use acts::{
    equal_on, two_valued, two_valued_act, Act, ActId, ActSet, ConsequenceScale,
    DEFAULT_ACT_LIMIT,
};
pub use canonical::{
    canonical_structure, conjecture_check, enumerate_total_extensions, roundtrip_check,
    search_counterexample, ExtensionSet, SearchBounds, SearchMode, SearchOutcome, SearchWitness,
};
pub use error::{Error, Result};
pub use hyperreal::{parse_rational, Hyperreal};
pub use models::{
    expectation_structure, expectation_structure_with_limit, hyperreal_structure,
    hyperreal_structure_with_limit, ranked_structure, ranked_structure_with_limit,
    ProbabilityModel, RankedModel,
};
pub use plausibility::{
    check_equipartition, check_equipartition_sweep, check_gqp, check_gqp_lemma, check_gqp_lemmas,
    classify_family, derive_plausibility, replay_equipartition, replay_gqp_lemma,
    replay_gqp_witness, EventRelation, FamilyFlags, GqpLemmaId,
};
pub use postulates::{
    check_derived_lemma, check_derived_lemmas, check_postulate, check_postulate_with,
    constants_order, is_negligible_compared, is_null_event, replay_lemma, replay_postulate,
    CheckOptions, ConstantsOrder, LemmaId, PostulateId,
};
pub use report::{CheckReport, Witness, WitnessValue, MAX_WITNESSES};
pub use space::{subsets_of, Event, StateSpace};
pub use structure::{saturate, ConditionalPreferenceStructure, PairClass, StructureBuilder};

pub use num::BigRational;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
