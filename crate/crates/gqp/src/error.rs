use thiserror::Error;

/// Errors shared by all workbench modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("state space must contain at least one state")]
    EmptyStateSpace,
    #[error("duplicate state identifier `{0}`")]
    DuplicateState(String),
    #[error("unknown state identifier `{0}`")]
    UnknownState(String),
    #[error("{got} states exceed the supported maximum of {max}")]
    TooManyStates { got: usize, max: usize },
    #[error("consequence scale must contain at least one consequence")]
    EmptyScale,
    #[error("duplicate consequence identifier `{0}`")]
    DuplicateConsequence(String),
    #[error("unknown consequence identifier `{0}`")]
    UnknownConsequence(String),
    #[error("consequence scale carries no numeric values")]
    MissingValues,
    #[error("value count {got} does not match consequence count {want}")]
    ValueCountMismatch { got: usize, want: usize },
    #[error("act enumeration would produce {got} acts, above the limit {limit}")]
    ActLimitExceeded { got: u128, limit: usize },
    #[error("act length {got} does not match state count {want}")]
    ActLengthMismatch { got: usize, want: usize },
    #[error("act is not registered in the structure's act set")]
    UnregisteredAct,
    #[error("two-valued act for event mask {event:#x} (win {win}, lose {lose}) is missing from the act set")]
    MissingTwoValuedAct { event: u32, win: u8, lose: u8 },
    #[error("spliced act required by a quantifier is missing from the act set")]
    MissingSplicedAct,
    #[error("events must be disjoint")]
    NotDisjoint,
    #[error("hyperreal truncation degrees differ: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("product overflows truncation degree {degree}: nonzero coefficient at power {power}")]
    TruncationOverflow { degree: usize, power: usize },
    #[error("weights must sum to exactly one")]
    WeightsNotNormalized,
    #[error("state {0} has weight zero; only the empty event may have probability zero")]
    ZeroWeight(usize),
    #[error("state {0} has negative weight")]
    NegativeWeight(usize),
    #[error("order must be a permutation of the state indices")]
    InvalidOrder,
    #[error("constant preferences disagree across non-null events: consequences {c} and {d} at event masks {event_a:#x} and {event_b:#x}")]
    ConstantsDisagree { c: u8, d: u8, event_a: u32, event_b: u32 },
    #[error("no strictly ordered pair of constants exists")]
    NoStrictConstants,
    #[error("relation is not a generalized qualitative probability: {0}")]
    NotAGqp(String),
    #[error("event relations support at most {max} states, got {got}")]
    RelationTooLarge { got: usize, max: usize },
    #[error("state spaces differ: {0} vs {1} states")]
    SpaceMismatch(usize, usize),
    #[error("extension enumeration supports at most {max} events, got {got}")]
    TooManyEvents { got: usize, max: usize },
    #[error("exhaustive search space of {0} candidates exceeds the guard; use sampling")]
    SearchSpaceTooLarge(u128),
}

pub type Result<T> = std::result::Result<T, Error>;
