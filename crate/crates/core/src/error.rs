use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("tape count mismatch: expected {expected}, found {found}")]
    TapeMismatch { expected: usize, found: usize },
    #[error("alphabet mismatch between automata")]
    AlphabetMismatch,
    #[error("symbol `{0}` is not in the alphabet")]
    UnknownSymbol(String),
    #[error("invalid tape selection: {0}")]
    InvalidTapes(String),
    #[error("invalid automaton: {0}")]
    InvalidAutomaton(String),
    #[error("{0} cannot reach an accepting state")]
    NotCoAccessible(String),
    #[error("no multiplier automaton for generator `{0}`")]
    MissingMultiplier(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("unknown group model `{0}`")]
    UnknownModel(String),
    #[error("unknown structure `{0}`")]
    UnknownStructure(String),
    #[error("element does not belong to group model {0}")]
    ModelMismatch(String),
    #[error("invalid generator set: {0}")]
    InvalidGenerators(String),
    #[error("distance exceeds cap {cap}")]
    DistanceExceedsCap { cap: u64 },
    #[error("distance for word `{word}` exceeds cap {cap}")]
    WordDistanceExceedsCap { word: String, cap: u64 },
    #[error("ball exploration exceeded {0} elements")]
    BallBoundExceeded(usize),
    #[error("enumeration exceeded budget of {0} words")]
    EnumerationBudget(usize),
    #[error("word `{0}` does not represent the identity")]
    NotALoop(String),
    #[error("area exceeds {0}")]
    AreaExceedsMax(u32),
    #[error("search exceeded budget of {0} nodes")]
    SearchBudget(u64),
    #[error("{0}")]
    NotInjective(String),
    #[error("value mismatch: {0}")]
    ValueMismatch(String),
    #[error("structure violation: {0}")]
    StructureViolation(String),
    #[error("codec cannot encode element: {0}")]
    Unencodable(String),
    #[error("requested range [{start}, {end}] is empty or not covered (available up to {available})")]
    InsufficientRange { start: u64, end: u64, available: u64 },
    #[error("function domain starts at {domain_start}, beyond the requested point {requested}")]
    DomainShortfall { domain_start: u64, requested: u64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors raised because a configured search or memory budget ran out.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::DistanceExceedsCap { .. }
                | Error::WordDistanceExceedsCap { .. }
                | Error::BallBoundExceeded(_)
                | Error::EnumerationBudget(_)
                | Error::AreaExceedsMax(_)
                | Error::SearchBudget(_)
        )
    }
}
