use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// N starts at 1.
    #[error("{0} is outside N (natural numbers start at 1)")]
    OutOfDomain(u64),

    #[error("{what} {value} exceeds the arithmetic cap {cap}")]
    BeyondCap {
        what: &'static str,
        value: u64,
        cap: u64,
    },

    #[error("arithmetic overflow computing {0}")]
    Overflow(String),

    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),

    #[error("evaluation budget must be at least 1")]
    ZeroBudget,

    #[error("enumeration of {expr} up to {bound} is incomplete ({unknown} undecided values)")]
    IncompleteEnumeration {
        expr: String,
        bound: u64,
        unknown: usize,
    },

    #[error("corpus line {line}: {message}")]
    Corpus { line: usize, message: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("postcondition failed: {0}")]
    Postcondition(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("filter core {core} is empty: {reason}")]
    FipRefuted { core: String, reason: String },

    #[error("no member of filter core {core} found up to {budget}; pass an override to accept it")]
    FipUnknown { core: String, budget: u64 },

    #[error("invalid filter spec: {0}")]
    FilterSpec(String),

    #[error("chain needs {needed} family members, got {got}")]
    FamilyTooSmall { needed: usize, got: usize },

    #[error("family members {left} and {right} are not provably almost disjoint")]
    NotAlmostDisjoint { left: usize, right: usize },
}
