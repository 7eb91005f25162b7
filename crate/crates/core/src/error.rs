use thiserror::Error;

/// Errors raised by the invariant computations.
///
/// Budget exhaustion is kept apart from every mathematical error so that a
/// truncated enumeration is never mistaken for a complete one.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("invalid element: {0}")]
    InvalidElement(String),

    #[error("rank mismatch: expected {expected} residues, got {got}")]
    RankMismatch { expected: usize, got: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("sequence is not zero-sum")]
    NotZeroSum,

    #[error("support of the sequence is not contained in <g>")]
    NotInCyclicSubgroup,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("gcd({n}, {a}) = {gcd} is not 1")]
    NotCoprime { n: u64, a: u64, gcd: u64 },

    #[error("monoid is not finitely primary of rank one: {0}")]
    NotFinitelyPrimary(String),

    #[error("value cap {cap} too small to certify the atom list (need at least {needed})")]
    CapTooSmall { cap: u64, needed: u64 },

    #[error("element is not representable in the monoid")]
    NotRepresentable,

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("budget exceeded: {what} (limit {limit})")]
    Budget { what: &'static str, limit: u64 },

    #[error("scan engines disagree on [{lo}, {hi}]")]
    EngineDisagreement { lo: u64, hi: u64 },

    #[error("checkpoint file is malformed: {0}")]
    Checkpoint(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. })
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
