use thiserror::Error;

/// Errors raised by the algebra and geometry routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("{n} is not a power of p = {p}")]
    NotPowerOfP { n: u64, p: u64 },

    #[error("operation undefined on the zero ideal")]
    ZeroIdeal,

    #[error("ideal is not m-primary: length is infinite")]
    NotMPrimary,

    #[error("infinite length: the quotient has unbounded support")]
    InfiniteLength,

    #[error("containment violated: {0}")]
    NotContained(String),

    #[error("too many generators for inclusion-exclusion: {count} > {cap}")]
    TooManyGenerators { count: usize, cap: usize },

    #[error("grid of {cells} cells exceeds the cap of {cap}")]
    TooManyCells { cells: u128, cap: u128 },

    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("region kinds do not match")]
    MixedRegionKinds,

    #[error("complement of the region is unbounded")]
    Unbounded,

    #[error("singular system: samples span rank {rank} of {needed}")]
    Singular { rank: usize, needed: usize },

    #[error("table family has no entry at e = {0}")]
    TableIndex(u32),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("enumeration cap of {0} exceeded")]
    SearchCap(usize),

    #[error("at {index}: {source}")]
    At { index: String, source: Box<Error> },
}

impl Error {
    /// Tags an error with the grid index where it happened.
    pub fn at(self, b: Option<u32>, e: u32) -> Error {
        let index = match b {
            Some(b) => format!("b = {b}, e = {e}"),
            None => format!("e = {e}"),
        };
        Error::At {
            index,
            source: Box::new(self),
        }
    }

    /// The underlying error with index tags removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::At { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
