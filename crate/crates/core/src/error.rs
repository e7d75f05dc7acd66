use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("not integral: {0}")]
    NotIntegral(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// `inner` is not contained in `outer`; multiplying `inner` by π^rescale fixes it.
    #[error("lattice not contained; rescale the inner lattice by pi^{rescale}")]
    NotContained { rescale: i64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("enumeration blowup in {what}: {count} candidates exceeds cap {cap}")]
    CapExceeded { what: &'static str, count: u128, cap: u128 },

    #[error("not arrow-invariant: {0}")]
    NotArrowInvariant(String),

    #[error("representation is not semistable")]
    NotSemistable,

    #[error("complex is not exact in degree {0}")]
    NotExact(i64),

    #[error("not a chain map: {0}")]
    NotChainMap(String),

    #[error("chain map is not a quasi-isomorphism")]
    NotQuasiIsomorphism,

    #[error("modulus polynomial is reducible")]
    ReducibleModulus,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A self-check of a construction failed. Indicates a bug, not bad input.
    #[error("internal verification failed: {0}")]
    InternalVerification(String),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}
