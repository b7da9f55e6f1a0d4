use thiserror::Error;

/// Errors raised by field construction, set algebra, lemma oracles, the
/// proof tracer and the extremal search.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("modulus {0} is not a monic polynomial of degree {1}")]
    BadModulus(String, u32),
    #[error("modulus {0} is reducible over F_{1}")]
    ReducibleModulus(String, u32),
    #[error("field order {p}^{n} exceeds the configured cap {cap}")]
    OrderTooLarge { p: u64, n: u32, cap: u64 },
    #[error("element index {0} is out of range for a field of order {1}")]
    ElementOutOfRange(u64, u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("empty operand")]
    EmptyOperand,
    #[error("empty set")]
    EmptySet,
    #[error("dilation by zero")]
    ZeroDilation,
    #[error("set too small: {0}")]
    TooSmall(String),
    #[error("set contains zero; a subset of the multiplicative group is required")]
    ContainsZero,
    #[error("X must be nonempty")]
    EmptyX,
    #[error("epsilon must lie strictly between 0 and 1, got {0}")]
    BadEpsilon(String),
    #[error("input too large for exact search: {0}")]
    TooLarge(String),
    #[error("generating set has no nonzero element")]
    NoNonzeroGenerator,
    #[error("no popular pair found")]
    NoPopularPair,
    #[error("slope {0} is not a slope of the refined point set")]
    SlopeNotInXi(u32),
    #[error("trace has not been classified")]
    NotClassified,
    #[error("search needs {needed} evaluations, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("no admissible {0}-subset was found")]
    NoAdmissibleSet(usize),
    #[error("nothing to chart")]
    Empty,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("malformed field spec `{0}`")]
    MalformedFieldSpec(String),
    #[error("malformed set literal `{0}`")]
    MalformedSetLiteral(String),
    #[error("unknown command `{0}`")]
    UnknownCommand(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
