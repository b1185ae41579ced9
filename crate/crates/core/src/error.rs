use thiserror::Error;

/// Every failure the library can report. The CLI maps each variant to the
/// stable name returned by [`Error::code`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("q = {q} is divisible by ell = {ell}")]
    QDivisibleByEll { ell: u64, q: u64 },
    #[error("field of size {ell}^{degree} is larger than supported")]
    FieldTooLarge { ell: u64, degree: u32 },
    #[error("the zero element has no multiplicative order")]
    ZeroElement,
    #[error("division by zero")]
    DivisionByZero,
    #[error("a root lies outside the context field: {0}")]
    NeedsLargerField(String),
    #[error("no fusion rule for {left} (x) {right}")]
    MissingFusionRule { left: String, right: String },
    #[error("inconsistent fusion data: {0}")]
    InconsistentFusion(String),
    #[error("input is supported on more than one line")]
    MixedLines,
    #[error("input contains a cycle; only segments are allowed here")]
    ContainsCyc,
    #[error("constituent on a ramified line cannot be realized by matrices")]
    RamifiedLine,
    #[error("Deligne relation UF = qFU fails")]
    RelationViolated,
    #[error("F is not invertible")]
    FNotInvertible,
    #[error("F is not diagonalizable")]
    NotSemisimple,
    #[error("U is not nilpotent")]
    NotNilpotent,
    #[error("epsilon factor is not a unit: {0}")]
    EpsilonNotUnit(String),
    #[error("cuspidal support meets a ramified line")]
    RamifiedCuspLine,
    #[error("segments are linked: {0}")]
    Linked(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("elements belong to different fields")]
    ContextMismatch,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

impl Error {
    /// Stable machine-readable name of the error kind.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonPrime(_) => "NonPrime",
            Error::QDivisibleByEll { .. } => "QDivisibleByEll",
            Error::FieldTooLarge { .. } => "FieldTooLarge",
            Error::ZeroElement => "ZeroElement",
            Error::DivisionByZero => "DivisionByZero",
            Error::NeedsLargerField(_) => "NeedsLargerField",
            Error::MissingFusionRule { .. } => "MissingFusionRule",
            Error::InconsistentFusion(_) => "InconsistentFusion",
            Error::MixedLines => "MixedLines",
            Error::ContainsCyc => "ContainsCyc",
            Error::RamifiedLine => "RamifiedLine",
            Error::RelationViolated => "RelationViolated",
            Error::FNotInvertible => "FNotInvertible",
            Error::NotSemisimple => "NotSemisimple",
            Error::NotNilpotent => "NotNilpotent",
            Error::EpsilonNotUnit(_) => "EpsilonNotUnit",
            Error::RamifiedCuspLine => "RamifiedCuspLine",
            Error::Linked(_) => "Linked",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::ContextMismatch => "ContextMismatch",
            Error::InvalidInput(_) => "InvalidInput",
            Error::Parse { .. } => "ParseError",
        }
    }

    pub(crate) fn parse(pos: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            pos,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
