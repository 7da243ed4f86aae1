use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("zero has no inverse modulo {0}")]
    ZeroInverse(u32),
    #[error("characteristic {p} divides the Fermat degree {d}")]
    CharacteristicDividesDegree { d: u32, p: u32 },
    #[error("Fermat degree must be at least 3, got {0}")]
    DegreeTooSmall(u32),
    #[error("polynomial is not homogeneous (degrees {0} and {1})")]
    NotHomogeneous(u64, u64),
    #[error("exponent overflow: {0}")]
    ExponentOverflow(String),
    #[error("empty generator list")]
    EmptyGenerators,
    #[error("unbalanced degrees: 2*{candidate} != {generator_sum}")]
    UnbalancedDegrees { candidate: u64, generator_sum: u64 },
    #[error("ideal is not primary to the irrelevant ideal")]
    NotPrimary,
    #[error("tight closure decision needs exactly 3 generators, got {0}")]
    GeneratorCount(usize),
    #[error("colength did not saturate below degree {0}")]
    NotCofinite(u64),
    #[error("binomial denominator vanishes")]
    DenominatorZero,
    #[error("{p} divides a denominator factor")]
    PDividesDenominator { p: u32 },
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),
    #[error("singular certificate system for p = {p}: {dump}")]
    SingularSystem { p: u32, dump: String },
    #[error("vanishing certificate determinant for p = {p}: {dump}")]
    ZeroDeterminant { p: u32, dump: String },
    #[error("internal consistency failure: {0}")]
    Consistency(String),
    #[error("invalid config field `{field}`: {message}")]
    ConfigInvalid { field: String, message: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("empty record list")]
    EmptyReport,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn config(field: &str, message: impl Into<String>) -> Self {
        Error::ConfigInvalid {
            field: field.to_string(),
            message: message.into(),
        }
    }

    /// Failures that would contradict a proven statement or a cross-check
    /// between two independent routes.
    pub fn is_consistency_failure(&self) -> bool {
        matches!(
            self,
            Error::Consistency(_) | Error::SingularSystem { .. } | Error::ZeroDeterminant { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
