use thiserror::Error;

/// Unified error type for the library. Report-producing checks do not error on
/// mathematical violations (those go into the report); errors here are
/// contract violations: bad parameters, malformed input, infeasible requests.
#[derive(Debug, Error)]
pub enum Error {
    #[error("index must be a strictly positive integer, got {0}")]
    InvalidIndex(String),

    #[error("sign pattern missing a sign for index {0}")]
    MissingSign(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown space name {name:?}; catalog: {catalog}")]
    UnknownSpace { name: String, catalog: String },

    #[error("unknown weight selector {selector:?}; expected one of: {expected}")]
    UnknownWeight { selector: String, expected: String },

    #[error("weight evaluation failed: {0}")]
    WeightEvaluation(String),

    #[error("enumeration universe has {size} indices, cap is {cap}")]
    UniverseTooLarge { size: usize, cap: usize },

    #[error("requested rank {m} exceeds universe size {universe}")]
    RankExceedsUniverse { m: usize, universe: usize },

    #[error("cannot pad a greedy set: {0}")]
    PaddingUnavailable(String),

    #[error("set is not a greedy set of the vector: {0}")]
    NotGreedy(String),

    #[error("no certified value for constant {constant} on space {space} with weight {weight}")]
    MissingCertifiedConstant {
        constant: String,
        space: String,
        weight: String,
    },

    #[error("unbounded ratio: positive numerator {numerator} over zero denominator at instance {instance}")]
    UnboundedRatio { numerator: f64, instance: String },

    #[error("unknown suite {name:?}; available: {available}")]
    UnknownSuite { name: String, available: String },

    #[error("malformed vector JSON: {0}")]
    MalformedVector(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
