use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("singular model: discriminant is zero")]
    Singular,
    #[error("model is not minimal at {prime}: ord(c4) = {ord_c4}, ord(disc) = {ord_disc}")]
    NonMinimal { prime: u64, ord_c4: u32, ord_disc: u32 },
    #[error("additive reduction at {0} is not supported")]
    AdditiveReduction(u64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),
    #[error("{0} is not ordinary: p divides a_p")]
    NotOrdinary(u64),
    #[error("insufficient p-adic precision: {0}; retry with a larger precision")]
    InsufficientPrecision(String),
    #[error("rational reconstruction failed for {value} (bound {bound}); retry with more float bits or a larger bound")]
    Reconstruction { value: String, bound: u64 },
    #[error("period computation did not converge: {0}")]
    NoConvergence(String),
    #[error("normalization error: {0}")]
    Normalization(String),
    #[error("invalid BF system: {0}")]
    InvalidSystem(String),
    #[error("character sum is not a rational integer: {0}")]
    NonIntegerSum(String),
    #[error("system too large for brute force: |G|^2 = {size} exceeds {limit}")]
    TooLarge { size: u128, limit: u128 },
    #[error("standing hypotheses fail: {0}")]
    Hypothesis(String),
    #[error("invalid fixture: {0}")]
    Fixture(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
