use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("valuation of zero is undefined")]
    UndefinedValuation,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{value} is not {p}-integral")]
    NotPIntegral { value: String, p: u64 },
    #[error("{0} is not a unit")]
    NotAUnit(String),
    #[error("cannot divide by {divisor} in Z/{p}^{precision}")]
    NonUnitDivision { divisor: String, p: u64, precision: u32 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("prefix too short: need at least {needed} values, got {got}")]
    PrefixTooShort { needed: usize, got: usize },
    #[error("normalization error: f(0) = {0}, expected 1")]
    Normalization(String),
    #[error("index {index} is outside the prefix of length {len}")]
    Index { index: usize, len: usize },
    #[error("tail bound does not reach precision {precision} within {len} terms")]
    UnsoundTruncation { precision: u32, len: usize },
    #[error("enumeration of {needed} elements exceeds the budget of {budget}")]
    BudgetExceeded { needed: String, budget: u64 },
    #[error("could not separate the floor boundary for n = {n}, r = {r} after {attempts} refinements")]
    EnclosureFailure { n: u64, r: i64, attempts: u32 },
    #[error("malformed permutation: {0}")]
    MalformedPermutation(String),
    #[error("membership of {k} is beyond the evaluation bound {bound} of {label}")]
    MembershipBound { k: u64, bound: u64, label: String },
    #[error("parse error: {0}")]
    Parse(String),
}
