use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("row is not symmetric; gamma expansion is undefined")]
    NonSymmetricInput,

    #[error("index {n} is odd but the {what} family only exists for even sizes")]
    OddIndex { what: &'static str, n: usize },

    #[error("{what}: right-hand side {rhs} at n={n}, k={k} is not divisible by {divisor}")]
    DivisibilityViolation {
        what: &'static str,
        n: usize,
        k: i64,
        rhs: String,
        divisor: i64,
    },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("n={n} exceeds the enumeration feasibility bound {bound}")]
    FeasibilityExceeded { n: usize, bound: usize },

    #[error("malformed row: {0}")]
    MalformedRow(String),
}
