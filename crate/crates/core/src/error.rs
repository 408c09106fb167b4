use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),

    #[error("field order {order} exceeds the configured cap {cap}")]
    FieldTooLarge { order: u64, cap: u64 },

    #[error("enumeration needs {required} iterations, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("inverse of zero")]
    ZeroInverse,

    #[error("solution vector {0:?} is the zero vector")]
    ZeroVector(Vec<i64>),

    #[error("solution vectors {first:?} and {second:?} give the same sphere point")]
    Collision { first: Vec<i64>, second: Vec<i64> },

    #[error("points {i} and {j} coincide (distance {distance:e})")]
    DegenerateConfiguration { i: usize, j: usize, distance: f64 },

    #[error("exponent s = {s} is outside the domain: {reason}")]
    Domain { s: f64, reason: &'static str },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("thread pool: {0}")]
    ThreadPool(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
