use thiserror::Error;

use crate::index::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid derivative system: {}", join(.0))]
    InvalidSystem(Vec<Violation>),

    #[error("anisotropic hypothesis not certified within box {box_bound}")]
    NotCertified { box_bound: u32 },

    #[error("the Gamma variant needs at least two alphas (got {0})")]
    TooFewAlphas(usize),

    /// An expansion would produce more terms than the configured cap.
    #[error("expansion cap exceeded while building {what}: {needed} terms > cap {cap}")]
    CapExceeded { what: String, needed: u128, cap: u64 },

    #[error("degree of the empty polynomial is undefined")]
    UndefinedDegree,

    #[error("monomial q^alpha vanishes at frequency {0}")]
    ZeroMonomial(String),

    #[error("grid budget of {budget} points exceeded (last estimates: {last:?})")]
    GridBudget { budget: u64, last: Vec<f64> },

    #[error("invalid parameters: {0}")]
    Params(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}
