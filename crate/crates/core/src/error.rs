use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("pole of {function} at {at}")]
    Pole { function: &'static str, at: f64 },

    #[error("domain error in {function}: {detail}")]
    Domain {
        function: &'static str,
        detail: String,
    },

    #[error("{function} did not converge within {iterations} iterations")]
    Convergence {
        function: &'static str,
        iterations: usize,
    },

    #[error("matrix entry ({i}, {j}) has a non-integrable integrand")]
    SingularEntry { i: usize, j: usize },

    #[error("overlap matrix is not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },

    #[error("selection rules forbid {0}")]
    SelectionRule(String),

    #[error("resonant denominator {denominator:e} hartree for intermediate state {state}")]
    Resonance { state: usize, denominator: f64 },

    #[error("spurious state: {0}")]
    SpuriousState(String),

    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("cannot parse number {0:?}")]
    Parse(String),

    #[error("non-finite result in {0}; working precision is likely exhausted")]
    NonFinite(&'static str),

    #[error("{0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        function,
        detail: detail.into(),
    }
}
