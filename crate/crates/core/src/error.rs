use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("potential is not confining: {0}")]
    NotConfining(String),

    #[error("potential is not even: V({q}) = {left}, V(-{q}) = {right}")]
    NotEven { q: f64, left: f64, right: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error(
        "ground state did not converge after {refinements} refinements \
         (estimated error {refinement_error:e}, tolerance {tolerance:e})"
    )]
    NotConverged {
        refinements: usize,
        refinement_error: f64,
        tolerance: f64,
    },

    #[error("{quantity}: direct value {direct} disagrees with finite-difference value {finite_difference}")]
    CrossCheck {
        quantity: &'static str,
        direct: f64,
        finite_difference: f64,
    },

    #[error("unknown observable `{0}`")]
    UnknownObservable(String),

    #[error("fit rejected: {0}")]
    Fit(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
