use thiserror::Error;

/// Errors raised by the certification pipeline and its helpers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is outside its domain: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("quadrature on [{a}, {b}] stopped at error {achieved:e} above tolerance {tol:e}")]
    Quadrature {
        a: f64,
        b: f64,
        tol: f64,
        achieved: f64,
    },

    #[error("no sign change on [{a}, {b}]")]
    NoSignChange { a: f64, b: f64 },

    #[error("non-finite function value at x = {x}")]
    NotFinite { x: f64 },

    #[error("grid sup {scan} of the cubic Taylor ratio exceeds the closed form {closed}")]
    KappaMismatch { scan: f64, closed: f64 },

    #[error(
        "T*t0 = {reach} exceeds the uniform cutoff T(N, eps) = {cutoff}; choose a smaller T or t0"
    )]
    Cutoff { reach: f64, cutoff: f64 },

    #[error("no feasible (t0, T) point for eps = {eps}")]
    Infeasible { eps: f64 },

    #[error("invalid distribution: {0}")]
    Distribution(String),

    #[error("support of {size} points exceeds the cap of {cap}")]
    SupportLimit { size: usize, cap: usize },

    #[error("{0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::Domain {
        name,
        value,
        reason,
    }
}
