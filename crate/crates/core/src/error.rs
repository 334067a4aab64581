use thiserror::Error;

/// Errors raised by the capacity routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unphysical covariance matrix: det = {det} < 1/4")]
    Unphysical { det: f64 },

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("unsupported protocol: {0}")]
    UnsupportedProtocol(String),

    #[error("invalid encoding/measurement combination: {0}")]
    InvalidCombination(String),

    #[error(
        "two-quadrature split infeasible: n - sinh^2 r = {available} <= |imbalance| = {imbalance}"
    )]
    InfeasibleSplit { available: f64, imbalance: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(
        "no convergence after {iterations} iterations (last I = {last_bits} bits, gap = {gap})"
    )]
    Convergence {
        iterations: usize,
        last_bits: f64,
        gap: f64,
    },

    #[error("cutoff too small: prior mass {tail_mass:e} in the top of the alphabet")]
    Truncation { tail_mass: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
