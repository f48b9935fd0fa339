//! Crate error type.

use thiserror::Error;

/// Errors shared by all modules.
#[derive(Debug, Error)]
pub enum QsdeError {
    /// Malformed input: wrong shapes, non-finite entries, bad parameters.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A family handed to the joint diagonalizer does not commute.
    #[error("matrices do not commute: worst pair ({i}, {j}) has relative commutator norm {norm:.3e}")]
    NotCommuting { i: usize, j: usize, norm: f64 },

    /// −1 lies in the spectrum of W, so the inverse Cayley transform blows up.
    #[error("cayley-singular: -1 lies in the spectrum of W (|det(I+W)| ~ {0:.3e})")]
    CayleySingular(f64),

    /// 2 + L3 (or 2 − l3) is singular in the measure conversion.
    #[error("conversion-singular: {0}")]
    ConversionSingular(String),

    /// A grid or time step is too coarse for the requested scale.
    #[error("resolution: {0} (increase n_steps)")]
    Resolution(String),

    /// Evaluation outside the covered domain.
    #[error("domain: {0}")]
    Domain(String),

    /// A boundary trace ratio is requested where the denominator vanishes.
    #[error("undefined ratio: |value(0-)| = {0:.3e} is below 1e-12")]
    UndefinedRatio(f64),

    /// A precondition on boundary/jump data failed.
    #[error("precondition: {0}")]
    Precondition(String),
}
