//! Numerical laboratory for quantum stochastic differential equations.
//!
//! The crate cross-verifies a chain of results about QSDEs driven by
//! creation/annihilation/number noises:
//!
//! - [`coeffs`]: symmetric-form coefficients (H, K, R) ↔ Hudson–Parthasarathy
//!   adapted coefficients (G, L, W) and the unitarity conditions tying them
//!   together.
//! - [`ito`]: the Ito multiplication table on {dt, dA, dA⁺, dΛ}, adjoints,
//!   unitarity defects, and the adapted ↔ symmetric measure conversion.
//! - [`scalar_limit`]: the scaled-Hamiltonian limit experiments for commuting
//!   coefficients — Volterra equations for the pre-limit group, the four
//!   closed-form limits, the limit unitary group and its interval cocycle.
//! - [`toy`]: the 1D transport model with a scaled delta-like potential, its
//!   phase-jump limit and explicit resolvent.
//! - [`fock`]: truncated Fock vectors with amplitude/phase jumps at the
//!   hyperplanes τ_k = 0, the boundary Hamiltonian and its symmetry pairing.
//! - [`lindblad`]: the Markov generator built from the boundary coefficients,
//!   Heisenberg-picture evolution, and a repeated-interaction oracle.
//!
//! Everything is finite-dimensional (system dimension ≤ 16) and pure: no
//! operation mutates shared state, so all of it is safe to drive from
//! parallel parameter sweeps.

pub mod bath;
pub mod coeffs;
pub mod error;
pub mod fock;
pub mod ito;
pub mod linalg;
pub mod lindblad;
pub mod scalar_limit;
pub mod toy;

pub use error::QsdeError;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Shorthand for `Result` with the crate error type.
pub type Result<T> = std::result::Result<T, QsdeError>;
