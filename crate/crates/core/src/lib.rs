//! Quantum-metrology workbench for nonlinear collective couplings.
//!
//! The crate estimates a coupling constant `gamma` that enters a Hamiltonian
//! `gamma * H` with `H = (sum_j h_j)^k` (or the same sum with self-interaction
//! terms removed). It provides:
//!
//! - [`bounds`]: extreme eigenvalues of `H`, the entangled-state and
//!   product-state Cramér–Rao bounds, and the short-time separable-measurement
//!   sensitivity for general `k`.
//! - [`exact_moments`]: closed-form first and second moments of the collective
//!   spin under `gamma J_z^2`, exact and approximate sensitivities, operating
//!   points, dephasing and scaling exponents.
//! - [`oracle`]: a brute-force Dicke-basis simulator used to cross-check every
//!   closed form.
//! - [`protocol_sim`]: Monte Carlo simulation of the estimation protocols,
//!   including the adaptive bit-by-bit feedback loop.
//!
//! Spins are stored as `2J` ([`Spin`]) so that half-integer bookkeeping is
//! integer arithmetic throughout.

#![forbid(unsafe_code)]

pub mod bounds;
pub mod exact_moments;
pub mod numeric;
pub mod oracle;
pub mod protocol_sim;
pub mod spin_model;

pub use exact_moments::{Axis, ModelKind, MomentSet, Precision, SensitivityPoint};
pub use spin_model::{
    CoherentPreparation, CouplingSpec, DickeState, ExperimentClock, SingleBodySpectrum, Spin,
};

use thiserror::Error;

/// Errors produced by the workbench.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("spectrum must contain at least two distinct finite eigenvalues")]
    DegenerateSpectrum,

    #[error("invalid coupling: {0}")]
    InvalidCoupling(String),

    #[error("invalid spin 2J = {0}: must be at least 1")]
    InvalidSpin(u64),

    #[error("value {value} outside the domain [{lo}, {hi}]")]
    OutOfDomain { value: f64, lo: f64, hi: f64 },

    #[error("search budget exceeded: {needed} cases > {budget}")]
    BudgetExceeded { needed: f64, budget: f64 },

    #[error("no information: {0}")]
    NoInformation(String),

    #[error("dephasing rate must be non-negative, got {0}")]
    NegativeRate(f64),

    #[error("per-constituent phases are not supported by the symmetric-subspace simulator")]
    UnsupportedPhases,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
