//! Classical simulation of the quantum steps: coset preparation, the Fourier
//! transform over F_q and F_q^m, and the exact law of the measured outcome.

pub mod brute;
pub mod hsp;
pub mod law;
pub mod prep;
pub mod qft;

use thiserror::Error;

use crate::linalg::LinalgError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuantumError {
    #[error("size cap exceeded: {0}")]
    TooLarge(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub use brute::{brute_force_amplitude, brute_force_distribution};
pub use hsp::subspace_hsp_measure;
pub use law::{
    exact_distribution, exact_weights, guess_mass_exact, perp_mass_exact, perp_of_coset, success_mass_exact,
    CosetLaw, OutcomeDistribution,
};
pub use prep::{prep_coset_state, prep_success_probability, PrepKind, PrepOutcome};
pub use qft::QftMatrix;
