//! Exact classical simulation of the quantum algorithm for hidden Borel
//! subgroups of `GL_n(F_q)` and `SL_n(F_q)`.
//!
//! Field and matrix arithmetic is exact. Amplitudes and probabilities are
//! generic: the outcome law can be materialized in `f32`, `f64` or exact
//! rationals, see the aliases below.

pub mod borel;
pub mod cli;
pub mod gf;
pub mod harness;
pub mod linalg;
pub mod oracle;
pub mod quantum;
pub mod scalar;
pub mod selftest;
pub mod solver;

pub use num_rational::BigRational;

pub use borel::{flag_from_conjugator, lift_flag, stabilizer_generators, stabilizes, standard_flag, Flag};
pub use gf::{Field, FieldCtx, Fq};
pub use linalg::{complete_to_invertible, Matrix, Subspace, Vector};
pub use oracle::{HidingOracle, Mode, OracleLabel, OracleView};
pub use quantum::{CosetLaw, OutcomeDistribution, QftMatrix};
pub use scalar::{Probability, Real};
pub use solver::{solve_gl, solve_sl, Backend, SolveReport, SolverConfig};

/// Outcome law with exact rational probabilities.
pub type ExactLaw = OutcomeDistribution<BigRational>;
/// Outcome law in double precision.
pub type FloatLaw = OutcomeDistribution<f64>;
/// Outcome law in single precision.
pub type FloatLaw32 = OutcomeDistribution<f32>;
/// Fourier transform of F_q in double precision.
pub type Qft = QftMatrix<f64>;
