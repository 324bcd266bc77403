//! Adaptive single-copy estimation of pure d-level quantum states.
//!
//! A run measures identically prepared copies of an unknown pure state one at
//! a time. After each measurement the measured basis vectors are averaged into
//! a density matrix whose leading eigenvector is the current estimate, and the
//! next basis is chosen to be as unbiased as possible with respect to every
//! vector measured so far. The [`harness`] module averages many such runs and
//! compares them against Haar-random measurements and the collective
//! measurement optimum `(N + 1) / (N + d)`.

pub mod adaption;
pub mod cli;
pub mod error;
pub mod estimator;
pub mod harness;
pub mod linalg;
pub mod measurement;
pub mod output;
pub mod random;

pub use adaption::{
    adapt_basis, bias_entropy, is_unbiased, AdaptedBasis, AdaptionConfig, SearchMethod,
};
pub use error::{Error, Result};
pub use estimator::{average_density, estimate_state, Estimate};
pub use harness::{
    optimal_fidelity, run_monte_carlo, run_single_experiment, ExperimentConfig, FidelityCurve,
    RunResult, Strategy,
};
pub use linalg::{
    fidelity, hermitian_eigendecomposition, inner_product, Basis, CMatrix, DensityMatrix,
    EigenDecomposition, StateVector, C64,
};
pub use measurement::{outcome_probabilities, sample_outcome, MeasurementRecord};
pub use random::{haar_state, haar_unitary, hurwitz_unitary, HurwitzParams, RandomStream};
