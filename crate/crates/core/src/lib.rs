//! Continuous-time quantum walks on the glued binary trees graph, with and
//! without Anderson-type on-site disorder.
//!
//! The crate builds the graph `G_n` exactly, reduces its walk to a
//! `(2n + 1)`-site chain, perturbs that chain with random on-site energies,
//! and measures how far a wave packet gets: by exact spectral propagation,
//! by the Lloyd-Thouless closed form for Cauchy disorder, by transfer-matrix
//! Lyapunov exponents and by fitting eigenstate envelopes. The
//! [`experiment`] module turns these into reproducible CSV/JSON datasets.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod line;
pub mod localization;
pub mod rng;
pub mod stats;
pub mod tridiag;

pub use dynamics::{
    eigendecompose, evolve_classical, evolve_quantum, hitting_probability, packet_extent,
    ProbabilityProfile, Propagator, SpectralDecomposition,
};
pub use error::{Error, Result};
pub use graph::{classical_generator, quantum_hamiltonian_full, DenseGenerator, GluedTreeGraph};
pub use line::{
    apply_disorder, column_basis, lumped_classical_chain, reduced_hamiltonian, sample_disorder,
    ClassicalChain, ColumnBasis, DisorderFamily, DisorderSpec, LineHamiltonian,
};
pub use localization::{
    eigenstate_envelope, lyapunov_exponent, max_localization_length, scaling_exponent,
    thouless_length, Length, LocalizationEstimate, ScalingResult,
};
