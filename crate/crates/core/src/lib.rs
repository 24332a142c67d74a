//! Block-diagonal simulation of qubit clock ensembles.
//!
//! The crate models n identically prepared clock qubits through their
//! total-spin block decomposition, compresses their time information into
//! a few memory qubits by frequency projection, and measures elapsed time
//! with covariant measurements. On top of these primitives it runs the
//! coherent multi-event duration protocol against its incoherent
//! competitor and validates the analytic error and memory bounds.
//!
//! Modules:
//! * [`spin`] - rotation matrices, overlap tables, sector weights and
//!   block-diagonal state construction;
//! * [`clock`] - single-qubit clock states and dephasing evolution;
//! * [`compressor`] - the frequency-projection channel, its decoder, exact
//!   error metrics and analytic bound validators;
//! * [`estimation`] - covariant measurement statistics, maximum-likelihood
//!   estimation, Fisher information and the inaccuracy machinery;
//! * [`protocols`] - the k-event stopwatch, the incoherent competitor and
//!   the sequential network protocol;
//! * [`sampling`] / [`schur_basis`] - exact measurement samplers for
//!   block-diagonal states.

pub mod clock;
pub mod compressor;
pub mod error;
pub mod estimation;
pub mod linalg;
pub mod protocols;
pub mod rng;
pub mod sampling;
pub mod schur_basis;
pub mod special;
pub mod spin;

pub use error::{Error, Result};
