//! Joint measurements on two- and three-spin systems under two collapse rules.
//!
//! The crate is organised bottom-up:
//!
//! - [`linalg`]: small dense complex matrices and vectors, Kronecker products and a
//!   cyclic Jacobi eigensolver for Hermitian matrices. Generic over the real scalar.
//! - [`hilbert`]: kets over the `|+⟩/|−⟩` product basis, Pauli observables, Bell states,
//!   the conditional spin flip and correlation-degeneracy detection.
//! - [`measurement`]: the degenerate-eigenspace projection rule ([`Semantics::Luders`])
//!   and the local joint-eigenvalue collapse rule ([`Semantics::LocalJoint`]), exact
//!   outcome enumeration, seeded sampling and ensemble comparison.
//! - [`teleport`]: the seven-step teleportation protocol under either rule, plus the
//!   unitary-only path that skips the Bell measurement.
//!
//! Particles are indexed from zero; particle 0 is the leftmost tensor factor.

pub mod error;
pub mod hilbert;
pub mod linalg;
pub mod measurement;
pub mod rng;
pub mod scalar;
pub mod teleport;

pub use error::{Error, Result};
pub use hilbert::{Axis, BellLabel, Ket, Observable, Unitary};
pub use measurement::{Ensemble, JointOutcome, MeasurementRecord, Outcome, Semantics};
pub use rng::TrialRng;
pub use scalar::Real;

/// Complex scalar used by the physics layer.
pub type C64 = num_complex::Complex<f64>;
/// Double-precision complex matrix.
pub type Matrix = linalg::ComplexMatrix<f64>;
/// Double-precision complex vector.
pub type Vector = linalg::ComplexVector<f64>;
/// Double-precision spectral decomposition.
pub type Spectrum = linalg::SpectralDecomposition<f64>;
/// Single-precision complex matrix.
pub type Matrix32 = linalg::ComplexMatrix<f32>;
/// Single-precision complex vector.
pub type Vector32 = linalg::ComplexVector<f32>;
