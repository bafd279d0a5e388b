//! Simulation and verification of quantum logic on pair-encoded
//! decoherence-free qubits in a linear ion trap.
//!
//! Each logical qubit lives on two ions, `|1̃⟩ = |eg⟩` and `|0̃⟩ = |ge⟩`.
//! The crate provides exact dense state-vector arithmetic ([`state`],
//! [`unitary`], [`measure`]), the pair gate set and CNOT pulse sequence
//! ([`gates`]), the two-path effective Rabi dynamics ([`dynamics`]), the
//! storage-to-accumulator teleportation protocol ([`teleport`]) and
//! dephasing channels ([`noise`]).
//!
//! All values are immutable after construction and every stochastic
//! routine takes its seed explicitly.

pub mod dynamics;
pub mod error;
pub mod gates;
pub mod measure;
pub mod noise;
pub mod state;
pub mod teleport;
pub mod unitary;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use state::{Layout, PureState};
pub use unitary::Unitary;

/// Tolerance applied when a value is constructed (norms, unitarity).
pub const CONSTRUCTION_TOL: f64 = 1e-12;

/// Tolerance for results of composed pipelines (several gates in a row).
pub const PIPELINE_TOL: f64 = 1e-10;
