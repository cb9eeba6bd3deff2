//! Two-mode bosonic Fock-space engine and particle-entanglement witnesses.
//!
//! The crate is organised bottom-up:
//!
//! * [`special`] and [`linalg`] hold the numeric plumbing (log-gamma,
//!   dense complex matrices, a cyclic Jacobi hermitian eigensolver).
//! * [`fock`] represents pure and mixed states of `N` bosons in two modes,
//!   evaluates normally ordered ladder moments and angular-momentum
//!   observables, and rotates states.
//! * [`separable`] builds coherent spin states and discrete mixtures of
//!   them (the separable set), samples them, and searches them for witness
//!   maxima.
//! * [`witnesses`] evaluates the Cauchy-Schwarz ratios, number squeezing,
//!   quantum Fisher information and spin squeezing, and classifies states.
//! * [`povm`] covers generalized single-particle measurements and the
//!   correlation functions built from them.

pub mod fock;
pub mod linalg;
pub mod povm;
pub mod separable;
pub mod special;
pub mod witnesses;

mod error;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use fock::{
    FockVector, GeneratorSpec, NumberSectorMixture, SectorDensity, TwoModeState, DEFAULT_N_MAX,
};
pub use separable::{
    CoherentSpinState, FluctuatingEnsemble, NumberDistribution, SeparableEnsemble,
};
pub use witnesses::{CorrelationIntegrals, WitnessReport};

/// Name of the pseudo-random generator used by every seeded routine.
pub const PRNG_NAME: &str = "ChaCha8 (rand_chacha 0.3, seed_from_u64)";
