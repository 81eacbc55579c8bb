//! Dissipative dynamics of dipole-dipole coupled quantum-dot exciton qubits
//! sharing an acoustic-phonon bath.
//!
//! The crate propagates the reduced density matrix of a small network of
//! two-level excitons with an iterative finite-memory path-integral scheme.
//! The phonon bath enters through a super-Ohmic spectral density whose
//! finite-temperature correlation function is discretized into an
//! influence-functional coefficient table.
//!
//! Everything here is pure computation on immutable inputs (`no_std` with
//! `alloc`); file IO, configuration, and the command-line front-end live in
//! the companion `qdq-cli` crate.
//!
//! Units: `hbar = 1`, energies and frequencies in ps^-1, time in ps,
//! temperature in K.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analysis;
pub mod bath;
pub mod engine;
pub mod error;
pub mod matrix;
pub mod model;
pub mod quad;

pub use num_complex::Complex64;

/// Boltzmann constant over hbar in ps^-1 K^-1 (CODATA 2018 values of
/// k_B = 1.380649e-23 J/K and hbar = 1.054571817e-34 J s).
pub const KB_OVER_HBAR: f64 = 1.380_649e-23 / 1.054_571_817e-34 * 1e-12;
