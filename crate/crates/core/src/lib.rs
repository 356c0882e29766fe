//! Oscillator-basis (J-matrix / HORSE) scattering solver.
//!
//! Continuum wave functions are expanded in harmonic-oscillator functions; the
//! interaction is diagonalized in a truncated basis and matched to the analytic
//! free solutions beyond the truncation boundary. On top of this the crate
//! provides P-/R-matrix extraction, a Coulomb treatment through a cut auxiliary
//! potential, the coupled-channel generalization and an independent Numerov
//! reference solver.

pub mod basis;
pub mod cli;
pub mod constants;
pub mod coulomb;
pub mod error;
pub mod hamiltonian;
pub mod multichannel;
pub mod oracle;
pub mod pmatrix;
pub mod potential;
pub mod quadrature;
pub mod single_channel;
pub mod specfun;

pub use error::{HorseError, Result};
