//! Special functions: gamma, Laguerre, spherical Bessel, Kummer and Coulomb functions.

mod bessel;
mod coulomb;
mod gamma;
mod hypergeometric;
mod laguerre;

pub use bessel::{spherical_bessel, spherical_j, spherical_j_upto, spherical_n_upto, SphericalBessel};
pub use coulomb::{coulomb_wave, CoulombPair};
pub use gamma::{coulomb_phase, gamma, ln_gamma, ln_gamma_complex};
pub use hypergeometric::confluent_hypergeometric;
pub use laguerre::{laguerre, laguerre_all};
