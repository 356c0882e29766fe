//! Physical constants and two-body kinematics.
//!
//! Units throughout the crate: energies in MeV, lengths in fm, masses in MeV/c².
//! Velocities are expressed in units of c, so `v = ħc·k/μ` is dimensionless.

use crate::error::{HorseError, Result};

/// ħc in MeV·fm.
pub const HBAR_C: f64 = 197.326_963_1;
/// e² = α·ħc in MeV·fm.
pub const E_SQUARED: f64 = 1.439_96;
/// Average nucleon mass in MeV/c².
pub const NUCLEON_MASS: f64 = 938.918;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar_c: f64,
    pub mass_unit: f64,
    pub e_squared: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        PhysicalConstants {
            hbar_c: HBAR_C,
            mass_unit: NUCLEON_MASS,
            e_squared: E_SQUARED,
        }
    }
}

/// Reduced mass of two fragments with mass numbers `a1`, `a2`, using the average nucleon mass.
pub fn reduced_mass(a1: f64, a2: f64) -> f64 {
    NUCLEON_MASS * a1 * a2 / (a1 + a2)
}

/// k = √(2μE)/ħc. Negative energies are closed channels.
pub fn momentum_from_energy(energy: f64, mu: f64) -> Result<f64> {
    if !(energy >= 0.0) {
        return Err(HorseError::ClosedChannel { energy });
    }
    if !(mu > 0.0) {
        return Err(HorseError::invalid("reduced_mass", mu, "must be positive"));
    }
    Ok((2.0 * mu * energy).sqrt() / HBAR_C)
}

/// E = (ħc k)²/(2μ).
pub fn energy_from_momentum(k: f64, mu: f64) -> f64 {
    let p = HBAR_C * k;
    p * p / (2.0 * mu)
}

/// Oscillator radius r₀ = ħc/√(μ·ħω).
pub fn oscillator_radius(hbar_omega: f64, mu: f64) -> Result<f64> {
    if !(hbar_omega > 0.0) {
        return Err(HorseError::invalid("hbar_omega", hbar_omega, "must be positive"));
    }
    if !(mu > 0.0) {
        return Err(HorseError::invalid("reduced_mass", mu, "must be positive"));
    }
    Ok(HBAR_C / (mu * hbar_omega).sqrt())
}

/// Relative-motion kinematics of one open channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kinematics {
    /// Energy above the channel threshold (MeV).
    pub energy: f64,
    /// Momentum (fm⁻¹).
    pub k: f64,
    /// Velocity ħk/μ in units of c.
    pub velocity: f64,
    pub reduced_mass: f64,
}

impl Kinematics {
    pub fn new(energy: f64, reduced_mass: f64) -> Result<Self> {
        let k = momentum_from_energy(energy, reduced_mass)?;
        Ok(Kinematics {
            energy,
            k,
            velocity: HBAR_C * k / reduced_mass,
            reduced_mass,
        })
    }

    /// Sommerfeld parameter ζ = Z₁Z₂e²μ/(ħc²k).
    pub fn sommerfeld(&self, charge_product: f64) -> f64 {
        if charge_product == 0.0 {
            return 0.0;
        }
        charge_product * E_SQUARED * self.reduced_mass / (HBAR_C * HBAR_C * self.k)
    }
}
