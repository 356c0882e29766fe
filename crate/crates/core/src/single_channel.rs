//! Short-range single-channel scattering in the oscillator representation.

use std::f64::consts::PI;

use crate::basis::{AsymptoticSolutions, OscillatorBasis};
use crate::error::{HorseError, Result};
use crate::hamiltonian::TruncatedHamiltonian;

/// Phase shift and oscillator-representation coefficients at one energy.
#[derive(Debug, Clone)]
pub struct ScatteringSolution {
    pub energy: f64,
    pub k: f64,
    /// δ_l in (−π/2, π/2].
    pub delta: f64,
    pub n_trunc: usize,
    pub basis: OscillatorBasis,
    /// a_n for n = 0..=n_asym: 𝒢_{nN}a^as_{N+1} up to N, cos δ S_n + sin δ C_n beyond.
    pub coefficients: Vec<f64>,
    /// a_N evaluated from the asymptotic form, for the matching check.
    pub a_n_asymptotic: f64,
}

impl ScatteringSolution {
    /// a_N from the interior formula and from the asymptotic form.
    pub fn matching_pair(&self) -> (f64, f64) {
        (self.coefficients[self.n_trunc], self.a_n_asymptotic)
    }

    pub fn n_asym(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// ũ(r) = r·Σ_{n≤M} a_n R_nl(r).
    pub fn reconstruct(&self, r_grid: &[f64], m: usize) -> Result<Vec<f64>> {
        reconstruct_wavefunction(&self.basis, &self.coefficients, r_grid, m)
    }
}

/// r·Σ_{n≤M} a_n R_nl(r) on a grid.
pub fn reconstruct_wavefunction(basis: &OscillatorBasis, a: &[f64], r_grid: &[f64], m: usize) -> Result<Vec<f64>> {
    if m >= a.len() {
        return Err(HorseError::invalid("M", m as f64, format!("only {} coefficients available", a.len())));
    }
    Ok(r_grid
        .iter()
        .map(|&r| {
            if r == 0.0 {
                return 0.0;
            }
            let rf = basis.radial_functions(m, r);
            r * rf.iter().zip(a).map(|(x, y)| x * y).sum::<f64>()
        })
        .collect())
}

/// Default asymptotic tail length max(2N, 50).
pub fn default_n_asym(n_trunc: usize) -> usize {
    (2 * n_trunc).max(50)
}

/// (S_N − 𝒢S_{N+1}, C_N − 𝒢C_{N+1}).
pub(crate) fn matching_combinations(sol: &AsymptoticSolutions, n: usize, g: f64) -> (f64, f64) {
    (sol.s[n] - g * sol.s[n + 1], sol.c[n] - g * sol.c[n + 1])
}

/// tan δ = −num/den folded into (−π/2, π/2].
pub(crate) fn angle_from_ratio(num: f64, den: f64, energy: f64) -> Result<f64> {
    let scale = num.abs().max(den.abs());
    if scale < 1e-14 {
        return Err(HorseError::Degenerate { energy });
    }
    let mut d = (-num).atan2(den);
    if d > PI / 2.0 {
        d -= PI;
    } else if d <= -PI / 2.0 {
        d += PI;
    }
    Ok(d)
}

/// δ_l(E) from tan δ = −(S_N − 𝒢_NN S_{N+1})/(C_N − 𝒢_NN C_{N+1}).
pub fn phase_shift(h: &TruncatedHamiltonian, energy: f64) -> Result<f64> {
    let n = h.n_trunc;
    let k = h.basis.momentum(energy)?;
    let sol = h.basis.asymptotic_solutions(n + 1, k)?;
    let g = h.g_nn(energy)?;
    let (num, den) = matching_combinations(&sol, n, g);
    angle_from_ratio(num, den, energy)
}

/// Phase shift and coefficients a_n for n ≤ n_asym (n_asym ≥ N+1).
pub fn coefficients(h: &TruncatedHamiltonian, energy: f64, n_asym: usize) -> Result<ScatteringSolution> {
    let n = h.n_trunc;
    if n_asym < n + 1 {
        return Err(HorseError::invalid("n_asym", n_asym as f64, "must be at least N + 1"));
    }
    let k = h.basis.momentum(energy)?;
    let sol = h.basis.asymptotic_solutions(n_asym, k)?;
    let col = h.g_column(energy)?;
    let (num, den) = matching_combinations(&sol, n, col[n]);
    let delta = angle_from_ratio(num, den, energy)?;
    let (sd, cd) = delta.sin_cos();
    let asym = |m: usize| cd * sol.s[m] + sd * sol.c[m];
    let edge = asym(n + 1);
    let mut a: Vec<f64> = col.iter().map(|g| g * edge).collect();
    a.extend((n + 1..=n_asym).map(asym));
    Ok(ScatteringSolution {
        energy,
        k,
        delta,
        n_trunc: n,
        basis: h.basis,
        coefficients: a,
        a_n_asymptotic: asym(n),
    })
}

/// Removes the π jumps of a branch-folded phase sequence.
pub fn unwrap_phases(raw: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(raw.len());
    let mut offset = 0.0;
    for (i, &d) in raw.iter().enumerate() {
        if i > 0 {
            let prev = raw[i - 1];
            let jump = d - prev;
            if jump > PI / 2.0 {
                offset -= PI;
            } else if jump < -PI / 2.0 {
                offset += PI;
            }
        }
        out.push(d + offset);
    }
    out
}

/// Phase shifts on an energy grid; energies on a pole are nudged by 1e-7 MeV.
pub fn phase_shift_sweep(h: &TruncatedHamiltonian, energies: &[f64]) -> Result<Vec<f64>> {
    energies
        .iter()
        .map(|&e| match phase_shift(h, e) {
            Err(HorseError::Pole { .. }) => phase_shift(h, e + 1e-7),
            other => other,
        })
        .collect()
}
