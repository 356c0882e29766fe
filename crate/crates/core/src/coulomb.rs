//! Charged-particle scattering through an auxiliary potential cut at a
//! channel radius b, matched to Coulomb functions by quasi-Wronskians.

use std::sync::Arc;

use rayon::prelude::*;

use crate::basis::OscillatorBasis;
use crate::error::{HorseError, Result};
use crate::hamiltonian::TruncatedHamiltonian;
use crate::potential::{Cut, RadialPotential, SharedPotential, WithCoulomb};
use crate::single_channel::{self, angle_from_ratio, matching_combinations, unwrap_phases};
use crate::specfun::{coulomb_phase, coulomb_wave, spherical_bessel};

/// Radius where |V| first stays below `fraction` of its largest magnitude.
pub fn estimate_nuclear_radius(pot: &dyn RadialPotential, fraction: f64) -> f64 {
    let r_end = pot.range_hint().min(50.0);
    let steps = 5000;
    let dr = r_end / steps as f64;
    let vals: Vec<f64> = (1..=steps).map(|i| pot.value(i as f64 * dr).abs()).collect();
    let peak = vals.iter().copied().fold(0.0, f64::max);
    let last = vals.iter().rposition(|&v| v > fraction * peak).unwrap_or(0);
    (last + 1) as f64 * dr
}

#[derive(Debug, Clone)]
pub struct CoulombProblem {
    pub nuclear: SharedPotential,
    pub charge_product: f64,
    pub b: f64,
    pub basis: OscillatorBasis,
    pub n_trunc: usize,
    /// Lower end of the channel-radius window (fm).
    pub nuclear_radius: f64,
}

impl CoulombProblem {
    /// Nuclear radius estimated as the 1% point of |V_Nucl|.
    pub fn new(nuclear: SharedPotential, charge_product: f64, b: f64, basis: OscillatorBasis, n_trunc: usize) -> Self {
        let nuclear_radius = estimate_nuclear_radius(nuclear.as_ref(), 0.01);
        CoulombProblem {
            nuclear,
            charge_product,
            b,
            basis,
            n_trunc,
            nuclear_radius,
        }
    }

    pub fn with_radius(&self, b: f64) -> Self {
        CoulombProblem { b, ..self.clone() }
    }

    /// [R_Nucl, r^cl_N) as (lower, upper).
    pub fn window(&self) -> (f64, f64) {
        (self.nuclear_radius, self.basis.classical_turning_point(self.n_trunc))
    }

    pub fn in_window(&self) -> bool {
        let (lo, hi) = self.window();
        self.b >= lo && self.b < hi
    }

    pub fn check_window(&self) -> Result<()> {
        let (lower, upper) = self.window();
        if self.in_window() {
            Ok(())
        } else {
            Err(HorseError::RadiusWindow { b: self.b, lower, upper })
        }
    }

    /// V_Nucl + Z₁Z₂e²/r for r ≤ b, zero beyond.
    pub fn auxiliary_potential(&self) -> SharedPotential {
        Arc::new(Cut {
            inner: Arc::new(WithCoulomb {
                nuclear: self.nuclear.clone(),
                charge_product: self.charge_product,
            }),
            b: self.b,
        })
    }

    /// Diagonalizes the auxiliary Hamiltonian; checks the radius window.
    pub fn solver(&self) -> Result<CoulombSolver> {
        self.check_window()?;
        self.solver_unchecked()
    }

    fn solver_unchecked(&self) -> Result<CoulombSolver> {
        let h = TruncatedHamiltonian::diagonalize(self.basis, self.auxiliary_potential().as_ref(), self.n_trunc, false)?;
        Ok(CoulombSolver {
            problem: self.clone(),
            h,
        })
    }
}

/// Phase shifts at one energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoulombPhase {
    pub energy: f64,
    /// Nuclear phase shift δ_l relative to F_l, G_l, in (−π/2, π/2].
    pub delta: f64,
    /// Phase shift of the auxiliary short-range problem.
    pub delta_short: f64,
    /// Coulomb phase σ_l = arg Γ(l+1+iη).
    pub sigma: f64,
    pub eta: f64,
}

impl CoulombPhase {
    pub fn total(&self) -> f64 {
        self.delta + self.sigma
    }
}

/// Renormalized auxiliary solution.
#[derive(Debug, Clone)]
pub struct Renormalized {
    /// 𝒩 = u(b)/u^Sh(b).
    pub factor: f64,
    pub phase: CoulombPhase,
    /// 𝒩·a_n^Sh.
    pub coefficients: Vec<f64>,
}

/// Wronskians at r = b of j_l, n_l with F̂ = F/r and Ĝ = G/r.
struct Wronskians {
    j_f: f64,
    n_f: f64,
    j_g: f64,
    n_g: f64,
}

fn wronskians(l: usize, k: f64, eta: f64, b: f64) -> Result<Wronskians> {
    let sb = spherical_bessel(l, k * b)?;
    let cw = coulomb_wave(l, eta, k * b)?;
    let (j, dj, y, dy) = (sb.j, k * sb.dj, sb.n, k * sb.dn);
    let f = cw.f / b;
    let df = k * cw.df / b - cw.f / (b * b);
    let g = cw.g / b;
    let dg = k * cw.dg / b - cw.g / (b * b);
    let w = |a: f64, da: f64, c: f64, dc: f64| a * dc - da * c;
    Ok(Wronskians {
        j_f: w(j, dj, f, df),
        n_f: w(y, dy, f, df),
        j_g: w(j, dj, g, dg),
        n_g: w(y, dy, g, dg),
    })
}

#[derive(Debug, Clone)]
pub struct CoulombSolver {
    pub problem: CoulombProblem,
    /// Truncated auxiliary Hamiltonian.
    pub h: TruncatedHamiltonian,
}

impl CoulombSolver {
    fn eta(&self, k: f64) -> f64 {
        self.problem.charge_product * crate::constants::E_SQUARED * self.problem.basis.reduced_mass
            / (crate::constants::HBAR_C * crate::constants::HBAR_C * k)
    }

    /// δ_l from the quasi-Wronskian combination with α = C_N − 𝒢C_{N+1},
    /// β = S_N − 𝒢S_{N+1}.
    pub fn phase_shift(&self, energy: f64) -> Result<CoulombPhase> {
        let basis = &self.problem.basis;
        let n = self.h.n_trunc;
        let k = basis.momentum(energy)?;
        let sol = basis.asymptotic_solutions(n + 1, k)?;
        let g = self.h.g_nn(energy)?;
        let (beta, alpha) = matching_combinations(&sol, n, g);
        let delta_short = angle_from_ratio(beta, alpha, energy)?;
        let eta = self.eta(k);
        let w = wronskians(basis.l, k, eta, self.problem.b)?;
        let num = alpha * w.j_f + beta * w.n_f;
        let den = alpha * w.j_g + beta * w.n_g;
        Ok(CoulombPhase {
            energy,
            delta: angle_from_ratio(num, den, energy)?,
            delta_short,
            sigma: coulomb_phase(basis.l, eta),
            eta,
        })
    }

    /// Same δ_l through tan δ^Sh:
    /// tan δ = −(W(j,F̂) − W(n,F̂) tan δ^Sh)/(W(j,Ĝ) − W(n,Ĝ) tan δ^Sh).
    pub fn phase_shift_from_short(&self, energy: f64) -> Result<f64> {
        let basis = &self.problem.basis;
        let k = basis.momentum(energy)?;
        let ds = single_channel::phase_shift(&self.h, energy)?;
        let w = wronskians(basis.l, k, self.eta(k), self.problem.b)?;
        let (s, c) = ds.sin_cos();
        angle_from_ratio(c * w.j_f - s * w.n_f, c * w.j_g - s * w.n_g, energy)
    }

    /// 𝒩 with u(b) = (cos δ F + sin δ G)/(b√v), u^Sh(b) = (k/√v)(cos δ^Sh j − sin δ^Sh n).
    pub fn renormalization(&self, energy: f64) -> Result<(f64, CoulombPhase)> {
        let ph = self.phase_shift(energy)?;
        let basis = &self.problem.basis;
        let b = self.problem.b;
        let kin = basis.kinematics(energy)?;
        let sv = kin.velocity.sqrt();
        let cw = coulomb_wave(basis.l, ph.eta, kin.k * b)?;
        let sb = spherical_bessel(basis.l, kin.k * b)?;
        let u = (ph.delta.cos() * cw.f + ph.delta.sin() * cw.g) / (b * sv);
        let u_short = kin.k / sv * (ph.delta_short.cos() * sb.j - ph.delta_short.sin() * sb.n);
        if u_short.abs() < 1e-12 * (kin.k / sv) {
            return Err(HorseError::NodeAtRadius { b });
        }
        Ok((u / u_short, ph))
    }

    /// Renormalized coefficients 𝒩·a_n^Sh for n ≤ n_asym.
    pub fn renormalize(&self, energy: f64, n_asym: usize) -> Result<Renormalized> {
        let (factor, phase) = self.renormalization(energy)?;
        let sol = single_channel::coefficients(&self.h, energy, n_asym)?;
        // the auxiliary solution carries the folded δ^Sh
        let sign = (sol.delta - phase.delta_short).cos().signum();
        Ok(Renormalized {
            factor,
            phase,
            coefficients: sol.coefficients.iter().map(|a| sign * factor * a).collect(),
        })
    }

    /// Interior wave ψ-form r·Σ 𝒩a_n^Sh R_n on r ≤ b, and the exterior
    /// (cos δ F + sin δ G)/√v beyond.
    pub fn wave_function(&self, energy: f64, r_grid: &[f64], m: usize) -> Result<Vec<f64>> {
        let ren = self.renormalize(energy, m.max(self.h.n_trunc + 1))?;
        let basis = &self.problem.basis;
        let kin = basis.kinematics(energy)?;
        let sv = kin.velocity.sqrt();
        let (s, c) = ren.phase.delta.sin_cos();
        let b = self.problem.b;
        let inner: Vec<f64> = r_grid.iter().copied().filter(|&r| r <= b).collect();
        let mut out = single_channel::reconstruct_wavefunction(basis, &ren.coefficients, &inner, m)?;
        for &r in r_grid.iter().filter(|&&r| r > b) {
            let cw = coulomb_wave(basis.l, ren.phase.eta, kin.k * r)?;
            out.push((c * cw.f + s * cw.g) / sv);
        }
        Ok(out)
    }
}

/// δ_l at one energy for a single problem (diagonalizes once).
pub fn coulomb_phase_shift(p: &CoulombProblem, energy: f64) -> Result<CoulombPhase> {
    p.solver()?.phase_shift(energy)
}

/// One point of a b-scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateauPoint {
    pub b: f64,
    pub delta: f64,
    pub in_window: bool,
}

/// δ_l(b) over a grid of channel radii; out-of-window radii are flagged but
/// still computed. Continuous in b.
pub fn plateau_scan(template: &CoulombProblem, energy: f64, b_grid: &[f64]) -> Result<Vec<PlateauPoint>> {
    let limit = 2.0 * template.basis.classical_turning_point(template.n_trunc);
    let raw: Vec<Result<PlateauPoint>> = b_grid
        .par_iter()
        .map(|&b| {
            if !(b > 0.0 && b < limit) {
                return Err(HorseError::invalid("b", b, "outside (0, 2 r_N^cl)"));
            }
            let p = template.with_radius(b);
            let ph = p.solver_unchecked()?.phase_shift(energy)?;
            Ok(PlateauPoint {
                b,
                delta: ph.delta,
                in_window: p.in_window(),
            })
        })
        .collect();
    let mut pts = raw.into_iter().collect::<Result<Vec<_>>>()?;
    let unwrapped = unwrap_phases(&pts.iter().map(|p| p.delta).collect::<Vec<_>>());
    for (p, d) in pts.iter_mut().zip(unwrapped) {
        p.delta = d;
    }
    Ok(pts)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plateau {
    pub b_lower: f64,
    pub b_upper: f64,
    pub mean: f64,
    /// max − min of δ over the interval.
    pub spread: f64,
}

impl Plateau {
    pub fn width(&self) -> f64 {
        self.b_upper - self.b_lower
    }
}

/// Widest run of consecutive points with max − min below `tolerance`.
pub fn find_plateau(points: &[PlateauPoint], tolerance: f64) -> Option<Plateau> {
    let mut best: Option<Plateau> = None;
    for i in 0..points.len() {
        let (mut lo, mut hi) = (points[i].delta, points[i].delta);
        for j in i + 1..points.len() {
            lo = lo.min(points[j].delta);
            hi = hi.max(points[j].delta);
            if hi - lo >= tolerance {
                break;
            }
            let width = points[j].b - points[i].b;
            if best.is_none_or(|b| width > b.width()) {
                let mean = points[i..=j].iter().map(|p| p.delta).sum::<f64>() / (j - i + 1) as f64;
                best = Some(Plateau {
                    b_lower: points[i].b,
                    b_upper: points[j].b,
                    mean,
                    spread: hi - lo,
                });
            }
        }
    }
    best
}

/// Energy of the steepest ascent of an unwrapped phase sequence and the
/// slope there (rad/MeV).
pub fn resonance_position(energies: &[f64], deltas: &[f64]) -> Option<(f64, f64)> {
    let d = unwrap_phases(deltas);
    energies
        .windows(2)
        .zip(d.windows(2))
        .map(|(e, d)| (0.5 * (e[0] + e[1]), (d[1] - d[0]) / (e[1] - e[0])))
        .max_by(|a, b| a.1.total_cmp(&b.1))
}
