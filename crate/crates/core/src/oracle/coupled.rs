use nalgebra::DMatrix;
use num_complex::Complex64;

use super::numerov::{NumerovGrid, DEFAULT_STEP, SECOND_MATCH_OFFSET};
use crate::constants::{Kinematics, E_SQUARED, HBAR_C};
use crate::error::{HorseError, Result};
use crate::specfun::coulomb_wave;

/// Channel data the oracle needs; nothing about the oscillator basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleChannel {
    pub l: usize,
    pub reduced_mass: f64,
    pub threshold: f64,
    pub charge_product: f64,
}

/// Coupled radial equations ū_i'' = Σ_j F_ij ū_j with a nuclear potential
/// matrix V(r) (MeV); point Coulomb terms are added on the diagonal.
pub struct CoupledProblem<'a> {
    pub channels: Vec<OracleChannel>,
    pub potential: &'a (dyn Fn(f64) -> DMatrix<f64> + Sync),
    pub breakpoints: Vec<f64>,
    /// Beyond this radius V(r) is negligible (fm).
    pub range: f64,
}

/// S-matrix from direct integration, with its self-checks.
#[derive(Debug, Clone)]
pub struct CoupledOracle {
    pub s: DMatrix<Complex64>,
    /// ‖S(h) − S(h/2)‖_F.
    pub error_estimate: f64,
    pub r_match: f64,
}

impl CoupledProblem<'_> {
    fn m(&self) -> usize {
        self.channels.len()
    }

    fn f_matrix(&self, r: f64, energy: f64) -> DMatrix<f64> {
        let v = (self.potential)(r);
        let m = self.m();
        DMatrix::from_fn(m, m, |i, j| {
            let c = &self.channels[i];
            let s = 2.0 * c.reduced_mass / (HBAR_C * HBAR_C);
            let mut x = s * v[(i, j)];
            if i == j {
                let lf = c.l as f64;
                x += lf * (lf + 1.0) / (r * r) + s * (c.charge_product * E_SQUARED / r - (energy - c.threshold));
            }
            x
        })
    }

    /// M regular solution columns on the grid; returns per-segment (start, h, Ū_i).
    fn integrate(&self, energy: f64, grid: &NumerovGrid) -> Result<Vec<(f64, f64, Vec<DMatrix<f64>>)>> {
        let m = self.m();
        let mut cuts = vec![grid.r_min];
        let mut inner: Vec<f64> = self
            .breakpoints
            .iter()
            .copied()
            .filter(|&b| b > grid.r_min + 4.0 * grid.h && b < grid.r_max - 4.0 * grid.h)
            .collect();
        inner.sort_by(|a, b| a.total_cmp(b));
        cuts.extend(inner);
        cuts.push(grid.r_max);

        let start = |r: f64| -> DMatrix<f64> {
            let v0 = (self.potential)(grid.r_min);
            DMatrix::from_fn(m, m, |i, j| {
                let ci = &self.channels[i];
                let cj = &self.channels[j];
                let lj = cj.l as f64;
                let s = 2.0 * ci.reduced_mass / (HBAR_C * HBAR_C);
                if i == j {
                    let z = s * ci.charge_product * E_SQUARED;
                    let c1 = z / (2.0 * (lj + 1.0));
                    let w = s * (v0[(i, i)] - (energy - ci.threshold));
                    let c2 = (z * c1 + w) / (4.0 * lj + 6.0);
                    r.powi(cj.l as i32 + 1) * (1.0 + c1 * r + c2 * r * r)
                } else {
                    let li = ci.l as f64;
                    let den = (lj + 3.0) * (lj + 2.0) - li * (li + 1.0);
                    if den > 0.0 {
                        r.powi(cj.l as i32 + 3) * s * v0[(i, j)] / den
                    } else {
                        0.0
                    }
                }
            })
        };

        let mut out: Vec<(f64, f64, Vec<DMatrix<f64>>)> = Vec::new();
        for (seg, win) in cuts.windows(2).enumerate() {
            let (a, b) = (win[0], win[1]);
            let steps = ((b - a) / grid.h).ceil().max(4.0) as usize;
            let h = (b - a) / steps as f64;
            let eps = 1e-9 * h;
            let fv: Vec<DMatrix<f64>> = (0..=steps)
                .map(|i| {
                    let r = a + i as f64 * h;
                    let r = if i == 0 { r + eps } else if i == steps { r - eps } else { r };
                    self.f_matrix(r, energy)
                })
                .collect();
            let (u0, u1) = if seg == 0 {
                (start(a), start(a + h))
            } else {
                let (pa, ph, pu) = out.last().unwrap();
                let n = pu.len();
                let fe = |i: usize| {
                    let r = pa + i as f64 * ph;
                    self.f_matrix(if i == n - 1 { r - 1e-9 * ph } else { r }, energy)
                };
                let upp = |i: usize| fe(i) * &pu[i];
                let du = (&pu[n - 1] - &pu[n - 2]) / *ph + (upp(n - 1) * 7.0 + upp(n - 2) * 6.0 - upp(n - 3)) * (*ph / 24.0);
                let u = pu[n - 1].clone();
                let d1 = (&fv[0] * -3.0 + &fv[1] * 4.0 - &fv[2]) / (2.0 * h);
                let d2 = (&fv[0] - &fv[1] * 2.0 + &fv[2]) / (h * h);
                let u2 = &fv[0] * &u;
                let u3 = &d1 * &u + &fv[0] * &du;
                let u4 = &d2 * &u + &d1 * &du * 2.0 + &fv[0] * &u2;
                let next = &u + &du * h + u2 * (h * h / 2.0) + u3 * (h.powi(3) / 6.0) + u4 * (h.powi(4) / 24.0);
                (u, next)
            };
            let id = DMatrix::<f64>::identity(m, m);
            let t: Vec<DMatrix<f64>> = fv.iter().map(|f| f * (h * h / 12.0)).collect();
            let mut us = vec![u0, u1];
            for i in 1..steps {
                let rhs = (&id * 2.0 + &t[i] * 10.0) * &us[i] - (&id - &t[i - 1]) * &us[i - 1];
                let lhs = &id - &t[i + 1];
                let next = lhs
                    .lu()
                    .solve(&rhs)
                    .ok_or(HorseError::Singular {
                        context: "matrix Numerov step",
                        condition: f64::INFINITY,
                    })?;
                let big = next.amax();
                us.push(next);
                if big > 1e200 {
                    for x in us.iter_mut() {
                        *x *= 1e-200;
                    }
                }
            }
            out.push((a, h, us));
        }
        Ok(out)
    }

    fn s_at(&self, segs: &[(f64, f64, Vec<DMatrix<f64>>)], energy: f64, r: f64) -> Result<(DMatrix<Complex64>, f64)> {
        let m = self.m();
        for (a, h, us) in segs {
            let n = us.len();
            let end = a + (n - 1) as f64 * h;
            if r < *a || r > end || n < 5 {
                continue;
            }
            let i = (((r - a) / h).round() as usize).clamp(2, n - 3);
            let rr = a + i as f64 * h;
            let u = &us[i];
            let du = (&us[i - 2] - &us[i - 1] * 8.0 + &us[i + 1] * 8.0 - &us[i + 2]) / (12.0 * h);
            let mut am = DMatrix::<Complex64>::zeros(m, m);
            let mut bm = DMatrix::<Complex64>::zeros(m, m);
            for g in 0..m {
                let c = &self.channels[g];
                let kin = Kinematics::new(energy - c.threshold, c.reduced_mass)?;
                let k = kin.k;
                let sv = kin.velocity.sqrt();
                let cw = coulomb_wave(c.l, kin.sommerfeld(c.charge_product), k * rr)?;
                let hp = Complex64::new(cw.g, cw.f) / sv;
                let hm = hp.conj();
                let dhp = Complex64::new(cw.dg, cw.df) * k / sv;
                let dhm = dhp.conj();
                let w = Complex64::new(0.0, 2.0 * k / kin.velocity);
                for col in 0..m {
                    am[(g, col)] = (dhp * u[(g, col)] - hp * du[(g, col)]) / w;
                    bm[(g, col)] = (dhm * u[(g, col)] - hm * du[(g, col)]) / w;
                }
            }
            let inv = am.clone().try_inverse().ok_or(HorseError::Singular {
                context: "coupled oracle matching",
                condition: f64::INFINITY,
            })?;
            return Ok((bm * inv, rr));
        }
        Err(HorseError::invalid("r_match", r, "outside the integration grid"))
    }

    /// S-matrix at total energy E (all channels open).
    pub fn s_matrix(&self, energy: f64, r_match: Option<f64>, h: Option<f64>) -> Result<CoupledOracle> {
        for c in &self.channels {
            if energy <= c.threshold {
                return Err(HorseError::ClosedChannel { energy });
            }
        }
        let rm = r_match.unwrap_or(self.range + 1.0);
        let h = h.unwrap_or(DEFAULT_STEP);
        let grid = NumerovGrid::new(h, rm + SECOND_MATCH_OFFSET + 10.0 * h);
        let segs = self.integrate(energy, &grid)?;
        let (s1, r1) = self.s_at(&segs, energy, rm)?;
        let (s2, r2) = self.s_at(&segs, energy, rm + SECOND_MATCH_OFFSET)?;
        let diff = (&s1 - &s2).norm();
        if diff > 1e-5 {
            return Err(HorseError::MatchingInstability { r1, r2, diff });
        }
        let fine = self.integrate(energy, &grid.halved())?;
        let (sf, _) = self.s_at(&fine, energy, rm)?;
        Ok(CoupledOracle {
            error_estimate: (&sf - &s1).norm(),
            s: sf,
            r_match: r1,
        })
    }
}
