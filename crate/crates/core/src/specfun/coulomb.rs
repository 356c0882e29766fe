use num_complex::Complex64;

use super::bessel::{spherical_j_upto, spherical_n_upto};
use super::gamma::coulomb_phase;
use crate::error::{HorseError, Result};

const EPS: f64 = 1e-16;
const MAX_ITER: usize = 200_000;

/// Regular and irregular Coulomb functions at one (l, η, ρ), with ρ-derivatives
/// and the Coulomb phase σ_l = arg Γ(1 + l + iη).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoulombPair {
    pub f: f64,
    pub g: f64,
    pub df: f64,
    pub dg: f64,
    pub sigma: f64,
}

impl CoulombPair {
    /// F'G − FG', equal to 1 for the standard normalization.
    pub fn wronskian(&self) -> f64 {
        self.df * self.g - self.f * self.dg
    }
}

/// F_l(η, ρ), G_l(η, ρ) and derivatives.
///
/// Steed's method (CF1 + CF2) beyond ρ = 2·max(η, 0) + 2. Inside that point F comes
/// from its power series and G₀ from inward integration of the Coulomb equation
/// started from Steed values, then upward recurrence in l.
pub fn coulomb_wave(l: usize, eta: f64, rho: f64) -> Result<CoulombPair> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(HorseError::Coulomb {
            l,
            eta,
            rho,
            reason: "rho must be positive and finite",
        });
    }
    if !eta.is_finite() {
        return Err(HorseError::Coulomb {
            l,
            eta,
            rho,
            reason: "eta must be finite",
        });
    }
    let sigma = coulomb_phase(l, eta);
    if eta == 0.0 {
        return Ok(riccati(l, rho, sigma));
    }
    let rho_switch = 2.0 * eta.max(0.0) + 2.0;
    let (f, df, g, dg) = if rho >= rho_switch {
        steed(l, eta, rho)?
    } else {
        let (f, df) = regular_series(l, eta, rho)?;
        let (g0, dg0) = irregular_inward(eta, rho, rho_switch)?;
        let (g, dg) = g_upward(l, eta, rho, g0, dg0);
        (f, df, g, dg)
    };
    if !(f.is_finite() && g.is_finite() && df.is_finite() && dg.is_finite()) {
        return Err(HorseError::Coulomb {
            l,
            eta,
            rho,
            reason: "overflow",
        });
    }
    Ok(CoulombPair {
        f,
        g,
        df,
        dg,
        sigma,
    })
}

fn riccati(l: usize, rho: f64, sigma: f64) -> CoulombPair {
    let j = spherical_j_upto(l + 1, rho);
    let n = spherical_n_upto(l + 1, rho);
    let lf = l as f64;
    let dj = lf / rho * j[l] - j[l + 1];
    let dn = lf / rho * n[l] - n[l + 1];
    CoulombPair {
        f: rho * j[l],
        df: j[l] + rho * dj,
        g: -rho * n[l],
        dg: -n[l] - rho * dn,
        sigma,
    }
}

/// CF1: F'_L/F_L and the sign of F_L.
fn cf1(l: usize, eta: f64, rho: f64) -> Result<(f64, f64)> {
    let xi = 1.0 / rho;
    let mut sign = 1.0;
    let mut pk = l as f64 + 1.0;
    let mut ek = eta / pk;
    let mut f = ek + pk * xi;
    let mut pk1 = pk + 1.0;
    let mut d = 1.0 / ((pk + pk1) * (xi + ek / pk1));
    let mut df = -(1.0 + ek * ek) * d;
    if d < 0.0 {
        sign = -sign;
    }
    f += df;
    for _ in 0..MAX_ITER {
        pk = pk1;
        pk1 += 1.0;
        ek = eta / pk;
        let tk = (pk + pk1) * (xi + ek / pk1);
        d = 1.0 / (tk - d * (1.0 + ek * ek));
        if d < 0.0 {
            sign = -sign;
        }
        df *= d * tk - 1.0;
        f += df;
        if df.abs() < f.abs() * EPS {
            return Ok((f, sign));
        }
    }
    Err(HorseError::Coulomb {
        l,
        eta,
        rho,
        reason: "CF1 did not converge",
    })
}

/// CF2 at L = 0: p + iq = (G₀' + iF₀')/(G₀ + iF₀).
fn cf2(eta: f64, rho: f64) -> Result<Complex64> {
    let i = Complex64::i();
    // Complex division squares the modulus, so the Lentz floor must stay well above 1e-154.
    let tiny = 1e-100;
    let mut f = Complex64::new(tiny, 0.0);
    let mut c = f;
    let mut d = Complex64::new(0.0, 0.0);
    for k in 1..MAX_ITER {
        let kf = k as f64;
        let a = Complex64::new(kf - 1.0, eta) * Complex64::new(kf, eta);
        let b = Complex64::new(2.0 * (rho - eta), 2.0 * kf);
        d = b + a * d;
        if d.norm() < tiny {
            d = Complex64::new(tiny, 0.0);
        }
        d = 1.0 / d;
        c = b + a / c;
        if c.norm() < tiny {
            c = Complex64::new(tiny, 0.0);
        }
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).norm() < 4.0 * EPS {
            let tail = if f.norm() == tiny { Complex64::new(0.0, 0.0) } else { f };
            return Ok(i * (1.0 - eta / rho) + i / rho * tail);
        }
    }
    Err(HorseError::Coulomb {
        l: 0,
        eta,
        rho,
        reason: "CF2 did not converge",
    })
}

fn steed(l: usize, eta: f64, rho: f64) -> Result<(f64, f64, f64, f64)> {
    let (f_ratio, sign) = cf1(l, eta, rho)?;
    // Unnormalized downward recurrence from F_l = sign.
    let mut fl = sign;
    let mut dfl = f_ratio * sign;
    let mut f_top = fl;
    for big_l in (1..=l).rev() {
        let lf = big_l as f64;
        let ek = eta / lf;
        let rl = (1.0 + ek * ek).sqrt();
        let sl = lf / rho + ek;
        let f_down = (sl * fl + dfl) / rl;
        dfl = sl * f_down - rl * fl;
        fl = f_down;
        if fl.abs() > 1e250 {
            fl *= 1e-250;
            dfl *= 1e-250;
            f_top *= 1e-250;
        }
    }
    let pq = cf2(eta, rho)?;
    let (p, q) = (pq.re, pq.im);
    let f0_ratio = dfl / fl;
    let gam = (f0_ratio - p) / q;
    let w = 1.0 / ((f0_ratio - p) * gam + q).sqrt();
    let f0 = w.copysign(fl);
    let scale = f0 / fl;
    let df0 = f0_ratio * f0;
    let g0 = gam * f0;
    let dg0 = (p * gam - q) * f0;
    let fl_final = f_top * scale;
    let dfl_final = f_ratio * fl_final;
    if l == 0 {
        return Ok((f0, df0, g0, dg0));
    }
    let (g, dg) = g_upward(l, eta, rho, g0, dg0);
    Ok((fl_final, dfl_final, g, dg))
}

fn g_upward(l: usize, eta: f64, rho: f64, g0: f64, dg0: f64) -> (f64, f64) {
    let mut g = g0;
    let mut dg = dg0;
    for big_l in 1..=l {
        let lf = big_l as f64;
        let ek = eta / lf;
        let rl = (1.0 + ek * ek).sqrt();
        let sl = lf / rho + ek;
        let g_up = (sl * g - dg) / rl;
        dg = rl * g - sl * g_up;
        g = g_up;
    }
    (g, dg)
}

/// Coulomb normalization C_L(η).
fn normalization(l: usize, eta: f64) -> f64 {
    let x = 2.0 * std::f64::consts::PI * eta;
    let mut c = if x.abs() < 1e-300 {
        1.0
    } else {
        (x / x.exp_m1()).sqrt()
    };
    for big_l in 1..=l {
        let lf = big_l as f64;
        c *= (lf * lf + eta * eta).sqrt() / (lf * (2.0 * lf + 1.0));
    }
    c
}

/// F_l and F_l' from F = C_l Σ_{k ≥ l+1} A_k ρ^k.
fn regular_series(l: usize, eta: f64, rho: f64) -> Result<(f64, f64)> {
    let lf = l as f64;
    let cl = normalization(l, eta);
    // Work with A_k ρ^(k-l-1) so the leading term is 1.
    let mut a_prev2 = 0.0;
    let mut a_prev = 1.0;
    let mut sum = 1.0;
    let mut dsum = lf + 1.0;
    let mut max_term: f64 = 1.0;
    let mut small = 0;
    for k in (l + 2)..(l + 2 + 5000) {
        let kf = k as f64;
        let a = if k == l + 2 {
            eta / (lf + 1.0) * rho
        } else {
            (2.0 * eta * rho * a_prev - rho * rho * a_prev2) / ((kf + lf) * (kf - lf - 1.0))
        };
        sum += a;
        dsum += kf * a;
        max_term = max_term.max(a.abs());
        a_prev2 = a_prev;
        a_prev = a;
        if a.abs() < 1e-17 * sum.abs() && a_prev2.abs() < 1e-16 * sum.abs() {
            small += 1;
            if small >= 2 {
                let r_l = rho.powi(l as i32);
                let f = cl * r_l * rho * sum;
                let df = cl * r_l * dsum;
                return Ok((f, df));
            }
        } else {
            small = 0;
        }
    }
    Err(HorseError::Coulomb {
        l,
        eta,
        rho,
        reason: "regular power series did not converge",
    })
}

/// G₀ and G₀' at ρ by RK4 integration inward from `rho_start`.
fn irregular_inward(eta: f64, rho: f64, rho_start: f64) -> Result<(f64, f64)> {
    let (_, _, g, dg) = steed(0, eta, rho_start)?;
    let rhs = |x: f64, y: [f64; 2]| [y[1], (2.0 * eta / x - 1.0) * y[0]];
    let mut x = rho_start;
    let mut y = [g, dg];
    while x > rho {
        let scale = (1.0 + (2.0 * eta / x).abs()).sqrt();
        let mut h = -0.004 / scale;
        if x + h < rho {
            h = rho - x;
        }
        let k1 = rhs(x, y);
        let k2 = rhs(x + 0.5 * h, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
        let k3 = rhs(x + 0.5 * h, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
        let k4 = rhs(x + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        y[0] += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
        y[1] += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
        x += h;
        if (x - rho).abs() < 1e-14 * rho {
            break;
        }
    }
    Ok((y[0], y[1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_charge_is_riccati_bessel() {
        for l in 0..=4 {
            for &rho in &[0.5, 2.0, 10.0] {
                let c = coulomb_wave(l, 0.0, rho).unwrap();
                let j = spherical_j_upto(l, rho)[l];
                let n = spherical_n_upto(l, rho)[l];
                assert!((c.f - rho * j).abs() <= 1e-10 * (rho * j).abs());
                assert!((c.g + rho * n).abs() <= 1e-10 * (rho * n).abs());
                assert_eq!(c.sigma, 0.0);
            }
        }
    }

    #[test]
    fn steed_and_series_agree_across_switch() {
        for &eta in &[0.3, 1.0, 2.5] {
            for l in 0..=3 {
                let rs = 2.0 * eta + 2.0;
                let a = coulomb_wave(l, eta, rs * (1.0 - 1e-9)).unwrap();
                let b = coulomb_wave(l, eta, rs).unwrap();
                assert!((a.f - b.f).abs() < 1e-7 * b.f.abs().max(1e-3), "F l={l} eta={eta}");
                assert!((a.g - b.g).abs() < 1e-7 * b.g.abs().max(1e-3), "G l={l} eta={eta}");
            }
        }
    }

    /// Numerov integration of u'' = (2η/ρ − 1 + l(l+1)/ρ²)u from the series start.
    fn numerov_regular(l: usize, eta: f64, rho: f64) -> f64 {
        let n = 200_000;
        let h = rho / n as f64;
        let lf = l as f64;
        let q = |x: f64| 2.0 * eta / x - 1.0 + lf * (lf + 1.0) / (x * x);
        let c = normalization(l, eta);
        let start = |x: f64| {
            c * x.powi(l as i32 + 1)
                * (1.0 + eta / (lf + 1.0) * x
                    + (2.0 * eta * eta / (lf + 1.0) - 1.0) / ((2.0 * lf + 3.0) * 2.0) * x * x)
        };
        let mut u0 = start(h);
        let mut u1 = start(2.0 * h);
        for i in 2..n {
            let x0 = (i - 1) as f64 * h;
            let x1 = i as f64 * h;
            let x2 = (i + 1) as f64 * h;
            let w0 = 1.0 - h * h / 12.0 * q(x0);
            let w1 = 1.0 - h * h / 12.0 * q(x1);
            let w2 = 1.0 - h * h / 12.0 * q(x2);
            let u2 = ((12.0 - 10.0 * w1) * u1 - w0 * u0) / w2;
            u0 = u1;
            u1 = u2;
        }
        u1
    }

    #[test]
    fn eta_one_rho_five_against_integration() {
        let c = coulomb_wave(0, 1.0, 5.0).unwrap();
        assert!((c.wronskian() - 1.0).abs() < 1e-8);
        let oracle = numerov_regular(0, 1.0, 5.0);
        assert!((c.f - oracle).abs() < 1e-6 * oracle.abs(), "{} vs {}", c.f, oracle);
    }

    #[test]
    fn wronskian_grid() {
        for l in 0..=4 {
            for ie in 0..=10 {
                let eta = 0.5 * ie as f64;
                for ir in 0..=59 {
                    let rho = 0.5 + 0.5 * ir as f64;
                    let c = coulomb_wave(l, eta, rho).unwrap();
                    let w = c.wronskian();
                    assert!((w - 1.0).abs() < 1e-8, "l={l} eta={eta} rho={rho} W={w}");
                }
            }
        }
    }

    #[test]
    fn sign_beyond_nodes() {
        // F_0 changes sign as ρ passes its zeros; compare to integration at a point
        // where F is negative.
        let eta = 0.5;
        let rho = 9.0;
        let c = coulomb_wave(0, eta, rho).unwrap();
        let oracle = numerov_regular(0, eta, rho);
        assert!(c.f.signum() == oracle.signum());
        assert!((c.f - oracle).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_rho() {
        assert!(coulomb_wave(0, 1.0, 0.0).is_err());
        assert!(coulomb_wave(0, 1.0, -1.0).is_err());
    }
}
