//! Oscillator radial functions and the free solutions S_nl(k), C_nl(k) of the
//! kinetic-energy three-term recurrence.

use nalgebra::DMatrix;
use std::f64::consts::PI;

use crate::constants::{oscillator_radius, Kinematics, HBAR_C};
use crate::error::{HorseError, Result};
use crate::specfun::{confluent_hypergeometric, gamma, laguerre, ln_gamma, spherical_bessel};

/// One partial wave of the oscillator basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorBasis {
    /// Level spacing ħω (MeV).
    pub hbar_omega: f64,
    /// Oscillator radius r₀ (fm).
    pub r0: f64,
    /// Reduced mass (MeV/c²).
    pub reduced_mass: f64,
    pub l: usize,
}

impl OscillatorBasis {
    pub fn new(hbar_omega: f64, reduced_mass: f64, l: usize) -> Result<Self> {
        let r0 = oscillator_radius(hbar_omega, reduced_mass)?;
        Ok(OscillatorBasis {
            hbar_omega,
            r0,
            reduced_mass,
            l,
        })
    }

    /// Same ħω and mass, different partial wave.
    pub fn with_l(&self, l: usize) -> Self {
        OscillatorBasis { l, ..*self }
    }

    fn alpha(&self) -> f64 {
        self.l as f64 + 0.5
    }

    /// R_nl(r) in fm^{-3/2}, normalized with weight r².
    pub fn radial_function(&self, n: usize, r: f64) -> f64 {
        let rho = r / self.r0;
        let x = rho * rho;
        let nf = n as f64;
        let ln_norm = 0.5 * ((2.0f64).ln() + ln_gamma(nf + 1.0) - 3.0 * self.r0.ln() - ln_gamma(nf + self.alpha() + 1.0));
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let lag = laguerre(n, self.alpha(), x);
        if rho == 0.0 {
            return if self.l == 0 { sign * ln_norm.exp() * lag } else { 0.0 };
        }
        let ln_mag = ln_norm + self.l as f64 * rho.ln() - 0.5 * x;
        sign * ln_mag.exp() * lag
    }

    /// R_0l(r) … R_{n_max,l}(r) at one radius, by the normalized recurrence with
    /// running rescaling so that large r and large n neither overflow nor underflow.
    pub fn radial_functions(&self, n_max: usize, r: f64) -> Vec<f64> {
        let rho = r / self.r0;
        let x = rho * rho;
        let mut out = vec![0.0; n_max + 1];
        if rho == 0.0 && self.l > 0 {
            return out;
        }
        let alpha = self.alpha();
        // log of √(2/(r₀³Γ(α+1))) ρ^l e^{−x/2}
        let mut ln_pref = 0.5 * ((2.0f64).ln() - 3.0 * self.r0.ln() - ln_gamma(alpha + 1.0)) - 0.5 * x;
        if self.l > 0 {
            ln_pref += self.l as f64 * rho.ln();
        }
        let seq = normalized_laguerre_sequence(n_max, alpha, x);
        for (n, (m, shift)) in seq.into_iter().enumerate() {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            out[n] = if m == 0.0 { 0.0 } else { sign * m * (ln_pref + shift).exp() };
        }
        out
    }

    /// T_nn = (ħω/2)(2n + l + 3/2).
    pub fn kinetic_diagonal(&self, n: usize) -> f64 {
        0.5 * self.hbar_omega * (2.0 * n as f64 + self.l as f64 + 1.5)
    }

    /// T_{n,n+1} = −(ħω/2)√((n+1)(n+l+3/2)).
    pub fn kinetic_offdiagonal(&self, n: usize) -> f64 {
        let nf = n as f64;
        -0.5 * self.hbar_omega * ((nf + 1.0) * (nf + self.l as f64 + 1.5)).sqrt()
    }

    /// Tridiagonal kinetic matrix on n, n' ∈ [0, n_max] (MeV).
    pub fn kinetic_matrix(&self, n_max: usize) -> DMatrix<f64> {
        let mut t = DMatrix::zeros(n_max + 1, n_max + 1);
        for n in 0..=n_max {
            t[(n, n)] = self.kinetic_diagonal(n);
            if n < n_max {
                let off = self.kinetic_offdiagonal(n);
                t[(n, n + 1)] = off;
                t[(n + 1, n)] = off;
            }
        }
        t
    }

    /// Classical turning point r_n^cl = 2r₀√(n + l/2 + 3/4) of R_nl.
    pub fn classical_turning_point(&self, n: usize) -> f64 {
        2.0 * self.r0 * (n as f64 + 0.5 * self.l as f64 + 0.75).sqrt()
    }

    /// Natural channel radius b₀ = 2r₀√(N + l/2 + 7/4), the turning point of R_{N+1,l}.
    pub fn natural_channel_radius(&self, n_trunc: usize) -> f64 {
        self.classical_turning_point(n_trunc + 1)
    }

    pub fn kinematics(&self, energy: f64) -> Result<Kinematics> {
        Kinematics::new(energy, self.reduced_mass)
    }

    /// Momentum k (fm⁻¹) corresponding to E (MeV).
    pub fn momentum(&self, energy: f64) -> Result<f64> {
        Ok(self.kinematics(energy)?.k)
    }

    fn velocity(&self, k: f64) -> f64 {
        HBAR_C * k / self.reduced_mass
    }

    fn check_k(k: f64) -> Result<()> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(HorseError::invalid("k", k, "momentum must be positive"));
        }
        Ok(())
    }

    /// S_nl(k) from its Laguerre closed form, in √fm.
    pub fn regular_solution(&self, n: usize, k: f64) -> Result<f64> {
        Self::check_k(k)?;
        let v = self.velocity(k);
        let kr0 = k * self.r0;
        let z = kr0 * kr0;
        let nf = n as f64;
        let ln_mag = 0.5 * ((PI * self.r0 / v).ln() + ln_gamma(nf + 1.0) - ln_gamma(nf + self.alpha() + 1.0))
            + (self.l as f64 + 1.0) * kr0.ln()
            - 0.5 * z;
        Ok(ln_mag.exp() * laguerre(n, self.alpha(), z))
    }

    /// C_nl(k) directly from the Kummer function, in √fm.
    pub fn irregular_solution_direct(&self, n: usize, k: f64) -> Result<f64> {
        Self::check_k(k)?;
        let v = self.velocity(k);
        let kr0 = k * self.r0;
        let z = kr0 * kr0;
        let nf = n as f64;
        let lf = self.l as f64;
        let phi = confluent_hypergeometric(-nf - lf - 0.5, 0.5 - lf, z)?;
        let sign = if self.l % 2 == 0 { 1.0 } else { -1.0 };
        let ln_mag = 0.5 * ((PI * self.r0 / v).ln() + ln_gamma(nf + 1.0) - ln_gamma(nf + self.alpha() + 1.0))
            - lf * kr0.ln()
            - 0.5 * z;
        Ok(sign / gamma(0.5 - lf) * ln_mag.exp() * phi)
    }

    /// C_nl(k): direct for n ≤ 1, upward recurrence beyond.
    pub fn irregular_solution(&self, n: usize, k: f64) -> Result<f64> {
        if n <= 1 {
            return self.irregular_solution_direct(n, k);
        }
        Ok(self.asymptotic_solutions(n, k)?.c[n])
    }

    /// S_nl and C_nl for n ∈ [0, n_max], both propagated by the kinetic-energy
    /// recurrence from their n = 0, 1 values.
    pub fn asymptotic_solutions(&self, n_max: usize, k: f64) -> Result<AsymptoticSolutions> {
        Self::check_k(k)?;
        let top = n_max.max(1);
        let s0 = self.regular_solution(0, k)?;
        let s1 = self.regular_solution(1, k)?;
        let c0 = self.irregular_solution_direct(0, k)?;
        let c1 = self.irregular_solution_direct(1, k)?;
        let z = (k * self.r0).powi(2);
        let s = self.propagate(top, z, s0, s1);
        let c = self.propagate(top, z, c0, c1);
        let mut sol = AsymptoticSolutions { k, s, c };
        sol.s.truncate(n_max + 1);
        sol.c.truncate(n_max + 1);
        Ok(sol)
    }

    fn propagate(&self, n_max: usize, z: f64, a0: f64, a1: f64) -> Vec<f64> {
        let alpha = self.alpha();
        let mut out = Vec::with_capacity(n_max + 1);
        out.push(a0);
        out.push(a1);
        for n in 1..n_max {
            let nf = n as f64;
            let next = ((2.0 * nf + alpha + 1.0 - z) * out[n] - (nf * (nf + alpha)).sqrt() * out[n - 1])
                / ((nf + 1.0) * (nf + alpha + 1.0)).sqrt();
            out.push(next);
        }
        out
    }

    /// Large-n Bessel-type asymptotic forms of (S_nl, C_nl).
    pub fn asymptotic_forms_bessel(&self, n: usize, k: f64) -> Result<(f64, f64)> {
        Self::check_k(k)?;
        let v = self.velocity(k);
        let m = n as f64 + 0.5 * self.l as f64 + 0.75;
        let arg = 2.0 * k * self.r0 * m.sqrt();
        let b = spherical_bessel(self.l, arg)?;
        let pref = 2.0 * k * self.r0 * (self.r0 / v).sqrt() * m.powf(0.25);
        Ok((pref * b.j, -pref * b.n))
    }

    /// Large-n trigonometric asymptotic forms of (S_nl, C_nl).
    pub fn asymptotic_forms_trig(&self, n: usize, k: f64) -> Result<(f64, f64)> {
        Self::check_k(k)?;
        let v = self.velocity(k);
        let m = n as f64 + 0.5 * self.l as f64 + 0.75;
        let theta = 2.0 * k * self.r0 * m.sqrt() - 0.5 * PI * self.l as f64;
        let pref = (self.r0 / v).sqrt() * m.powf(-0.25);
        Ok((pref * theta.sin(), pref * theta.cos()))
    }

    /// Value of T_{n,n+1}(C_{n+1}S_n − C_nS_{n+1}) fixed by the large-n limit: ħc/2 (MeV·fm).
    pub fn casoratian_constant(&self) -> f64 {
        0.5 * HBAR_C
    }
}

/// Scaled Laguerre sequence √(n!/Γ(n+α+1)) L_n^α(x), stored as (mantissa, log-scale).
fn normalized_laguerre_sequence(n_max: usize, alpha: f64, x: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut prev = 0.0;
    let mut cur = 1.0;
    let mut shift = 0.0;
    out.push((cur, shift));
    for n in 0..n_max {
        let nf = n as f64;
        let next = ((2.0 * nf + alpha + 1.0 - x) * cur - (nf * (nf + alpha)).sqrt() * prev)
            / ((nf + 1.0) * (nf + alpha + 1.0)).sqrt();
        prev = cur;
        cur = next;
        if cur.abs() > 1e200 {
            cur *= 1e-200;
            prev *= 1e-200;
            shift += 200.0 * std::f64::consts::LN_10;
        }
        out.push((cur, shift));
    }
    out
}

/// S_nl(k), C_nl(k) for n ∈ [0, n_max].
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticSolutions {
    pub k: f64,
    pub s: Vec<f64>,
    pub c: Vec<f64>,
}

impl AsymptoticSolutions {
    /// C_{n+1}S_n − C_nS_{n+1}.
    pub fn casoratian(&self, n: usize) -> f64 {
        self.c[n + 1] * self.s[n] - self.c[n] * self.s[n + 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::reduced_mass;
    use crate::specfun::spherical_j;

    fn basis(l: usize) -> OscillatorBasis {
        OscillatorBasis::new(18.0, reduced_mass(1.0, 15.0), l).unwrap()
    }

    #[test]
    fn r00_closed_form() {
        let mu = 938.918 / 2.0;
        // pick ħω giving r₀ = 1 fm exactly
        let hw = HBAR_C * HBAR_C / mu;
        let b = OscillatorBasis::new(hw, mu, 0).unwrap();
        assert!((b.r0 - 1.0).abs() < 1e-12);
        let expect = 2.0 / PI.powf(0.25);
        assert!((b.radial_function(0, 0.0) - expect).abs() < 1e-12);
        assert!((expect - 1.50225).abs() < 1e-5);
        assert!((b.radial_functions(3, 0.0)[0] - expect).abs() < 1e-12);
    }

    /// Generalized Gauss–Laguerre nodes and weights by Newton iteration.
    fn gauss_laguerre(n: usize, alpha: f64) -> (Vec<f64>, Vec<f64>) {
        let mut x = vec![0.0; n];
        let mut w = vec![0.0; n];
        let nf = n as f64;
        let mut z = 0.0;
        for i in 0..n {
            z = match i {
                0 => (1.0 + alpha) * (3.0 + 0.92 * alpha) / (1.0 + 2.4 * nf + 1.8 * alpha),
                1 => z + (15.0 + 6.25 * alpha) / (1.0 + 0.9 * alpha + 2.5 * nf),
                _ => {
                    let ai = (i - 1) as f64;
                    z + ((1.0 + 2.55 * ai) / (1.9 * ai) + 1.26 * ai * alpha / (1.0 + 3.5 * ai)) / (1.0 + 0.3 * alpha)
                        * (z - x[i - 2])
                }
            };
            let mut pp = 0.0;
            let mut p2 = 0.0;
            for _ in 0..200 {
                let mut p1 = 1.0;
                p2 = 0.0;
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = ((2.0 * jf + 1.0 + alpha - z) * p2 - (jf + alpha) * p3) / (jf + 1.0);
                }
                pp = (nf * p1 - (nf + alpha) * p2) / z;
                let z1 = z;
                z = z1 - p1 / pp;
                if (z - z1).abs() <= 1e-14 * z.abs() {
                    break;
                }
            }
            x[i] = z;
            w[i] = -(ln_gamma(alpha + nf) - ln_gamma(nf)).exp() / (pp * nf * p2);
        }
        (x, w)
    }

    #[test]
    fn orthonormality_by_gauss_laguerre() {
        for l in 0..=3 {
            let b = basis(l);
            let alpha = l as f64 + 0.5;
            let (x, w) = gauss_laguerre(128, alpha);
            // ∫ R_n R_m r² dr = (r₀³/2) ∫ x^α e^{-x} [R_n R_m / (ρ^{2l} e^{-x})] dx
            let pts: Vec<Vec<f64>> = x
                .iter()
                .map(|&xi| {
                    let r = b.r0 * xi.sqrt();
                    let rho = xi.sqrt();
                    b.radial_functions(20, r)
                        .into_iter()
                        .map(|v| v / (rho.powi(l as i32) * (-0.5 * xi).exp()))
                        .collect()
                })
                .collect();
            for n in 0..=20 {
                for m in 0..=20 {
                    let s: f64 = pts.iter().zip(&w).map(|(p, wi)| wi * p[n] * p[m]).sum::<f64>() * 0.5 * b.r0.powi(3);
                    let expect = if n == m { 1.0 } else { 0.0 };
                    assert!((s - expect).abs() < 1e-8, "l={l} n={n} m={m} s={s}");
                }
            }
        }
    }

    #[test]
    fn node_count() {
        let b = basis(1);
        for n in 0..=10 {
            let mut count = 0;
            let mut prev = b.radial_function(n, 1e-3);
            let rmax = b.classical_turning_point(n) + 4.0 * b.r0;
            let steps = 20_000;
            for i in 1..=steps {
                let r = 1e-3 + (rmax - 1e-3) * i as f64 / steps as f64;
                let v = b.radial_function(n, r);
                if v * prev < 0.0 {
                    count += 1;
                }
                prev = v;
            }
            assert_eq!(count, n);
        }
    }

    #[test]
    fn recurrence_and_direct_radial_agree() {
        let b = basis(2);
        for &r in &[0.3, 2.0, 7.5, 15.0] {
            let all = b.radial_functions(40, r);
            for n in [0, 1, 7, 25, 40] {
                let d = b.radial_function(n, r);
                assert!((all[n] - d).abs() <= 1e-10 * d.abs().max(1e-12), "n={n} r={r}");
            }
        }
        // far tail stays finite
        let far = b.radial_functions(300, 80.0);
        assert!(far.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn kinetic_elements() {
        let b = basis(0);
        assert!((b.kinetic_diagonal(0) - 13.5).abs() < 1e-12);
        assert!((b.kinetic_offdiagonal(0) + 9.0 * 1.5f64.sqrt()).abs() < 1e-12);
        assert!((b.kinetic_offdiagonal(0) + 11.0227).abs() < 1e-4);
        let t = b.kinetic_matrix(12);
        assert_eq!(t, t.transpose());
        assert_eq!(t[(0, 2)], 0.0);
    }

    #[test]
    fn turning_points() {
        let mut b = basis(0);
        b.r0 = 1.5;
        assert!((b.classical_turning_point(9) - 3.0 * 9.75f64.sqrt()).abs() < 1e-12);
        assert!((b.classical_turning_point(0) - 1.5 * 3f64.sqrt()).abs() < 1e-12);
        assert!((b.natural_channel_radius(9) - 9.836).abs() < 1e-3);
        assert_eq!(b.natural_channel_radius(9), b.classical_turning_point(10));
        assert!(b.with_l(2).classical_turning_point(3) > b.classical_turning_point(3));
    }

    #[test]
    fn s00_closed_form() {
        let b = basis(0);
        let k = 0.7;
        let v = HBAR_C * k / b.reduced_mass;
        let kr0 = k * b.r0;
        // Γ(3/2) = √π/2 gives √(2√π r₀/v) kr₀ e^{−(kr₀)²/2}
        let expect = (2.0 * PI.sqrt() * b.r0 / v).sqrt() * kr0 * (-0.5 * kr0 * kr0).exp();
        assert!((b.regular_solution(0, k).unwrap() - expect).abs() < 1e-13 * expect);
    }

    #[test]
    fn regular_solution_is_bessel_transform() {
        // S_nl(k) = ∫ (k/√v) j_l(kr) R_nl(r) r² dr, the coefficient identity behind the
        // completeness relation; evaluated with a fine Simpson rule.
        for l in 0..=2 {
            let b = basis(l);
            let k = 0.8;
            let v = HBAR_C * k / b.reduced_mass;
            let n_max = 12;
            let rmax = b.classical_turning_point(n_max) + 10.0 * b.r0;
            let steps = 20_000;
            let h = rmax / steps as f64;
            let mut acc = vec![0.0; n_max + 1];
            for i in 0..=steps {
                let r = i as f64 * h;
                let w = if i == 0 || i == steps { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                let f = k / v.sqrt() * spherical_j(l, k * r) * r * r * w * h / 3.0;
                for (a, rn) in acc.iter_mut().zip(b.radial_functions(n_max, r)) {
                    *a += f * rn;
                }
            }
            let sol = b.asymptotic_solutions(n_max, k).unwrap();
            for n in 0..=n_max {
                assert!((acc[n] - sol.s[n]).abs() < 1e-8, "l={l} n={n}: {} vs {}", acc[n], sol.s[n]);
            }
        }
    }

    #[test]
    fn truncated_completeness_sum_converges() {
        // The sum converges only conditionally (alternating terms of size ~n^{-1/2}),
        // so check a slow but steady approach to (k/√v) j_l(kr) away from the origin.
        let b = basis(0);
        let k = 0.9;
        let v = HBAR_C * k / b.reduced_mass;
        let sol = b.asymptotic_solutions(3200, k).unwrap();
        for &r in &[1.0, 3.0, 5.0] {
            let exact = k / v.sqrt() * spherical_j(0, k * r);
            let rs = b.radial_functions(3200, r);
            let sum: f64 = rs.iter().zip(&sol.s).map(|(a, s)| a * s).sum();
            assert!((sum - exact).abs() < 5e-3 * k / v.sqrt(), "r={r}");
        }
    }

    #[test]
    fn regular_paths_agree() {
        for l in 0..=3 {
            let b = basis(l);
            for &kr0 in &[0.3, 1.0, 2.5] {
                let k = kr0 / b.r0;
                let sol = b.asymptotic_solutions(60, k).unwrap();
                for n in 0..=60 {
                    let d = b.regular_solution(n, k).unwrap();
                    let scale = sol.s.iter().map(|x| x.abs()).fold(0.0, f64::max);
                    assert!((d - sol.s[n]).abs() < 1e-9 * scale, "l={l} kr0={kr0} n={n}");
                }
            }
        }
    }

    #[test]
    fn irregular_direct_vs_recurrence() {
        let b = basis(0);
        for &kr0 in &[0.3, 1.0, 2.5] {
            let k = kr0 / b.r0;
            let rec = b.asymptotic_solutions(5, k).unwrap().c[5];
            let direct = b.irregular_solution_direct(5, k).unwrap();
            assert!(((rec - direct) / direct).abs() < 1e-8, "kr0={kr0}");
        }
    }

    #[test]
    fn casoratian_is_constant() {
        for l in 0..=4 {
            let b = basis(l);
            for &kr0 in &[0.2, 1.0, 3.0] {
                let k = kr0 / b.r0;
                let sol = b.asymptotic_solutions(501, k).unwrap();
                for n in 0..=500 {
                    let a = b.kinetic_offdiagonal(n) * sol.casoratian(n);
                    let c = b.casoratian_constant();
                    assert!(((a - c) / c).abs() < 1e-8, "l={l} kr0={kr0} n={n} a={a}");
                }
            }
        }
    }

    #[test]
    fn large_n_asymptotics() {
        let b = basis(1);
        let k = 0.5;
        let sol = b.asymptotic_solutions(400, k).unwrap();
        let (sb, cb) = b.asymptotic_forms_bessel(400, k).unwrap();
        let amp = (sol.s[400].powi(2) + sol.c[400].powi(2)).sqrt();
        assert!((sol.s[400] - sb).abs() < 0.01 * amp);
        assert!((sol.c[400] - cb).abs() < 0.01 * amp);
        // The trigonometric form drops the O(1/x) Bessel corrections, so check it at l = 0.
        let b0 = basis(0);
        let sol0 = b0.asymptotic_solutions(400, k).unwrap();
        let (st, ct) = b0.asymptotic_forms_trig(400, k).unwrap();
        let amp0 = st.hypot(ct);
        assert!((sol0.s[400] - st).abs() < 0.01 * amp0);
        assert!((sol0.c[400] - ct).abs() < 0.01 * amp0);
    }

    #[test]
    fn rejects_bad_momentum() {
        let b = basis(0);
        assert!(b.regular_solution(0, 0.0).is_err());
        assert!(b.irregular_solution(3, -1.0).is_err());
    }

    proptest::proptest! {
        #[test]
        fn recurrence_residual_small(l in 0usize..5, kr0 in 0.2f64..3.0) {
            let b = basis(l);
            let k = kr0 / b.r0;
            let e = 0.5 * b.hbar_omega * kr0 * kr0;
            let sol = b.asymptotic_solutions(500, k).unwrap();
            for seq in [&sol.s, &sol.c] {
                for n in 1..500 {
                    let terms = [
                        b.kinetic_offdiagonal(n - 1) * seq[n - 1],
                        (b.kinetic_diagonal(n) - e) * seq[n],
                        b.kinetic_offdiagonal(n) * seq[n + 1],
                    ];
                    let scale = terms.iter().map(|t| t.abs()).fold(0.0, f64::max);
                    proptest::prop_assert!((terms[0] + terms[1] + terms[2]).abs() <= 1e-9 * scale);
                }
            }
        }
    }
}
