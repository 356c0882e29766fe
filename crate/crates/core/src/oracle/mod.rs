//! Direct integration of the radial Schrödinger equation (Numerov), used as
//! an independent reference for everything computed in the oscillator basis.
//! Shares nothing with the basis code except the special functions.

mod coupled;
mod numerov;

pub use coupled::{CoupledOracle, CoupledProblem, OracleChannel};
pub use numerov::{
    bound_states, extract_phase, match_coefficients, normalized_wave, overlap_coefficient, phase_shift, simpson,
    NumerovGrid, OraclePhase, RadialProblem, RadialWave, Segment, DEFAULT_STEP, SECOND_MATCH_OFFSET,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::OscillatorBasis;
    use crate::constants::{reduced_mass, HBAR_C};
    use crate::potential::{Harmonic, SquareWell, WoodsSaxon, Zero};
    use crate::specfun::{spherical_bessel, spherical_j};
    use nalgebra::DMatrix;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn mu() -> f64 {
        reduced_mass(1.0, 15.0)
    }

    fn well_phase(l: usize, depth: f64, radius: f64, e: f64) -> f64 {
        let k = (2.0 * mu() * e).sqrt() / HBAR_C;
        let q = (2.0 * mu() * (e - depth)).sqrt() / HBAR_C;
        let i = spherical_bessel(l, q * radius).unwrap();
        let o = spherical_bessel(l, k * radius).unwrap();
        let g = q * i.dj / i.j;
        ((k * o.dj - g * o.j) / (k * o.dn - g * o.n)).atan()
    }

    #[test]
    fn free_wave_is_riccati_bessel() {
        let p = RadialProblem::new(&Zero, 2, mu());
        let e = 12.0;
        let k = (2.0 * mu() * e).sqrt() / HBAR_C;
        let w = p.integrate(e, &NumerovGrid::new(1e-3, 10.0 / k)).unwrap();
        let pts = w.points();
        let (r_ref, u_ref) = pts[pts.len() / 2];
        let f_ref = r_ref * spherical_j(2, k * r_ref);
        for &(r, u) in pts.iter().step_by(997) {
            let expect = r * spherical_j(2, k * r) / f_ref * u_ref;
            assert!((u - expect).abs() < 1e-8 * u_ref.abs().max(1e-3), "r={r}");
        }
        let d = phase_shift(&p, e, Some(5.0), None).unwrap();
        assert!(d.delta.abs() < 1e-9);
    }

    #[test]
    fn square_well_phase_to_high_accuracy() {
        let well = SquareWell { depth: -20.0, radius: 3.0 };
        for l in 0..=2 {
            let p = RadialProblem::new(&well, l, mu());
            for e in [1.0, 7.0, 20.0] {
                let d = phase_shift(&p, e, None, None).unwrap();
                let exact = well_phase(l, -20.0, 3.0, e);
                let diff = (d.delta - exact + PI / 2.0).rem_euclid(PI) - PI / 2.0;
                assert!(diff.abs() < 1e-8, "l={l} E={e}: {} vs {exact}", d.delta);
            }
        }
    }

    #[test]
    fn step_halving_and_match_radius_stable() {
        let ws = WoodsSaxon::nucleon_core(15.0);
        let p = RadialProblem::new(&ws, 0, mu());
        let d = phase_shift(&p, 10.0, None, None).unwrap();
        assert!(d.error_estimate < 1e-6);
        let charged = p.with_charge(7.0);
        let a = phase_shift(&charged, 10.0, None, None).unwrap();
        let b = phase_shift(&charged, 10.0, Some(a.r_match + 2.0), None).unwrap();
        assert!((a.delta - b.delta).abs() < 1e-6, "{} {}", a.delta, b.delta);
    }

    #[test]
    fn harmonic_eigenstate_has_n_nodes() {
        let b = OscillatorBasis::new(18.0, mu(), 1).unwrap();
        let pot = Harmonic {
            hbar_omega: 18.0,
            reduced_mass: mu(),
        };
        let p = RadialProblem::new(&pot, 1, mu());
        for n in 0..4 {
            let e = 18.0 * (2.0 * n as f64 + 2.5);
            let w = p.integrate(e, &NumerovGrid::new(1e-3, b.classical_turning_point(n))).unwrap();
            let pts = w.points();
            let nodes = pts.windows(2).filter(|s| s[0].1 * s[1].1 < 0.0).count();
            assert_eq!(nodes, n);
        }
    }

    #[test]
    fn square_well_bound_states() {
        // s-wave: q cot(qR) = −κ
        let well = SquareWell { depth: -50.0, radius: 4.0 };
        let p = RadialProblem::new(&well, 0, mu());
        let found = bound_states(&p, -49.9, 25.0, None).unwrap();
        // q₀R ≈ 6.0 lies between 3π/2 and 5π/2
        assert_eq!(found.len(), 2);
        for e in found {
            let q = (2.0 * mu() * (e + 50.0)).sqrt() / HBAR_C;
            let kappa = (-2.0 * mu() * e).sqrt() / HBAR_C;
            let resid = q / (q * 4.0).tan() + kappa;
            assert!(resid.abs() < 1e-6, "E={e} resid={resid}");
        }
    }

    #[test]
    fn overlap_of_free_wave_is_regular_solution() {
        let b = OscillatorBasis::new(18.0, mu(), 0).unwrap();
        let p = RadialProblem::new(&Zero, 0, mu());
        let e = 9.0;
        let (w, d) = normalized_wave(&p, e, b.classical_turning_point(4) + 8.0 * b.r0, None).unwrap();
        assert!(d.abs() < 1e-9);
        let k = b.momentum(e).unwrap();
        for n in 0..4 {
            let a = overlap_coefficient(&w, |r| b.radial_function(n, r));
            let s = b.regular_solution(n, k).unwrap();
            assert!((a - s).abs() < 1e-6 * s.abs().max(1.0), "n={n}: {a} vs {s}");
        }
    }

    #[test]
    fn overlap_orthogonality() {
        let b = OscillatorBasis::new(18.0, mu(), 1).unwrap();
        let h = 1e-3;
        let n_pts = (30.0 / h) as usize;
        for np in 0..3 {
            let u: Vec<f64> = (0..=n_pts).map(|i| i as f64 * h * b.radial_function(np, i as f64 * h)).collect();
            let w = RadialWave {
                segments: vec![Segment { start: 0.0, h, u }],
            };
            for n in 0..3 {
                let a = overlap_coefficient(&w, |r| b.radial_function(n, r));
                let expect = if n == np { 1.0 } else { 0.0 };
                assert!((a - expect).abs() < 1e-10);
            }
        }
    }

    fn two_channel(coupling: f64) -> (Vec<OracleChannel>, impl Fn(f64) -> DMatrix<f64> + Sync) {
        let ch = vec![
            OracleChannel {
                l: 0,
                reduced_mass: mu(),
                threshold: 0.0,
                charge_product: 0.0,
            },
            OracleChannel {
                l: 0,
                reduced_mass: mu(),
                threshold: 2.0,
                charge_product: 0.0,
            },
        ];
        let v = move |r: f64| {
            if r < 3.0 {
                DMatrix::from_row_slice(2, 2, &[-20.0, coupling, coupling, -15.0])
            } else {
                DMatrix::zeros(2, 2)
            }
        };
        (ch, v)
    }

    #[test]
    fn decoupled_channels_reproduce_single_channel() {
        let (ch, v) = two_channel(0.0);
        let prob = CoupledProblem {
            channels: ch,
            potential: &v,
            breakpoints: vec![3.0],
            range: 3.0,
        };
        let e = 10.0;
        let s = prob.s_matrix(e, None, None).unwrap().s;
        for (i, depth, ee) in [(0, -20.0, e), (1, -15.0, e - 2.0)] {
            let d = well_phase(0, depth, 3.0, ee);
            let expect = Complex64::from_polar(1.0, 2.0 * d);
            assert!((s[(i, i)] - expect).norm() < 1e-8);
        }
        assert!(s[(0, 1)].norm() < 1e-12);
    }

    #[test]
    fn coupled_s_is_unitary_and_symmetric() {
        let (ch, v) = two_channel(-5.0);
        let prob = CoupledProblem {
            channels: ch,
            potential: &v,
            breakpoints: vec![3.0],
            range: 3.0,
        };
        for e in [5.0, 10.0, 20.0] {
            let o = prob.s_matrix(e, None, None).unwrap();
            let s = &o.s;
            let u = s.adjoint() * s - DMatrix::<Complex64>::identity(2, 2);
            assert!(u.norm() < 1e-8, "unitarity {}", u.norm());
            assert!((s - s.transpose()).norm() < 1e-8);
            assert!(s[(0, 1)].norm() > 1e-3);
            assert!(o.error_estimate < 1e-7);
        }
    }
}
