//! Truncated oscillator-basis Hamiltonian and its spectral 𝒢 matrix.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use std::f64::consts::PI;

use crate::basis::OscillatorBasis;
use crate::error::{HorseError, Result};
use crate::potential::RadialPotential;
use crate::quadrature::Rule;

/// Energies closer than this to an eigenvalue (MeV) are treated as poles.
pub const POLE_GUARD: f64 = 1e-9;

/// Absolute tolerance on potential matrix elements (MeV).
pub const MATRIX_TOLERANCE: f64 = 1e-10;

/// ∫ R^{(1)}_{n l₁}(r) V(r) R^{(2)}_{n' l₂}(r) r² dr for all n ≤ n1, n' ≤ n2.
///
/// The two bases may differ in l and ħω, which is what channel couplings need.
pub fn potential_block(
    b1: &OscillatorBasis,
    n1: usize,
    b2: &OscillatorBasis,
    n2: usize,
    pot: &dyn RadialPotential,
) -> Result<DMatrix<f64>> {
    let r_max = (b1.classical_turning_point(n1) + 8.0 * b1.r0).max(b2.classical_turning_point(n2) + 8.0 * b2.r0);
    let breaks = pot.breakpoints();
    let assemble = |width: f64| {
        let rule = Rule::composite(0.0, r_max, &breaks, width, 16);
        let mut m = DMatrix::zeros(n1 + 1, n2 + 1);
        for (&r, &w) in rule.nodes.iter().zip(&rule.weights) {
            let v = pot.value(r);
            if v == 0.0 {
                continue;
            }
            let f1 = b1.radial_functions(n1, r);
            let f2 = b2.radial_functions(n2, r);
            let s = w * v * r * r;
            for j in 0..=n2 {
                let sj = s * f2[j];
                for i in 0..=n1 {
                    m[(i, j)] += f1[i] * sj;
                }
            }
        }
        m
    };
    let mut width = 0.5 * b1.r0.min(b2.r0);
    let mut prev = assemble(width);
    for _ in 0..8 {
        width *= 0.5;
        let cur = assemble(width);
        let change = (&cur - &prev).amax();
        if change < MATRIX_TOLERANCE {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(HorseError::Quadrature {
        estimate: prev.amax(),
        error: MATRIX_TOLERANCE,
    })
}

/// V_{nn'} on n, n' ∈ [0, n_max] (MeV).
pub fn potential_matrix(basis: &OscillatorBasis, pot: &dyn RadialPotential, n_max: usize) -> Result<DMatrix<f64>> {
    let m = potential_block(basis, n_max, basis, n_max, pot)?;
    Ok(0.5 * (&m + m.transpose()))
}

/// A single V_{nn'}.
pub fn potential_matrix_element(basis: &OscillatorBasis, pot: &dyn RadialPotential, n: usize, np: usize) -> Result<f64> {
    let top = n.max(np);
    Ok(potential_matrix(basis, pot, top)?[(n, np)])
}

/// σ_n = sin(π(n+1)/(N+2)) / (π(n+1)/(N+2)), n ∈ [0, N].
pub fn lanczos_factors(n_trunc: usize) -> Vec<f64> {
    (0..=n_trunc)
        .map(|n| {
            let x = PI * (n as f64 + 1.0) / (n_trunc as f64 + 2.0);
            x.sin() / x
        })
        .collect()
}

/// V_{nn'} → σ_n σ_n' V_{nn'}.
pub fn lanczos_smooth(v: &DMatrix<f64>, n_trunc: usize) -> DMatrix<f64> {
    let s = lanczos_factors(n_trunc);
    DMatrix::from_fn(v.nrows(), v.ncols(), |i, j| s[i] * s[j] * v[(i, j)])
}

/// Eigen-decomposition of the (N+1)×(N+1) interaction-region Hamiltonian.
#[derive(Debug, Clone)]
pub struct TruncatedHamiltonian {
    pub basis: OscillatorBasis,
    /// Truncation boundary N.
    pub n_trunc: usize,
    /// Ascending E_λ (MeV).
    pub eigenvalues: DVector<f64>,
    /// Column λ holds γ_λn, n = 0..N.
    pub eigenvectors: DMatrix<f64>,
    /// T_{N,N+1} (MeV).
    pub t_edge: f64,
    /// The assembled matrix T + Ṽ.
    pub matrix: DMatrix<f64>,
}

impl TruncatedHamiltonian {
    pub fn diagonalize(basis: OscillatorBasis, pot: &dyn RadialPotential, n_trunc: usize, smoothing: bool) -> Result<Self> {
        let mut v = potential_matrix(&basis, pot, n_trunc)?;
        if smoothing {
            v = lanczos_smooth(&v, n_trunc);
        }
        let h = basis.kinetic_matrix(n_trunc) + v;
        Self::from_matrix(basis, h)
    }

    /// Diagonalizes a caller-supplied symmetric matrix H̃ (MeV).
    pub fn from_matrix(basis: OscillatorBasis, h: DMatrix<f64>) -> Result<Self> {
        if !h.is_square() || h.nrows() == 0 {
            return Err(HorseError::Eigen("Hamiltonian must be a non-empty square matrix".into()));
        }
        let n_trunc = h.nrows() - 1;
        let (eigenvalues, eigenvectors) = sorted_eigen(&h)?;
        Ok(TruncatedHamiltonian {
            basis,
            n_trunc,
            eigenvalues,
            eigenvectors,
            t_edge: basis.kinetic_offdiagonal(n_trunc),
            matrix: h,
        })
    }

    pub fn check_pole(&self, energy: f64) -> Result<()> {
        check_pole(&self.eigenvalues, energy)
    }

    /// 𝒢_{nN}(E) = −Σ_λ γ_λn γ_λN/(E_λ − E) · T_{N,N+1}.
    pub fn g_element(&self, n: usize, energy: f64) -> Result<f64> {
        self.check_pole(energy)?;
        let nn = self.n_trunc;
        let mut s = 0.0;
        for (lam, &e) in self.eigenvalues.iter().enumerate() {
            s += self.eigenvectors[(n, lam)] * self.eigenvectors[(nn, lam)] / (e - energy);
        }
        Ok(-s * self.t_edge)
    }

    /// 𝒢_{nN}(E) for n = 0..N.
    pub fn g_column(&self, energy: f64) -> Result<Vec<f64>> {
        self.check_pole(energy)?;
        let nn = self.n_trunc;
        let mut out = vec![0.0; nn + 1];
        for (lam, &e) in self.eigenvalues.iter().enumerate() {
            let f = self.eigenvectors[(nn, lam)] / (e - energy);
            for (n, o) in out.iter_mut().enumerate() {
                *o += self.eigenvectors[(n, lam)] * f;
            }
        }
        Ok(out.into_iter().map(|x| -x * self.t_edge).collect())
    }

    pub fn g_nn(&self, energy: f64) -> Result<f64> {
        self.g_element(self.n_trunc, energy)
    }

    /// Σ_λ E_λ γ_λ γ_λᵀ.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        &self.eigenvectors * DMatrix::from_diagonal(&self.eigenvalues) * self.eigenvectors.transpose()
    }

    /// Eigenvalues above zero, i.e. inside the continuum.
    pub fn positive_eigenvalues(&self) -> Vec<f64> {
        self.eigenvalues.iter().copied().filter(|&e| e > 0.0).collect()
    }
}

pub(crate) fn check_pole(eigenvalues: &DVector<f64>, energy: f64) -> Result<()> {
    for (index, &e) in eigenvalues.iter().enumerate() {
        if (e - energy).abs() < POLE_GUARD {
            return Err(HorseError::Pole {
                energy,
                index,
                eigenvalue: e,
            });
        }
    }
    Ok(())
}

/// Symmetric eigenpairs with eigenvalues sorted ascending.
pub(crate) fn sorted_eigen(h: &DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    if h.iter().any(|x| !x.is_finite()) {
        return Err(HorseError::Eigen("non-finite matrix element".into()));
    }
    let eig = SymmetricEigen::try_new(h.clone(), f64::EPSILON, 0)
        .ok_or_else(|| HorseError::Eigen("symmetric eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..h.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = DVector::from_iterator(order.len(), order.iter().map(|&i| eig.eigenvalues[i]));
    let vecs = DMatrix::from_fn(h.nrows(), h.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((vals, vecs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::reduced_mass;
    use crate::potential::{Harmonic, SquareWell, Zero};

    fn basis(l: usize) -> OscillatorBasis {
        OscillatorBasis::new(18.0, reduced_mass(1.0, 15.0), l).unwrap()
    }

    #[test]
    fn constant_potential_diagonal_is_constant() {
        let b = basis(1);
        let v = potential_matrix(&b, &crate::potential::FnPotential { f: |_| -50.0, range: 1e9 }, 6).unwrap();
        for n in 0..=6 {
            assert!((v[(n, n)] + 50.0).abs() < 1e-8);
            for m in 0..n {
                assert!(v[(n, m)].abs() < 1e-8);
            }
        }
        assert_eq!(potential_matrix(&b, &Zero, 4).unwrap().amax(), 0.0);
    }

    #[test]
    fn harmonic_spectrum_is_exact() {
        for l in 0..3 {
            let b = basis(l);
            let pot = Harmonic {
                hbar_omega: 2.0 * b.hbar_omega,
                reduced_mass: b.reduced_mass,
            };
            // Same-frequency oscillator: H is diagonal with ħω(2n + l + 3/2).
            let same = Harmonic {
                hbar_omega: b.hbar_omega,
                reduced_mass: b.reduced_mass,
            };
            let h = TruncatedHamiltonian::diagonalize(b, &same, 12, false).unwrap();
            for n in 0..=12 {
                let exact = b.hbar_omega * (2.0 * n as f64 + l as f64 + 1.5);
                assert!((h.eigenvalues[n] - exact).abs() < 1e-8, "l={l} n={n}");
            }
            // Doubled frequency is not diagonal; the low levels still converge to 2ħω(2n+l+3/2).
            let h2 = TruncatedHamiltonian::diagonalize(b, &pot, 40, false).unwrap();
            let exact0 = 2.0 * b.hbar_omega * (l as f64 + 1.5);
            assert!((h2.eigenvalues[0] - exact0).abs() < 1e-6);
        }
    }

    #[test]
    fn free_one_by_one_case() {
        let b = basis(0);
        let h = TruncatedHamiltonian::diagonalize(b, &Zero, 0, false).unwrap();
        assert!((h.eigenvalues[0] - 0.75 * 18.0).abs() < 1e-12);
        let t00 = b.kinetic_diagonal(0);
        let g = h.g_nn(2.0 * t00).unwrap();
        assert!((g - (-(1.5f64).sqrt() / 1.5)).abs() < 1e-12);
    }

    #[test]
    fn orthonormal_and_reconstructs() {
        let b = basis(0);
        let well = SquareWell { depth: -50.0, radius: 3.0 };
        let h = TruncatedHamiltonian::diagonalize(b, &well, 30, false).unwrap();
        let g = h.eigenvectors.transpose() * &h.eigenvectors;
        assert!((g - DMatrix::identity(31, 31)).amax() < 1e-10);
        let rel = (h.reconstruct() - &h.matrix).norm() / h.matrix.norm();
        assert!(rel < 1e-8);
        assert!(h.eigenvalues.as_slice().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn g_decays_and_has_simple_poles() {
        let b = basis(0);
        let well = SquareWell { depth: -20.0, radius: 3.0 };
        let h = TruncatedHamiltonian::diagonalize(b, &well, 8, false).unwrap();
        assert!(h.g_nn(1e6).unwrap().abs() < 1e-3);
        let lam = 3;
        let e = h.eigenvalues[lam];
        let expect = h.eigenvectors[(8, lam)].powi(2) * h.t_edge;
        for d in [1e-4, -1e-4] {
            let res = d * h.g_nn(e + d).unwrap();
            assert!((res - expect).abs() < 1e-3 * expect.abs());
        }
        assert!(matches!(h.g_nn(e + 1e-10), Err(HorseError::Pole { index: 3, .. })));
    }

    #[test]
    fn g_monotone_between_poles() {
        let b = basis(0);
        let well = SquareWell { depth: -20.0, radius: 3.0 };
        let h = TruncatedHamiltonian::diagonalize(b, &well, 6, false).unwrap();
        for w in h.eigenvalues.as_slice().windows(2) {
            let (lo, hi) = (w[0] + 1e-3, w[1] - 1e-3);
            let mut prev = h.g_nn(lo).unwrap();
            for i in 1..=50 {
                let e = lo + (hi - lo) * i as f64 / 50.0;
                let g = h.g_nn(e).unwrap();
                // T_{N,N+1} < 0, so 𝒢_NN increases between poles.
                assert!(g > prev);
                prev = g;
            }
        }
    }

    #[test]
    fn square_well_ground_state_converges_to_oracle() {
        let b = basis(0);
        let well = SquareWell { depth: -50.0, radius: 3.0 };
        let e: Vec<f64> = [10, 20, 40]
            .iter()
            .map(|&n| TruncatedHamiltonian::diagonalize(b, &well, n, false).unwrap().eigenvalues[0])
            .collect();
        let p = crate::oracle::RadialProblem::new(&well, 0, b.reduced_mass);
        let exact = crate::oracle::bound_states(&p, -49.9, 25.0, None).unwrap()[0];
        assert!(e[0] >= e[1] && e[1] >= e[2]);
        assert!((e[2] - exact).abs() < 5e-3, "{e:?} vs {exact}");
    }

    #[test]
    fn lanczos_factor_values() {
        let s = lanczos_factors(100);
        assert!((s[0] - 0.99984).abs() < 1e-5);
        let z = lanczos_smooth(&DMatrix::zeros(5, 5), 4);
        assert_eq!(z.amax(), 0.0);
    }
}
