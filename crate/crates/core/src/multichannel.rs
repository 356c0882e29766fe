//! Coupled-channel scattering in the oscillator representation: the channel
//! 𝒢 matrix, S- and P-matrices, the discrete P analogue, and charged
//! channels through per-channel cut potentials.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::basis::{AsymptoticSolutions, OscillatorBasis};
use crate::constants::{Kinematics, E_SQUARED, HBAR_C};
use crate::error::{HorseError, Result};
use crate::hamiltonian::{check_pole, potential_block, sorted_eigen};
use crate::potential::{Cut, SharedPotential, WithCoulomb, Zero};
use crate::specfun::coulomb_wave;

/// Braces with a condition number above this are flagged.
pub const ILL_CONDITIONED: f64 = 1e12;

type CMat = DMatrix<Complex64>;

/// One two-body channel Γ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Channel {
    /// Carries l_Γ, μ_Γ and ħω_Γ.
    pub basis: OscillatorBasis,
    pub n_trunc: usize,
    /// ε_Γ (MeV).
    pub threshold: f64,
    pub charge_product: f64,
}

impl Channel {
    pub fn l(&self) -> usize {
        self.basis.l
    }

    pub fn kinematics(&self, energy: f64) -> Result<Kinematics> {
        if energy <= self.threshold {
            return Err(HorseError::ClosedChannel { energy });
        }
        Kinematics::new(energy - self.threshold, self.basis.reduced_mass)
    }

    pub fn natural_radius(&self) -> f64 {
        self.basis.natural_channel_radius(self.n_trunc)
    }

    fn solutions(&self, k: f64) -> Result<AsymptoticSolutions> {
        self.basis.asymptotic_solutions(self.n_trunc + 1, k)
    }
}

/// Symmetric matrix of radial potentials V_ΓΓ'(r); only Γ ≤ Γ' entries are read.
#[derive(Debug, Clone)]
pub struct PotentialMatrix {
    entries: Vec<Vec<SharedPotential>>,
}

impl PotentialMatrix {
    pub fn zeros(m: usize) -> Self {
        let z: SharedPotential = Arc::new(Zero);
        PotentialMatrix {
            entries: vec![vec![z; m]; m],
        }
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    /// Sets V_ij and V_ji.
    pub fn set(&mut self, i: usize, j: usize, v: SharedPotential) {
        self.entries[i][j] = v.clone();
        self.entries[j][i] = v;
    }

    pub fn get(&self, i: usize, j: usize) -> &SharedPotential {
        &self.entries[i.min(j)][i.max(j)]
    }

    /// V_ij(r) as a plain matrix.
    pub fn at(&self, r: f64) -> DMatrix<f64> {
        let m = self.size();
        DMatrix::from_fn(m, m, |i, j| self.get(i, j).value(r))
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.entries.iter().flatten().flat_map(|v| v.breakpoints()).collect();
        b.sort_by(|x, y| x.total_cmp(y));
        b.dedup();
        b
    }

    pub fn range_hint(&self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .map(|v| v.range_hint())
            .filter(|r| r.is_finite())
            .fold(0.0, f64::max)
    }
}

/// Eigen-decomposition of the block Hamiltonian H̃^{ΓΓ'}_{nn'}.
#[derive(Debug, Clone)]
pub struct CoupledHamiltonian {
    pub channels: Vec<Channel>,
    /// Start of channel Γ in the concatenated (Γ, n) index.
    pub offsets: Vec<usize>,
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<f64>,
    /// T^Γ_{N_Γ, N_Γ+1}.
    pub t_edge: Vec<f64>,
    pub matrix: DMatrix<f64>,
}

impl CoupledHamiltonian {
    pub fn new(channels: Vec<Channel>, potential: &PotentialMatrix) -> Result<Self> {
        let m = channels.len();
        if m == 0 || potential.size() != m {
            return Err(HorseError::invalid("channels", m as f64, "potential matrix size must match the channel count"));
        }
        let mut offsets = Vec::with_capacity(m);
        let mut dim = 0;
        for c in &channels {
            offsets.push(dim);
            dim += c.n_trunc + 1;
        }
        let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i..m).map(move |j| (i, j))).collect();
        let blocks = pairs
            .par_iter()
            .map(|&(i, j)| {
                let (a, b) = (&channels[i], &channels[j]);
                potential_block(&a.basis, a.n_trunc, &b.basis, b.n_trunc, potential.get(i, j).as_ref())
            })
            .collect::<Vec<_>>();
        let mut h = DMatrix::zeros(dim, dim);
        for (&(i, j), block) in pairs.iter().zip(blocks) {
            let block = block?;
            let (oi, oj) = (offsets[i], offsets[j]);
            for r in 0..block.nrows() {
                for c in 0..block.ncols() {
                    h[(oi + r, oj + c)] += block[(r, c)];
                    if i != j {
                        h[(oj + c, oi + r)] += block[(r, c)];
                    }
                }
            }
        }
        for (c, &o) in channels.iter().zip(&offsets) {
            let n = c.n_trunc + 1;
            let t = c.basis.kinetic_matrix(c.n_trunc);
            let mut view = h.view_mut((o, o), (n, n));
            view += t + DMatrix::identity(n, n) * c.threshold;
        }
        let h = 0.5 * (&h + h.transpose());
        Self::from_matrix(channels, h)
    }

    /// Diagonalizes a caller-supplied block matrix.
    pub fn from_matrix(channels: Vec<Channel>, h: DMatrix<f64>) -> Result<Self> {
        let mut offsets = Vec::with_capacity(channels.len());
        let mut dim = 0;
        for c in &channels {
            offsets.push(dim);
            dim += c.n_trunc + 1;
        }
        if h.nrows() != dim || !h.is_square() {
            return Err(HorseError::Eigen(format!("expected a {dim}×{dim} block matrix")));
        }
        let (eigenvalues, eigenvectors) = sorted_eigen(&h)?;
        let t_edge = channels.iter().map(|c| c.basis.kinetic_offdiagonal(c.n_trunc)).collect();
        Ok(CoupledHamiltonian {
            channels,
            offsets,
            eigenvalues,
            eigenvectors,
            t_edge,
            matrix: h,
        })
    }

    pub fn size(&self) -> usize {
        self.channels.len()
    }

    fn edge(&self, g: usize) -> usize {
        self.offsets[g] + self.channels[g].n_trunc
    }

    /// 𝒢^{ΓΓ'}_{nN_Γ'} for an arbitrary row index (Γ, n).
    fn g_row_element(&self, row: usize, gp: usize, energy: f64) -> f64 {
        let col = self.edge(gp);
        let mut sum = 0.0;
        for (lam, &e) in self.eigenvalues.iter().enumerate() {
            sum += self.eigenvectors[(row, lam)] * self.eigenvectors[(col, lam)] / (e - energy);
        }
        -sum * self.t_edge[gp]
    }

    /// The M×M matrix [𝒢] of 𝒢^{ΓΓ'}_{N_Γ N_Γ'}.
    pub fn g_matrix(&self, energy: f64) -> Result<DMatrix<f64>> {
        check_pole(&self.eigenvalues, energy)?;
        let m = self.size();
        Ok(DMatrix::from_fn(m, m, |i, j| self.g_row_element(self.edge(i), j, energy)))
    }

    /// For each Γ, the (N_Γ+1)×M block 𝒢^{ΓΓ'}_{nN_Γ'}.
    pub fn g_rows(&self, energy: f64) -> Result<Vec<DMatrix<f64>>> {
        check_pole(&self.eigenvalues, energy)?;
        let m = self.size();
        Ok((0..m)
            .map(|g| {
                let n = self.channels[g].n_trunc + 1;
                DMatrix::from_fn(n, m, |r, gp| self.g_row_element(self.offsets[g] + r, gp, energy))
            })
            .collect())
    }

    pub fn positive_eigenvalues(&self) -> Vec<f64> {
        self.eigenvalues.iter().copied().filter(|&e| e > 0.0).collect()
    }
}

/// Per-channel free-solution data at one energy.
struct Edges {
    kin: Vec<Kinematics>,
    sn: Vec<f64>,
    cn: Vec<f64>,
    sn1: Vec<f64>,
    cn1: Vec<f64>,
}

fn edges(channels: &[Channel], energy: f64) -> Result<Edges> {
    let mut e = Edges {
        kin: Vec::new(),
        sn: Vec::new(),
        cn: Vec::new(),
        sn1: Vec::new(),
        cn1: Vec::new(),
    };
    for c in channels {
        let kin = c.kinematics(energy)?;
        let sol = c.solutions(kin.k)?;
        let n = c.n_trunc;
        e.sn.push(sol.s[n]);
        e.cn.push(sol.c[n]);
        e.sn1.push(sol.s[n + 1]);
        e.cn1.push(sol.c[n + 1]);
        e.kin.push(kin);
    }
    Ok(e)
}

fn cdiag(v: impl Iterator<Item = Complex64>) -> CMat {
    let v: Vec<Complex64> = v.collect();
    CMat::from_diagonal(&DVector::from_vec(v))
}

fn rdiag(v: impl Iterator<Item = f64>) -> DMatrix<f64> {
    let v: Vec<f64> = v.collect();
    DMatrix::from_diagonal(&DVector::from_vec(v))
}

fn complexify(m: &DMatrix<f64>) -> CMat {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Ratio of extreme singular values.
pub fn condition_number(m: &CMat) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

fn inverse(m: CMat, context: &'static str) -> Result<(CMat, f64)> {
    let cond = condition_number(&m);
    let inv = m.try_inverse().ok_or(HorseError::Singular { context, condition: cond })?;
    Ok((inv, cond))
}

fn real_inverse(m: DMatrix<f64>, context: &'static str) -> Result<DMatrix<f64>> {
    let cond = condition_number(&complexify(&m));
    m.try_inverse().ok_or(HorseError::Singular { context, condition: cond })
}

/// A scattering matrix with its diagnostics.
#[derive(Debug, Clone)]
pub struct SMatrix {
    pub energy: f64,
    pub s: CMat,
    /// Same S from the transposed formula.
    pub s_transposed_form: CMat,
    /// Condition number of the inverted brace.
    pub condition: f64,
}

impl SMatrix {
    pub fn ill_conditioned(&self) -> bool {
        self.condition > ILL_CONDITIONED
    }

    pub fn unitarity_defect(&self) -> f64 {
        let m = self.s.nrows();
        (self.s.adjoint() * &self.s - CMat::identity(m, m)).norm()
    }

    pub fn symmetry_defect(&self) -> f64 {
        (&self.s - self.s.transpose()).norm()
    }
}

/// [S] = {[C⁺_N] − [𝒢][C⁺_{N+1}]}⁻¹{[C⁻_N] − [𝒢][C⁻_{N+1}]}, C^± = C ± iS.
pub fn s_matrix(h: &CoupledHamiltonian, energy: f64) -> Result<SMatrix> {
    let e = edges(&h.channels, energy)?;
    let g = complexify(&h.g_matrix(energy)?);
    let m = h.size();
    let cp = |c: &[f64], s: &[f64], sign: f64| cdiag((0..m).map(|i| Complex64::new(c[i], sign * s[i])));
    let (cpn, cmn) = (cp(&e.cn, &e.sn, 1.0), cp(&e.cn, &e.sn, -1.0));
    let (cpn1, cmn1) = (cp(&e.cn1, &e.sn1, 1.0), cp(&e.cn1, &e.sn1, -1.0));
    let (inv, condition) = inverse(&cpn - &g * &cpn1, "S-matrix brace")?;
    let s = inv * (&cmn - &g * &cmn1);
    let gt = g.transpose();
    let (inv_t, _) = inverse(&cpn - &cpn1 * &gt, "transposed S-matrix brace")?;
    let s_t = (&cmn - &cmn1 * &gt) * inv_t;
    Ok(SMatrix {
        energy,
        s,
        s_transposed_form: s_t,
        condition,
    })
}

/// Oscillator-representation channel coefficients for every entrance channel.
#[derive(Debug, Clone)]
pub struct ChannelCoefficients {
    /// Per channel Γ: rows n = 0..=n_asym, column Γᵢ.
    pub a: Vec<CMat>,
    /// a^as_{N_Γ} per channel (row Γ), for the matching check.
    pub asymptotic_at_edge: CMat,
}

/// a^as_{nΓ(Γᵢ)} = δ_{ΓΓᵢ}C⁻_n − S_{ΓΓᵢ}C⁺_n beyond N_Γ, and
/// a_{nΓ(Γᵢ)} = Σ_Γ' 𝒢^{ΓΓ'}_{nN_Γ'} a^as_{N_Γ'+1,Γ'(Γᵢ)} inside.
pub fn interior_coefficients(h: &CoupledHamiltonian, energy: f64, s: &CMat, n_asym: usize) -> Result<ChannelCoefficients> {
    let m = h.size();
    let rows = h.g_rows(energy)?;
    let mut sols = Vec::with_capacity(m);
    for c in &h.channels {
        if n_asym < c.n_trunc + 1 {
            return Err(HorseError::invalid("n_asym", n_asym as f64, "must exceed every N_Γ"));
        }
        let kin = c.kinematics(energy)?;
        sols.push(c.basis.asymptotic_solutions(n_asym, kin.k)?);
    }
    let asym = |g: usize, n: usize, gi: usize| {
        let cm = Complex64::new(sols[g].c[n], -sols[g].s[n]);
        let cp = Complex64::new(sols[g].c[n], sols[g].s[n]);
        let d = if g == gi { cm } else { Complex64::new(0.0, 0.0) };
        d - s[(g, gi)] * cp
    };
    let edge_next = CMat::from_fn(m, m, |g, gi| asym(g, h.channels[g].n_trunc + 1, gi));
    let mut a = Vec::with_capacity(m);
    for g in 0..m {
        let nt = h.channels[g].n_trunc;
        let inner = complexify(&rows[g]) * &edge_next;
        a.push(CMat::from_fn(n_asym + 1, m, |n, gi| if n <= nt { inner[(n, gi)] } else { asym(g, n, gi) }));
    }
    Ok(ChannelCoefficients {
        a,
        asymptotic_at_edge: CMat::from_fn(m, m, |g, gi| asym(g, h.channels[g].n_trunc, gi)),
    })
}

/// Flux-normalized F̂ = F/(r√v), Ĝ = G/(r√v) and radial derivatives at r = b.
#[derive(Debug, Clone, Copy)]
struct Hat {
    f: f64,
    g: f64,
    df: f64,
    dg: f64,
}

fn hat(l: usize, kin: &Kinematics, eta: f64, b: f64) -> Result<Hat> {
    let k = kin.k;
    let sv = kin.velocity.sqrt();
    let cw = coulomb_wave(l, eta, k * b)?;
    Ok(Hat {
        f: cw.f / (b * sv),
        g: cw.g / (b * sv),
        df: (k * cw.df / b - cw.f / (b * b)) / sv,
        dg: (k * cw.dg / b - cw.g / (b * b)) / sv,
    })
}

/// Diagonal Ĥ^± = Ĝ ± iF̂ and their derivatives: [(H⁺, H⁻, H⁺', H⁻')].
fn hankels(channels: &[Channel], kin: &[Kinematics], radii: &[f64], charged: bool) -> Result<[CMat; 4]> {
    let mut hs = Vec::with_capacity(channels.len());
    for ((c, k), &b) in channels.iter().zip(kin).zip(radii) {
        let eta = if charged { k.sommerfeld(c.charge_product) } else { 0.0 };
        hs.push(hat(c.l(), k, eta, b)?);
    }
    let d = |f: &dyn Fn(&Hat) -> Complex64| cdiag(hs.iter().map(f));
    Ok([
        d(&|x| Complex64::new(x.g, x.f)),
        d(&|x| Complex64::new(x.g, -x.f)),
        d(&|x| Complex64::new(x.dg, x.df)),
        d(&|x| Complex64::new(x.dg, -x.df)),
    ])
}

fn check_radii(h: &CoupledHamiltonian, radii: &[f64]) -> Result<()> {
    if radii.len() != h.size() {
        return Err(HorseError::invalid("radii", radii.len() as f64, "one radius per channel"));
    }
    for &b in radii {
        if !(b > 0.0) {
            return Err(HorseError::invalid("b", b, "channel radius must be positive"));
        }
    }
    Ok(())
}

/// Real [P] = [b]{F̂'C_N − Ĝ'S_N − (F̂'C_{N+1} − Ĝ'S_{N+1})[𝒢]ᵀ}
///            ×{F̂C_N − ĜS_N − (F̂C_{N+1} − ĜS_{N+1})[𝒢]ᵀ}⁻¹.
pub fn p_matrix(h: &CoupledHamiltonian, energy: f64, radii: &[f64]) -> Result<DMatrix<f64>> {
    check_radii(h, radii)?;
    let e = edges(&h.channels, energy)?;
    let gt = h.g_matrix(energy)?.transpose();
    let m = h.size();
    let mut hs = Vec::with_capacity(m);
    for i in 0..m {
        hs.push(hat(h.channels[i].l(), &e.kin[i], 0.0, radii[i])?);
    }
    let num = rdiag((0..m).map(|i| hs[i].df * e.cn[i] - hs[i].dg * e.sn[i]))
        - rdiag((0..m).map(|i| hs[i].df * e.cn1[i] - hs[i].dg * e.sn1[i])) * &gt;
    let den = rdiag((0..m).map(|i| hs[i].f * e.cn[i] - hs[i].g * e.sn[i]))
        - rdiag((0..m).map(|i| hs[i].f * e.cn1[i] - hs[i].g * e.sn1[i])) * &gt;
    let inv = real_inverse(den, "P-matrix brace")?;
    Ok(rdiag(radii.iter().copied()) * num * inv)
}

/// [P] = [b]{Ĥ⁻' − Ĥ⁺'S}{Ĥ⁻ − Ĥ⁺S}⁻¹ from a given S (neutral functions).
pub fn p_from_s(channels: &[Channel], energy: f64, s: &CMat, radii: &[f64]) -> Result<CMat> {
    let kin = channels.iter().map(|c| c.kinematics(energy)).collect::<Result<Vec<_>>>()?;
    let [hp, hm, dhp, dhm] = hankels(channels, &kin, radii, false)?;
    let (inv, _) = inverse(&hm - &hp * s, "P from S")?;
    Ok(complexify(&rdiag(radii.iter().copied())) * (&dhm - &dhp * s) * inv)
}

/// [μ/b]⁻¹[P] − [P]ᵀ[μ/b]⁻¹, Frobenius norm relative to ‖[μ/b]⁻¹[P]‖.
pub fn p_symmetry_defect(channels: &[Channel], p: &DMatrix<f64>, radii: &[f64]) -> f64 {
    let w = rdiag(channels.iter().zip(radii).map(|(c, b)| b / c.basis.reduced_mass));
    let lhs = &w * p;
    (&lhs - p.transpose() * &w).norm() / lhs.norm()
}

/// b⁰_Γ = 2r₀^Γ√(N_Γ + l_Γ/2 + 7/4), one per channel.
pub fn natural_radii(channels: &[Channel]) -> Vec<f64> {
    channels.iter().map(Channel::natural_radius).collect()
}

/// Discrete analogue
/// [P] = 2[N + l/2 + 5/4](1 − [b⁰]^{-1/2}[r₀]⁻¹[𝒢][r₀][b⁰]^{1/2}) − 1.
pub fn discrete_p(h: &CoupledHamiltonian, energy: f64) -> Result<DMatrix<f64>> {
    let g = h.g_matrix(energy)?;
    let ch = &h.channels;
    let m = h.size();
    let b0 = natural_radii(ch);
    let left = rdiag((0..m).map(|i| 1.0 / (b0[i].sqrt() * ch[i].basis.r0)));
    let right = rdiag((0..m).map(|i| b0[i].sqrt() * ch[i].basis.r0));
    let pre = rdiag(ch.iter().map(|c| 2.0 * (c.n_trunc as f64 + 0.5 * c.l() as f64 + 1.25)));
    let id = DMatrix::identity(m, m);
    Ok(pre * (&id - left * g * right) - id)
}

/// The same with the [r₀] factors dropped, valid for equal oscillator radii.
pub fn discrete_p_equal_mass(h: &CoupledHamiltonian, energy: f64) -> Result<DMatrix<f64>> {
    let g = h.g_matrix(energy)?;
    let ch = &h.channels;
    let m = h.size();
    let b0 = natural_radii(ch);
    let left = rdiag(b0.iter().map(|b| 1.0 / b.sqrt()));
    let right = rdiag(b0.iter().map(|b| b.sqrt()));
    let pre = rdiag(ch.iter().map(|c| 2.0 * (c.n_trunc as f64 + 0.5 * c.l() as f64 + 1.25)));
    let id = DMatrix::identity(m, m);
    Ok(pre * (&id - left * g * right) - id)
}

/// Eigenphases δ_α (ascending) of a symmetric unitary S = O e^{2iδ} Oᵀ and the
/// real orthogonal O (columns are eigenchannels).
pub fn eigenphases(s: &CMat) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let re = s.map(|z| z.re);
    let im = s.map(|z| z.im);
    // Re S and Im S commute; a generic real combination shares their eigenvectors.
    let mut best: Option<(f64, DMatrix<f64>)> = None;
    for theta in [0.37f64, 1.21, 2.03] {
        let comb = &re * theta.cos() + &im * theta.sin();
        let sym = 0.5 * (&comb + comb.transpose());
        let (vals, vecs) = sorted_eigen(&sym)?;
        let gap = vals.as_slice().windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        if best.as_ref().is_none_or(|(g, _)| gap > *g) {
            best = Some((gap, vecs));
        }
    }
    let o = best.unwrap().1;
    let d = o.transpose() * &re * &o;
    let di = o.transpose() * &im * &o;
    let mut pairs: Vec<(f64, usize)> = (0..s.nrows())
        .map(|i| {
            let ph = 0.5 * di[(i, i)].atan2(d[(i, i)]);
            (ph, i)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let o_sorted = DMatrix::from_fn(o.nrows(), o.ncols(), |r, c| o[(r, pairs[c].1)]);
    Ok((pairs.into_iter().map(|p| p.0).collect(), o_sorted))
}

/// Charged channels: auxiliary potentials V^Sh with the Coulomb term cut at b_Γ.
#[derive(Debug, Clone)]
pub struct CoupledCoulombProblem {
    pub channels: Vec<Channel>,
    pub nuclear: PotentialMatrix,
    pub radii: Vec<f64>,
}

impl CoupledCoulombProblem {
    /// V^Sh_ΓΓ = (V_ΓΓ + Coulomb) cut at b_Γ; couplings cut at min(b_Γ, b_Γ').
    pub fn auxiliary_potential(&self) -> PotentialMatrix {
        let m = self.channels.len();
        let mut out = PotentialMatrix::zeros(m);
        for i in 0..m {
            for j in i..m {
                let v = self.nuclear.get(i, j).clone();
                let inner: SharedPotential = if i == j {
                    Arc::new(WithCoulomb {
                        nuclear: v,
                        charge_product: self.channels[i].charge_product,
                    })
                } else {
                    v
                };
                out.set(
                    i,
                    j,
                    Arc::new(Cut {
                        inner,
                        b: self.radii[i].min(self.radii[j]),
                    }),
                );
            }
        }
        out
    }

    /// Checks R_Nucl ≤ b_Γ < r^cl_{N_Γ} with R_Nucl from the nuclear range hint.
    pub fn check_radii(&self, nuclear_radius: f64) -> Result<()> {
        for (c, &b) in self.channels.iter().zip(&self.radii) {
            let upper = c.basis.classical_turning_point(c.n_trunc);
            if b < nuclear_radius || b >= upper {
                return Err(HorseError::RadiusWindow {
                    b,
                    lower: nuclear_radius,
                    upper,
                });
            }
        }
        Ok(())
    }

    pub fn auxiliary_hamiltonian(&self) -> Result<CoupledHamiltonian> {
        CoupledHamiltonian::new(self.channels.clone(), &self.auxiliary_potential())
    }
}

/// Coulomb S by both routes, the auxiliary S^Sh and [𝒩].
#[derive(Debug, Clone)]
pub struct CoupledCoulombSolution {
    pub energy: f64,
    /// Through [P^Sh].
    pub s: CMat,
    /// Through [S^Sh].
    pub s_from_short: CMat,
    pub s_short: CMat,
    pub renormalization: CMat,
}

/// Coulomb S from the auxiliary P-matrix:
/// [S] = {[b]⁻¹[P^Sh][Ĝ⁺] − [Ĝ⁺]'}⁻¹{[b]⁻¹[P^Sh][Ĝ⁻] − [Ĝ⁻]'}.
pub fn coulomb_s_via_p(h_short: &CoupledHamiltonian, energy: f64, radii: &[f64]) -> Result<CMat> {
    let p = complexify(&p_matrix(h_short, energy, radii)?);
    let kin = h_short.channels.iter().map(|c| c.kinematics(energy)).collect::<Result<Vec<_>>>()?;
    let [gp, gm, dgp, dgm] = hankels(&h_short.channels, &kin, radii, true)?;
    let binv = complexify(&rdiag(radii.iter().map(|b| 1.0 / b)));
    let bp = &binv * &p;
    let (inv, _) = inverse(&bp * &gp - &dgp, "Coulomb S brace")?;
    Ok(inv * (&bp * &gm - &dgm))
}

/// Coulomb S from S^Sh through the quasi-Wronskian matrices
/// W^{±∓} = Ĥ^± Ĝ^∓' − Ĥ^±' Ĝ^∓ and the [μ/b] symmetry.
pub fn coulomb_s_via_short(channels: &[Channel], energy: f64, s_short: &CMat, radii: &[f64]) -> Result<CMat> {
    let kin = channels.iter().map(|c| c.kinematics(energy)).collect::<Result<Vec<_>>>()?;
    let [hp, hm, dhp, dhm] = hankels(channels, &kin, radii, false)?;
    let [gp, gm, dgp, dgm] = hankels(channels, &kin, radii, true)?;
    let w = |a: &CMat, da: &CMat, b: &CMat, db: &CMat| a * db - da * b;
    let first = w(&hm, &dhm, &gm, &dgm) - w(&hp, &dhp, &gm, &dgm) * s_short;
    let second = w(&hm, &dhm, &gp, &dgp) - w(&hp, &dhp, &gp, &dgp) * s_short;
    let (inv, _) = inverse(second, "Coulomb S from S^Sh")?;
    let left = complexify(&rdiag(channels.iter().zip(radii).map(|(c, b)| b * b / c.basis.reduced_mass)));
    let right = complexify(&rdiag(channels.iter().zip(radii).map(|(c, b)| c.basis.reduced_mass / (b * b))));
    Ok(left * first * inv * right)
}

/// [𝒩] = {[Ĝ⁺][S] − [Ĝ⁻]}{[Ĥ⁺][S^Sh] − [Ĥ⁻]}⁻¹.
pub fn renormalization_matrix(channels: &[Channel], energy: f64, s: &CMat, s_short: &CMat, radii: &[f64]) -> Result<CMat> {
    let kin = channels.iter().map(|c| c.kinematics(energy)).collect::<Result<Vec<_>>>()?;
    let [hp, hm, _, _] = hankels(channels, &kin, radii, false)?;
    let [gp, gm, _, _] = hankels(channels, &kin, radii, true)?;
    let (inv, _) = inverse(&hp * s_short - &hm, "renormalization brace")?;
    Ok((&gp * s - &gm) * inv)
}

/// Exterior channel-function matrix (1/2i)([Ĝ⁺][S] − [Ĝ⁻]) at r_Γ = b_Γ.
pub fn exterior_functions(channels: &[Channel], energy: f64, s: &CMat, radii: &[f64], charged: bool) -> Result<CMat> {
    let kin = channels.iter().map(|c| c.kinematics(energy)).collect::<Result<Vec<_>>>()?;
    let [gp, gm, _, _] = hankels(channels, &kin, radii, charged)?;
    Ok((&gp * s - &gm) / Complex64::new(0.0, 2.0))
}

/// Full charged-channel solution at one energy.
pub fn multichannel_coulomb_s(h_short: &CoupledHamiltonian, energy: f64, radii: &[f64]) -> Result<CoupledCoulombSolution> {
    check_radii(h_short, radii)?;
    let s_short = s_matrix(h_short, energy)?.s;
    let s = coulomb_s_via_p(h_short, energy, radii)?;
    let s_from_short = coulomb_s_via_short(&h_short.channels, energy, &s_short, radii)?;
    let renormalization = renormalization_matrix(&h_short.channels, energy, &s, &s_short, radii)?;
    Ok(CoupledCoulombSolution {
        energy,
        s,
        s_from_short,
        s_short,
        renormalization,
    })
}

/// Sommerfeld parameter of channel Γ at total energy E.
pub fn sommerfeld(channel: &Channel, energy: f64) -> Result<f64> {
    let kin = channel.kinematics(energy)?;
    Ok(channel.charge_product * E_SQUARED * channel.basis.reduced_mass / (HBAR_C * HBAR_C * kin.k))
}

/// Eigenphases folded into (−π/2, π/2].
pub fn fold_phase(d: f64) -> f64 {
    let x = (d + PI / 2.0).rem_euclid(PI) - PI / 2.0;
    if x <= -PI / 2.0 {
        x + PI
    } else {
        x
    }
}

/// Largest folded difference between two eigenphase sets under the best
/// cyclic pairing (phases live on a circle of period π).
pub fn eigenphase_mismatch(a: &[f64], b: &[f64]) -> f64 {
    let sorted = |v: &[f64]| {
        let mut v: Vec<f64> = v.iter().map(|&x| fold_phase(x)).collect();
        v.sort_by(|x, y| x.total_cmp(y));
        v
    };
    let (a, b) = (sorted(a), sorted(b));
    let m = a.len().min(b.len());
    (0..m)
        .map(|shift| (0..m).map(|i| fold_phase(a[i] - b[(i + shift) % m]).abs()).fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::reduced_mass;
    use crate::hamiltonian::TruncatedHamiltonian;
    use crate::oracle::{CoupledProblem, OracleChannel};
    use crate::pmatrix::{p_matrix_discrete, p_matrix_general};
    use crate::potential::{SquareWell, WoodsSaxon};
    use crate::single_channel;

    fn basis(l: usize) -> OscillatorBasis {
        OscillatorBasis::new(18.0, reduced_mass(1.0, 15.0), l).unwrap()
    }

    fn channel(l: usize, n: usize, threshold: f64, z: f64) -> Channel {
        Channel {
            basis: basis(l),
            n_trunc: n,
            threshold,
            charge_product: z,
        }
    }

    fn well(depth: f64) -> SharedPotential {
        Arc::new(SquareWell { depth, radius: 3.0 })
    }

    fn toy(coupling: f64, n: usize) -> CoupledHamiltonian {
        let mut v = PotentialMatrix::zeros(2);
        v.set(0, 0, well(-20.0));
        v.set(1, 1, well(-15.0));
        v.set(0, 1, well(coupling));
        CoupledHamiltonian::new(vec![channel(0, n, 0.0, 0.0), channel(0, n, 2.0, 0.0)], &v).unwrap()
    }

    fn single_ws() -> (CoupledHamiltonian, TruncatedHamiltonian) {
        let ws = WoodsSaxon::nucleon_core(15.0);
        let mut v = PotentialMatrix::zeros(1);
        v.set(0, 0, Arc::new(ws));
        let h = CoupledHamiltonian::new(vec![channel(0, 9, 0.0, 0.0)], &v).unwrap();
        let s = TruncatedHamiltonian::diagonalize(basis(0), &ws, 9, false).unwrap();
        (h, s)
    }

    #[test]
    fn eigenvectors_orthonormal() {
        let h = toy(-5.0, 6);
        let v = &h.eigenvectors;
        let d = v.transpose() * v - DMatrix::identity(v.ncols(), v.ncols());
        assert!(d.amax() < 1e-10);
    }

    #[test]
    fn single_channel_collapse() {
        let (h, s) = single_ws();
        for e in [1.5, 8.0, 22.0] {
            let d = single_channel::phase_shift(&s, e).unwrap();
            let sm = s_matrix(&h, e).unwrap();
            assert!((sm.s[(0, 0)] - Complex64::from_polar(1.0, 2.0 * d)).norm() < 1e-10);
            let b = 6.5;
            let p = p_matrix(&h, e, &[b]).unwrap()[(0, 0)];
            let p1 = p_matrix_general(&s, e, b).unwrap().p().unwrap();
            assert!((p - p1).abs() < 1e-10 * p1.abs().max(1.0));
            let dp = discrete_p(&h, e).unwrap()[(0, 0)];
            assert!((dp - p_matrix_discrete(&s, e).unwrap().from_coefficients).abs() < 1e-12 * dp.abs().max(1.0));
        }
    }

    #[test]
    fn decoupled_g_is_diagonal() {
        let h = toy(0.0, 8);
        let mut single = PotentialMatrix::zeros(1);
        single.set(0, 0, well(-15.0));
        let c = CoupledHamiltonian::new(vec![channel(0, 8, 2.0, 0.0)], &single).unwrap();
        let e = 7.3;
        let g = h.g_matrix(e).unwrap();
        assert!(g[(0, 1)].abs() < 1e-12 && g[(1, 0)].abs() < 1e-12);
        assert!((g[(1, 1)] - c.g_matrix(e).unwrap()[(0, 0)]).abs() < 1e-12);
    }

    #[test]
    fn exchange_symmetric_channels() {
        let mut v = PotentialMatrix::zeros(2);
        v.set(0, 0, well(-20.0));
        v.set(1, 1, well(-20.0));
        v.set(0, 1, well(-5.0));
        let h = CoupledHamiltonian::new(vec![channel(0, 6, 0.0, 0.0), channel(0, 6, 0.0, 0.0)], &v).unwrap();
        let g = h.g_matrix(9.1).unwrap();
        assert!((g[(0, 1)] - g[(1, 0)]).abs() < 1e-10);
        assert!((g[(0, 0)] - g[(1, 1)]).abs() < 1e-10);
    }

    #[test]
    fn residue_is_rank_one() {
        let h = toy(-5.0, 8);
        let lam = h.positive_eigenvalues()[1];
        let eps = 1e-6;
        let r = (h.g_matrix(lam + eps).unwrap() - h.g_matrix(lam - eps).unwrap()) * (0.5 * eps);
        assert!(r.determinant().abs() < 1e-8 * r.norm_squared());
    }

    #[test]
    fn s_unitary_symmetric_and_dual_forms_agree() {
        let h = toy(-5.0, 10);
        for i in 0..20 {
            let e = 2.5 + 1.3 * i as f64;
            let s = s_matrix(&h, e).unwrap();
            assert!(s.unitarity_defect() < 1e-8, "{}", s.unitarity_defect());
            assert!(s.symmetry_defect() < 1e-8);
            assert!((&s.s - &s.s_transposed_form).norm() < 1e-9);
            for col in 0..2 {
                let flux: f64 = (0..2).map(|r| s.s[(r, col)].norm_sqr()).sum();
                assert!((flux - 1.0).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn closed_channels_rejected() {
        let h = toy(-5.0, 4);
        assert!(matches!(s_matrix(&h, 1.0), Err(HorseError::ClosedChannel { .. })));
    }

    #[test]
    fn coefficients_match_at_edge_and_decouple() {
        let h = toy(-5.0, 10);
        let e = 9.0;
        let s = s_matrix(&h, e).unwrap().s;
        let c = interior_coefficients(&h, e, &s, 30).unwrap();
        for g in 0..2 {
            for gi in 0..2 {
                let a = c.a[g][(10, gi)];
                let b = c.asymptotic_at_edge[(g, gi)];
                assert!((a - b).norm() < 1e-9 * b.norm().max(1e-12));
            }
        }
        let h0 = toy(0.0, 10);
        let s0 = s_matrix(&h0, e).unwrap().s;
        let c0 = interior_coefficients(&h0, e, &s0, 30).unwrap();
        let single = TruncatedHamiltonian::diagonalize(basis(0), well(-20.0).as_ref(), 10, false).unwrap();
        let sc = single_channel::coefficients(&single, e, 30).unwrap();
        // a^as = −2i e^{iδ}(cos δ S_n + sin δ C_n)
        let f = Complex64::new(0.0, -2.0) * Complex64::from_polar(1.0, sc.delta);
        for n in 0..=30 {
            assert!((c0.a[0][(n, 0)] - f * sc.coefficients[n]).norm() < 1e-9);
            assert!(c0.a[1][(n, 0)].norm() < 1e-12);
        }
    }

    #[test]
    fn p_matrix_symmetry_and_consistency() {
        let mut v = PotentialMatrix::zeros(2);
        v.set(0, 0, well(-20.0));
        v.set(1, 1, well(-15.0));
        v.set(0, 1, well(-5.0));
        let ch = vec![
            channel(0, 10, 0.0, 0.0),
            Channel {
                basis: OscillatorBasis::new(18.0, reduced_mass(4.0, 12.0), 1).unwrap(),
                n_trunc: 8,
                threshold: 2.0,
                charge_product: 0.0,
            },
        ];
        let h = CoupledHamiltonian::new(ch.clone(), &v).unwrap();
        let radii = [4.5, 5.2];
        for e in [4.0, 11.0, 19.0] {
            let p = p_matrix(&h, e, &radii).unwrap();
            assert!(p_symmetry_defect(&ch, &p, &radii) < 1e-8);
            let s = s_matrix(&h, e).unwrap().s;
            let ps = p_from_s(&ch, e, &s, &radii).unwrap();
            assert!((ps.map(|z| z.re) - &p).norm() < 1e-8 * p.norm());
            assert!(ps.map(|z| z.im).norm() < 1e-8 * p.norm());
        }
        // equal μ/b: plain symmetry
        let h2 = toy(-5.0, 10);
        let p = p_matrix(&h2, 8.0, &[5.0, 5.0]).unwrap();
        assert!((&p - p.transpose()).norm() < 1e-8 * p.norm());
    }

    #[test]
    fn discrete_forms_agree_for_equal_channels() {
        let h = toy(-5.0, 9);
        let a = discrete_p(&h, 7.5).unwrap();
        let b = discrete_p_equal_mass(&h, 7.5).unwrap();
        assert!((a - b).norm() < 1e-12);
        let r = natural_radii(&h.channels);
        assert_eq!(r[0], r[1]);
        assert_eq!(r[0], basis(0).natural_channel_radius(9));
    }

    #[test]
    fn relabeling_permutes() {
        let mut v = PotentialMatrix::zeros(2);
        v.set(0, 0, well(-20.0));
        v.set(1, 1, well(-15.0));
        v.set(0, 1, well(-5.0));
        let a = CoupledHamiltonian::new(vec![channel(0, 8, 0.0, 0.0), channel(1, 7, 2.0, 0.0)], &v).unwrap();
        let mut w = PotentialMatrix::zeros(2);
        w.set(0, 0, well(-15.0));
        w.set(1, 1, well(-20.0));
        w.set(0, 1, well(-5.0));
        let b = CoupledHamiltonian::new(vec![channel(1, 7, 2.0, 0.0), channel(0, 8, 0.0, 0.0)], &w).unwrap();
        let e = 12.0;
        let (sa, sb) = (s_matrix(&a, e).unwrap().s, s_matrix(&b, e).unwrap().s);
        let perm = |m: &CMat| CMat::from_fn(2, 2, |i, j| m[(1 - i, 1 - j)]);
        assert!((perm(&sa) - sb).norm() < 1e-9);
        let (pa, pb) = (p_matrix(&a, e, &[5.0, 6.0]).unwrap(), p_matrix(&b, e, &[6.0, 5.0]).unwrap());
        assert!((DMatrix::from_fn(2, 2, |i, j| pa[(1 - i, 1 - j)]) - pb).norm() < 1e-9 * pa.norm());
    }

    #[test]
    fn eigenphases_of_diagonal_s() {
        let s = cdiag([0.3f64, -0.7].iter().map(|d| Complex64::from_polar(1.0, 2.0 * d)));
        let (ph, _) = eigenphases(&s).unwrap();
        assert!((ph[0] + 0.7).abs() < 1e-12 && (ph[1] - 0.3).abs() < 1e-12);
        assert!(eigenphase_mismatch(&[0.3, -0.7], &[-0.7 + PI, 0.3]) < 1e-12);
        assert!((eigenphase_mismatch(&[1.5], &[-1.5]) - (PI - 3.0)).abs() < 1e-12);
    }

    fn oracle_eigenphases(coupling: f64, e: f64) -> Vec<f64> {
        let mu = reduced_mass(1.0, 15.0);
        let chans = vec![
            OracleChannel {
                l: 0,
                reduced_mass: mu,
                threshold: 0.0,
                charge_product: 0.0,
            },
            OracleChannel {
                l: 0,
                reduced_mass: mu,
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
        let prob = CoupledProblem {
            channels: chans,
            potential: &v,
            breakpoints: vec![3.0],
            range: 3.0,
        };
        eigenphases(&prob.s_matrix(e, None, None).unwrap().s).unwrap().0
    }

    #[test]
    fn eigenphases_converge_to_oracle() {
        let e = 10.0;
        let o = oracle_eigenphases(-5.0, e);
        let err = |n: usize| {
            let (ph, _) = eigenphases(&s_matrix(&toy(-5.0, n), e).unwrap().s).unwrap();
            eigenphase_mismatch(&ph, &o)
        };
        let (e10, e40) = (err(10), err(40));
        assert!(e10 < 0.1 && e40 < e10 && e40 < 0.02, "{e10} {e40}");
    }

    fn charged_toy(z: f64) -> (CoupledHamiltonian, Vec<f64>) {
        let mut v = PotentialMatrix::zeros(2);
        v.set(0, 0, well(-20.0));
        v.set(1, 1, well(-15.0));
        v.set(0, 1, well(-5.0));
        let p = CoupledCoulombProblem {
            channels: vec![channel(0, 10, 0.0, z), channel(0, 10, 2.0, z)],
            nuclear: v,
            radii: vec![6.0, 6.0],
        };
        p.check_radii(3.0).unwrap();
        (p.auxiliary_hamiltonian().unwrap(), p.radii.clone())
    }

    #[test]
    fn coulomb_routes_agree() {
        let (h, radii) = charged_toy(7.0);
        for i in 0..10 {
            let e = 3.0 + 2.6 * i as f64;
            let sol = multichannel_coulomb_s(&h, e, &radii).unwrap();
            assert!((&sol.s - &sol.s_from_short).norm() < 1e-8, "E={e}");
            let m = CMat::identity(2, 2);
            assert!((sol.s.adjoint() * &sol.s - &m).norm() < 1e-7);
            assert!((&sol.s - sol.s.transpose()).norm() < 1e-7);
        }
        let sol = multichannel_coulomb_s(&h, 9.0, &radii).unwrap();
        let n = &sol.renormalization;
        assert!(n[(0, 1)].norm().max(n[(1, 0)].norm()) > 1e-4);
        // values at b: interior 𝒩 u^Sh equals the exterior Coulomb form
        let ch = &h.channels;
        let u_sh = exterior_functions(ch, 9.0, &sol.s_short, &radii, false).unwrap();
        let u = exterior_functions(ch, 9.0, &sol.s, &radii, true).unwrap();
        assert!((n * u_sh - &u).norm() < 1e-6 * u.norm());
    }

    #[test]
    fn zero_charge_is_short_range() {
        let (h, radii) = charged_toy(0.0);
        let sol = multichannel_coulomb_s(&h, 8.0, &radii).unwrap();
        assert!((&sol.s - &sol.s_short).norm() < 1e-9);
        assert!((&sol.renormalization - CMat::identity(2, 2)).norm() < 1e-9);
    }

    #[test]
    fn single_charged_channel_matches_coulomb_module() {
        let ws: SharedPotential = Arc::new(WoodsSaxon::nucleon_core(15.0));
        let mut v = PotentialMatrix::zeros(1);
        v.set(0, 0, ws.clone());
        let p = CoupledCoulombProblem {
            channels: vec![channel(0, 10, 0.0, 7.0)],
            nuclear: v,
            radii: vec![7.0],
        };
        let h = p.auxiliary_hamiltonian().unwrap();
        let cp = crate::coulomb::CoulombProblem::new(ws, 7.0, 7.0, basis(0), 10);
        let solver = cp.solver().unwrap();
        for e in [2.0, 9.0, 20.0] {
            let d = solver.phase_shift(e).unwrap().delta;
            let s = multichannel_coulomb_s(&h, e, &[7.0]).unwrap().s[(0, 0)];
            assert!((s - Complex64::from_polar(1.0, 2.0 * d)).norm() < 1e-9);
        }
    }
}
