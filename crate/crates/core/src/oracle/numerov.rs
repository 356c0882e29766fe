use crate::constants::{E_SQUARED, HBAR_C};
use crate::error::{HorseError, Result};
use crate::potential::RadialPotential;
use crate::specfun::coulomb_wave;

/// Integration grid. The step is adjusted per segment so that potential
/// breakpoints fall on grid points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumerovGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub h: f64,
}

impl NumerovGrid {
    pub fn new(h: f64, r_max: f64) -> Self {
        NumerovGrid { r_min: h, r_max, h }
    }

    pub fn halved(&self) -> Self {
        NumerovGrid {
            r_min: self.r_min * 0.5,
            r_max: self.r_max,
            h: self.h * 0.5,
        }
    }

    /// Segment ends between r_min and r_max, split at the breakpoints.
    fn cuts(&self, breakpoints: &[f64]) -> Vec<f64> {
        let mut cuts = vec![self.r_min];
        let mut inner: Vec<f64> = breakpoints
            .iter()
            .copied()
            .filter(|&b| b > self.r_min + 4.0 * self.h && b < self.r_max - 4.0 * self.h)
            .collect();
        inner.sort_by(|a, b| a.total_cmp(b));
        cuts.extend(inner);
        cuts.push(self.r_max);
        cuts
    }
}

/// Uniform piece of a solution: r_i = start + i·h.
#[derive(Debug, Clone)]
pub struct Segment {
    pub start: f64,
    pub h: f64,
    pub u: Vec<f64>,
}

impl Segment {
    pub fn r(&self, i: usize) -> f64 {
        self.start + i as f64 * self.h
    }

    fn end(&self) -> f64 {
        self.r(self.u.len() - 1)
    }
}

/// ū(r) = r·ψ(r) on a piecewise-uniform grid.
#[derive(Debug, Clone)]
pub struct RadialWave {
    pub segments: Vec<Segment>,
}

impl RadialWave {
    /// (r, ū) pairs in increasing r, segment joints listed once.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for (j, s) in self.segments.iter().enumerate() {
            let skip = usize::from(j > 0);
            out.extend(s.u.iter().enumerate().skip(skip).map(|(i, &u)| (s.r(i), u)));
        }
        out
    }

    pub fn scale(&mut self, c: f64) {
        for s in &mut self.segments {
            for u in &mut s.u {
                *u *= c;
            }
        }
    }

    /// ū and dū/dr at the grid point nearest to r, with a 5-point centered
    /// derivative. Returns the radius actually used.
    pub fn value_and_derivative(&self, r: f64) -> Result<(f64, f64, f64)> {
        for s in &self.segments {
            if r >= s.start && r <= s.end() {
                let n = s.u.len();
                let i = (((r - s.start) / s.h).round() as usize).clamp(2, n.saturating_sub(3));
                if n < 5 {
                    break;
                }
                let u = &s.u;
                let d = (u[i - 2] - 8.0 * u[i - 1] + 8.0 * u[i + 1] - u[i + 2]) / (12.0 * s.h);
                return Ok((s.r(i), u[i], d));
            }
        }
        Err(HorseError::invalid("r_match", r, "outside the integration grid"))
    }

    /// ∫ g(r) ū(r) dr over the whole grid by composite Simpson per segment.
    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.segments
            .iter()
            .map(|s| {
                let vals: Vec<f64> = s.u.iter().enumerate().map(|(i, &u)| g(s.r(i)) * u).collect();
                simpson(&vals, s.h)
            })
            .sum()
    }
}

/// Composite Simpson; an odd interval count closes with the 3/8 rule.
pub fn simpson(f: &[f64], h: f64) -> f64 {
    let n = f.len();
    if n < 2 {
        return 0.0;
    }
    if n == 2 {
        return 0.5 * h * (f[0] + f[1]);
    }
    let intervals = n - 1;
    let (even_end, tail) = if intervals % 2 == 0 { (n - 1, 0.0) } else { (n - 4, 3.0 * h / 8.0 * (f[n - 4] + 3.0 * f[n - 3] + 3.0 * f[n - 2] + f[n - 1])) };
    if intervals == 3 {
        return tail;
    }
    let mut s = f[0] + f[even_end];
    for (i, v) in f.iter().enumerate().take(even_end).skip(1) {
        s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    s * h / 3.0 + tail
}

/// One partial wave of a (possibly charged) two-body problem.
#[derive(Clone, Copy)]
pub struct RadialProblem<'a> {
    /// Short-range part; the point Coulomb term is added internally.
    pub nuclear: &'a dyn RadialPotential,
    pub l: usize,
    pub reduced_mass: f64,
    pub charge_product: f64,
}

impl<'a> RadialProblem<'a> {
    pub fn new(nuclear: &'a dyn RadialPotential, l: usize, reduced_mass: f64) -> Self {
        RadialProblem {
            nuclear,
            l,
            reduced_mass,
            charge_product: 0.0,
        }
    }

    pub fn with_charge(mut self, charge_product: f64) -> Self {
        self.charge_product = charge_product;
        self
    }

    fn potential(&self, r: f64) -> f64 {
        self.nuclear.value(r) + self.charge_product * E_SQUARED / r
    }

    /// f(r) in ū'' = f ū.
    fn f(&self, r: f64, energy: f64) -> f64 {
        let lf = self.l as f64;
        lf * (lf + 1.0) / (r * r) + 2.0 * self.reduced_mass / (HBAR_C * HBAR_C) * (self.potential(r) - energy)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.nuclear.breakpoints()
    }

    /// Regular ū from r_min outward.
    pub fn integrate(&self, energy: f64, grid: &NumerovGrid) -> Result<RadialWave> {
        let cuts = grid.cuts(&self.breakpoints());
        let scale = 2.0 * self.reduced_mass / (HBAR_C * HBAR_C);
        let lf = self.l as f64;
        // ū = r^{l+1}(1 + c₁r + c₂r²) near the origin
        let z = scale * (self.nuclear.r_times_value_at_origin() + self.charge_product * E_SQUARED);
        let c1 = z / (2.0 * (lf + 1.0));
        let r_probe = grid.r_min;
        let w = scale * (self.potential(r_probe) - z / scale / r_probe - energy);
        let c2 = (z * c1 + w) / (4.0 * lf + 6.0);
        let series = |r: f64| r.powi(self.l as i32 + 1) * (1.0 + c1 * r + c2 * r * r);

        let mut segments: Vec<Segment> = Vec::with_capacity(cuts.len() - 1);
        for (j, win) in cuts.windows(2).enumerate() {
            let (a, b) = (win[0], win[1]);
            let steps = ((b - a) / grid.h).ceil().max(4.0) as usize;
            let h = (b - a) / steps as f64;
            let eps = 1e-9 * h;
            let fv: Vec<f64> = (0..=steps)
                .map(|i| {
                    let r = a + i as f64 * h;
                    let r = if i == 0 { r + eps } else if i == steps { r - eps } else { r };
                    self.f(r, energy)
                })
                .collect();
            let (u0, u1) = if j == 0 {
                (series(a), series(a + h))
            } else {
                let prev = segments.last().unwrap();
                let (u, du) = end_state(prev, |r| self.f(r, energy), prev.end());
                (u, taylor_step(u, du, &fv, h))
            };
            let u = numerov_run(&fv, h, u0, u1);
            segments.push(Segment { start: a, h, u });
        }
        let mut wave = RadialWave { segments };
        let top = wave.segments.iter().flat_map(|s| s.u.iter()).fold(0.0f64, |m, x| m.max(x.abs()));
        if !top.is_finite() {
            return Err(HorseError::Overflow("Numerov integration"));
        }
        if top > 0.0 {
            wave.scale(1.0 / top);
        }
        Ok(wave)
    }
}

/// Scalar Numerov with in-place rescaling against overflow.
fn numerov_run(f: &[f64], h: f64, u0: f64, u1: f64) -> Vec<f64> {
    let n = f.len();
    let t: Vec<f64> = f.iter().map(|x| h * h * x / 12.0).collect();
    let mut u = Vec::with_capacity(n);
    u.push(u0);
    u.push(u1);
    for i in 1..n - 1 {
        let next = ((2.0 + 10.0 * t[i]) * u[i] - (1.0 - t[i - 1]) * u[i - 1]) / (1.0 - t[i + 1]);
        u.push(next);
        if next.abs() > 1e200 {
            for x in u.iter_mut() {
                *x *= 1e-200;
            }
        }
    }
    u
}

/// (ū, ū') at the last point of a segment; ū' from the Numerov-consistent
/// backward formula, O(h⁴).
fn end_state(seg: &Segment, f: impl Fn(f64) -> f64, _r_end: f64) -> (f64, f64) {
    let n = seg.u.len();
    let h = seg.h;
    let eps = 1e-9 * h;
    let u = &seg.u;
    let upp = |i: usize| {
        let r = seg.r(i);
        let r = if i == n - 1 { r - eps } else { r };
        f(r) * u[i]
    };
    let du = (u[n - 1] - u[n - 2]) / h + h / 24.0 * (7.0 * upp(n - 1) + 6.0 * upp(n - 2) - upp(n - 3));
    (u[n - 1], du)
}

/// ū(a + h) from a fourth-order Taylor step using ū'' = fū.
fn taylor_step(u: f64, du: f64, f: &[f64], h: f64) -> f64 {
    let f0 = f[0];
    let d1 = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    let d2 = (f[0] - 2.0 * f[1] + f[2]) / (h * h);
    let u2 = f0 * u;
    let u3 = d1 * u + f0 * du;
    let u4 = d2 * u + 2.0 * d1 * du + f0 * u2;
    u + h * du + h * h / 2.0 * u2 + h.powi(3) / 6.0 * u3 + h.powi(4) / 24.0 * u4
}

/// Matching coefficients ū = A·F + B·G at r (F, G Coulomb or Riccati–Bessel).
pub fn match_coefficients(l: usize, k: f64, eta: f64, r: f64, u: f64, du: f64) -> Result<(f64, f64)> {
    let c = coulomb_wave(l, eta, k * r)?;
    // F'G − FG' = 1 with derivatives in ρ
    let a = c.g * du / k - u * c.dg;
    let b = u * c.df - c.f * du / k;
    Ok((a, b))
}

/// δ from ū at one matching radius.
pub fn extract_phase(wave: &RadialWave, l: usize, k: f64, eta: f64, r_match: f64) -> Result<f64> {
    let (r, u, du) = wave.value_and_derivative(r_match)?;
    let (a, b) = match_coefficients(l, k, eta, r, u, du)?;
    if a == 0.0 && b == 0.0 {
        return Err(HorseError::NodeAtRadius { b: r });
    }
    Ok(fold(b.atan2(a)))
}

pub(crate) fn fold(mut d: f64) -> f64 {
    use std::f64::consts::PI;
    d = (d + PI / 2.0).rem_euclid(PI) - PI / 2.0;
    if d <= -PI / 2.0 {
        d += PI;
    }
    d
}

/// Oracle phase shift with its self-checks.
#[derive(Debug, Clone, Copy)]
pub struct OraclePhase {
    pub delta: f64,
    /// |δ(h) − δ(h/2)|.
    pub error_estimate: f64,
    pub r_match: f64,
}

/// Step used when none is given (fm).
pub const DEFAULT_STEP: f64 = 1.5e-3;

/// Distance between the two matching radii compared for stability (fm).
pub const SECOND_MATCH_OFFSET: f64 = 2.0;

/// δ_l(E) relative to the Coulomb (or free) waves. `r_match` defaults to
/// range + 1 fm; a second match 2 fm further out must agree to 1e-5 rad.
pub fn phase_shift(problem: &RadialProblem, energy: f64, r_match: Option<f64>, h: Option<f64>) -> Result<OraclePhase> {
    let k = crate::constants::momentum_from_energy(energy, problem.reduced_mass)?;
    if !(k > 0.0) {
        return Err(HorseError::ClosedChannel { energy });
    }
    let eta = problem.charge_product * E_SQUARED * problem.reduced_mass / (HBAR_C * HBAR_C * k);
    let rm = r_match.unwrap_or(problem.nuclear.range_hint() + 1.0);
    let h = h.unwrap_or(DEFAULT_STEP);
    let grid = NumerovGrid::new(h, rm + SECOND_MATCH_OFFSET + 10.0 * h);
    let wave = problem.integrate(energy, &grid)?;
    let d1 = extract_phase(&wave, problem.l, k, eta, rm)?;
    let d2 = extract_phase(&wave, problem.l, k, eta, rm + SECOND_MATCH_OFFSET)?;
    let diff = fold(d2 - d1).abs();
    if diff > 1e-5 {
        return Err(HorseError::MatchingInstability {
            r1: rm,
            r2: rm + SECOND_MATCH_OFFSET,
            diff,
        });
    }
    let fine = problem.integrate(energy, &grid.halved())?;
    let dh = extract_phase(&fine, problem.l, k, eta, rm)?;
    Ok(OraclePhase {
        delta: dh,
        error_estimate: fold(dh - d1).abs(),
        r_match: rm,
    })
}

/// Regular solution normalized to ū → (cos δ·F + sin δ·G)/√v beyond the
/// potential, integrated out to at least `r_max`.
pub fn normalized_wave(problem: &RadialProblem, energy: f64, r_max: f64, h: Option<f64>) -> Result<(RadialWave, f64)> {
    let kin = crate::constants::Kinematics::new(energy, problem.reduced_mass)?;
    let eta = kin.sommerfeld(problem.charge_product);
    let rm = problem.nuclear.range_hint() + 1.0;
    let h = h.unwrap_or(DEFAULT_STEP);
    let grid = NumerovGrid::new(h, r_max.max(rm + 1.0) + 10.0 * h);
    let mut wave = problem.integrate(energy, &grid)?;
    let (r, u, du) = wave.value_and_derivative(rm)?;
    let (a, b) = match_coefficients(problem.l, kin.k, eta, r, u, du)?;
    let norm = (a * a + b * b).sqrt();
    if norm == 0.0 {
        return Err(HorseError::NodeAtRadius { b: r });
    }
    wave.scale(a.signum() / (norm * kin.velocity.sqrt()));
    Ok((wave, fold(b.atan2(a))))
}

/// Bound-state energies in (e_min, 0): zeros of ū(r_max; E), refined by bisection.
pub fn bound_states(problem: &RadialProblem, e_min: f64, r_max: f64, h: Option<f64>) -> Result<Vec<f64>> {
    let grid = NumerovGrid::new(h.unwrap_or(DEFAULT_STEP), r_max);
    let tail = |e: f64| -> Result<f64> {
        let w = problem.integrate(e, &grid)?;
        Ok(*w.segments.last().unwrap().u.last().unwrap())
    };
    let steps = 400;
    let mut out = Vec::new();
    let mut e_prev = e_min;
    let mut t_prev = tail(e_prev)?;
    for i in 1..steps {
        let e = e_min * (1.0 - i as f64 / steps as f64);
        let t = tail(e)?;
        if t.signum() != t_prev.signum() {
            let (mut lo, mut hi, mut tlo) = (e_prev, e, t_prev);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let tm = tail(mid)?;
                if tm.signum() == tlo.signum() {
                    lo = mid;
                    tlo = tm;
                } else {
                    hi = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        e_prev = e;
        t_prev = t;
    }
    Ok(out)
}

/// a_n = ∫ ū R_nl(r) r dr with ū from `normalized_wave`.
pub fn overlap_coefficient(wave: &RadialWave, radial: impl Fn(f64) -> f64) -> f64 {
    wave.integrate(|r| radial(r) * r)
}
