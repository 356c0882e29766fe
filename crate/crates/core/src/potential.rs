//! Local radial potentials V(r) in MeV, r in fm.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use crate::constants::E_SQUARED;
use crate::error::{HorseError, Result};

pub trait RadialPotential: Send + Sync {
    /// V(r) in MeV, r > 0.
    fn value(&self, r: f64) -> f64;

    /// Radius beyond which the short-range part is negligible (fm).
    fn range_hint(&self) -> f64;

    /// Radii where V or its derivative jumps; quadrature panels are split there.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    /// lim_{r→0} r·V(r) (MeV·fm); nonzero only for a Coulomb singularity.
    fn r_times_value_at_origin(&self) -> f64 {
        0.0
    }
}

pub type SharedPotential = Arc<dyn RadialPotential>;

impl fmt::Debug for dyn RadialPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RadialPotential(range {} fm)", self.range_hint())
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Zero;

impl RadialPotential for Zero {
    fn value(&self, _r: f64) -> f64 {
        0.0
    }
    fn range_hint(&self) -> f64 {
        0.0
    }
}

/// V(r) = depth for r < radius, zero outside.
#[derive(Debug, Clone, Copy)]
pub struct SquareWell {
    pub depth: f64,
    pub radius: f64,
}

impl RadialPotential for SquareWell {
    fn value(&self, r: f64) -> f64 {
        if r < self.radius {
            self.depth
        } else {
            0.0
        }
    }
    fn range_hint(&self) -> f64 {
        self.radius
    }
    fn breakpoints(&self) -> Vec<f64> {
        vec![self.radius]
    }
}

/// Woods–Saxon central well with a Thomas-type spin-orbit term
/// V_ls·(1/r)(df/dr)·⟨l·s⟩ sharing the same geometry.
#[derive(Debug, Clone, Copy)]
pub struct WoodsSaxon {
    /// Central depth (MeV, negative for attraction).
    pub depth: f64,
    pub radius: f64,
    pub diffuseness: f64,
    /// Spin-orbit strength (MeV·fm²).
    pub spin_orbit: f64,
    /// ⟨l·s⟩ of the partial wave.
    pub ls: f64,
}

impl WoodsSaxon {
    /// Default nucleon–core parameters for a core of mass number `a`:
    /// V₀ = −53 MeV, R = 1.25·A^{1/3} fm, a = 0.65 fm, V_ls = 15 MeV·fm², s-wave.
    pub fn nucleon_core(a: f64) -> Self {
        WoodsSaxon {
            depth: -53.0,
            radius: 1.25 * a.cbrt(),
            diffuseness: 0.65,
            spin_orbit: 15.0,
            ls: 0.0,
        }
    }

    /// Sets ⟨l·s⟩ = [j(j+1) − l(l+1) − 3/4]/2 for a spin-½ projectile.
    pub fn with_partial_wave(mut self, l: usize, j: f64) -> Self {
        let lf = l as f64;
        self.ls = 0.5 * (j * (j + 1.0) - lf * (lf + 1.0) - 0.75);
        self
    }

    fn form(&self, r: f64) -> f64 {
        1.0 / (1.0 + ((r - self.radius) / self.diffuseness).exp())
    }

    fn form_derivative(&self, r: f64) -> f64 {
        let e = ((r - self.radius) / self.diffuseness).exp();
        if !e.is_finite() {
            return 0.0;
        }
        -e / (self.diffuseness * (1.0 + e) * (1.0 + e))
    }
}

impl RadialPotential for WoodsSaxon {
    fn value(&self, r: f64) -> f64 {
        let mut v = self.depth * self.form(r);
        if self.ls != 0.0 && r > 0.0 {
            v += self.spin_orbit * self.form_derivative(r) / r * self.ls;
        }
        v
    }
    fn range_hint(&self) -> f64 {
        // |V| below ~1e-9 of the depth
        self.radius + 21.0 * self.diffuseness
    }
}

/// Oscillator potential μω²r²/2 with ħω in MeV.
#[derive(Debug, Clone, Copy)]
pub struct Harmonic {
    pub hbar_omega: f64,
    pub reduced_mass: f64,
}

impl RadialPotential for Harmonic {
    fn value(&self, r: f64) -> f64 {
        let hc = crate::constants::HBAR_C;
        0.5 * self.reduced_mass * (self.hbar_omega / hc).powi(2) * r * r
    }
    fn range_hint(&self) -> f64 {
        f64::INFINITY
    }
}

/// Point Coulomb repulsion Z₁Z₂e²/r added to another potential.
#[derive(Debug, Clone)]
pub struct WithCoulomb {
    pub nuclear: SharedPotential,
    pub charge_product: f64,
}

impl RadialPotential for WithCoulomb {
    fn value(&self, r: f64) -> f64 {
        self.nuclear.value(r) + self.charge_product * E_SQUARED / r
    }
    fn range_hint(&self) -> f64 {
        self.nuclear.range_hint()
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.nuclear.breakpoints()
    }
    fn r_times_value_at_origin(&self) -> f64 {
        self.nuclear.r_times_value_at_origin() + self.charge_product * E_SQUARED
    }
}

/// `inner` for r ≤ b, exactly zero beyond.
#[derive(Debug, Clone)]
pub struct Cut {
    pub inner: SharedPotential,
    pub b: f64,
}

impl RadialPotential for Cut {
    fn value(&self, r: f64) -> f64 {
        if r <= self.b {
            self.inner.value(r)
        } else {
            0.0
        }
    }
    fn range_hint(&self) -> f64 {
        self.b
    }
    fn breakpoints(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.inner.breakpoints().into_iter().filter(|&x| x < self.b).collect();
        v.push(self.b);
        v
    }
    fn r_times_value_at_origin(&self) -> f64 {
        self.inner.r_times_value_at_origin()
    }
}

/// Scaled copy c·V(r), used for coupling form factors.
#[derive(Debug, Clone)]
pub struct Scaled {
    pub inner: SharedPotential,
    pub factor: f64,
}

impl RadialPotential for Scaled {
    fn value(&self, r: f64) -> f64 {
        self.factor * self.inner.value(r)
    }
    fn range_hint(&self) -> f64 {
        self.inner.range_hint()
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.inner.breakpoints()
    }
    fn r_times_value_at_origin(&self) -> f64 {
        self.factor * self.inner.r_times_value_at_origin()
    }
}

/// Closure-backed potential.
pub struct FnPotential<F> {
    pub f: F,
    pub range: f64,
}

impl<F: Fn(f64) -> f64 + Send + Sync> RadialPotential for FnPotential<F> {
    fn value(&self, r: f64) -> f64 {
        (self.f)(r)
    }
    fn range_hint(&self) -> f64 {
        self.range
    }
}

/// Natural cubic spline through tabulated (r, V) points; zero beyond the last
/// point, constant below the first.
#[derive(Debug, Clone)]
pub struct Tabulated {
    r: Vec<f64>,
    v: Vec<f64>,
    m: Vec<f64>,
}

impl Tabulated {
    pub fn new(r: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if r.len() != v.len() || r.len() < 2 {
            return Err(HorseError::config("potential.file", "need at least two (r, V) rows"));
        }
        if r.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(HorseError::config("potential.file", "radii must be strictly increasing"));
        }
        let m = natural_spline_moments(&r, &v);
        Ok(Tabulated { r, v, m })
    }

    /// Reads whitespace-separated two-column text; `#` starts a comment.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut r = Vec::new();
        let mut v = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            let bad = || HorseError::config("potential.file", format!("line {}: expected two numbers", i + 1));
            if cols.len() != 2 {
                return Err(bad());
            }
            r.push(cols[0].parse::<f64>().map_err(|_| bad())?);
            v.push(cols[1].parse::<f64>().map_err(|_| bad())?);
        }
        Self::new(r, v)
    }
}

fn natural_spline_moments(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut m = vec![0.0; n];
    if n < 3 {
        return m;
    }
    // Thomas algorithm on the interior second-derivative system.
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        let h0 = x[i] - x[i - 1];
        let h1 = x[i + 1] - x[i];
        let a = h0 / 6.0;
        let b = (h0 + h1) / 3.0;
        let cc = h1 / 6.0;
        let rhs = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
        let denom = b - a * c[i - 1];
        c[i] = cc / denom;
        d[i] = (rhs - a * d[i - 1]) / denom;
    }
    for i in (1..n - 1).rev() {
        m[i] = d[i] - c[i] * m[i + 1];
    }
    m
}

impl RadialPotential for Tabulated {
    fn value(&self, r: f64) -> f64 {
        let n = self.r.len();
        if r > self.r[n - 1] {
            return 0.0;
        }
        if r <= self.r[0] {
            return self.v[0];
        }
        let i = self.r.partition_point(|&x| x <= r).clamp(1, n - 1) - 1;
        let h = self.r[i + 1] - self.r[i];
        let a = (self.r[i + 1] - r) / h;
        let b = (r - self.r[i]) / h;
        a * self.v[i] + b * self.v[i + 1] + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }
    fn range_hint(&self) -> f64 {
        *self.r.last().unwrap()
    }
    fn breakpoints(&self) -> Vec<f64> {
        vec![*self.r.last().unwrap()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cut_is_zero_outside_and_keeps_coulomb_inside() {
        let ws: SharedPotential = Arc::new(WoodsSaxon::nucleon_core(15.0));
        let full: SharedPotential = Arc::new(WithCoulomb {
            nuclear: ws.clone(),
            charge_product: 7.0,
        });
        let cut = Cut { inner: full, b: 7.0 };
        assert_eq!(cut.value(7.0 + 1e-12), 0.0);
        let eps = 1e-9;
        let tail = cut.value(7.0 - eps) - ws.value(7.0 - eps);
        assert!((tail - 7.0 * E_SQUARED / 7.0).abs() < 1e-8);
        assert_eq!(cut.r_times_value_at_origin(), 7.0 * E_SQUARED);
    }

    #[test]
    fn spin_orbit_factor() {
        let p32 = WoodsSaxon::nucleon_core(15.0).with_partial_wave(1, 1.5);
        let p12 = WoodsSaxon::nucleon_core(15.0).with_partial_wave(1, 0.5);
        assert_eq!(p32.ls, 0.5);
        assert_eq!(p12.ls, -1.0);
        // j = l + ½ is more attractive at the surface
        assert!(p32.value(p32.radius) < p12.value(p12.radius));
    }

    #[test]
    fn spline_reproduces_cubic_interior_and_zero_tail() {
        let r: Vec<f64> = (0..=40).map(|i| 0.25 * i as f64).collect();
        let v: Vec<f64> = r.iter().map(|x| (-x).exp() * 10.0).collect();
        let t = Tabulated::new(r, v).unwrap();
        for &x in &[1.1, 3.33, 7.9] {
            assert!((t.value(x) - 10.0 * (-x as f64).exp()).abs() < 2e-3);
        }
        assert_eq!(t.value(10.01), 0.0);
        for x in [0.0, 0.25, 5.0] {
            assert!((t.value(x) - 10.0 * (-x as f64).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(Tabulated::parse("1 2\n3 x\n").is_err());
        assert!(Tabulated::parse("# only\n1 2\n").is_err());
        let t = Tabulated::parse("0 -5\n1 -4 # comment\n2 -1\n").unwrap();
        assert_eq!(t.value(1.0), -4.0);
    }
}
