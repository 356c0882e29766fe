//! Line-oriented `key = value` configuration with `[section]` groups.
//!
//! ```text
//! mode = coulomb
//! [basis]
//! hbar_omega = 18
//! target_mass = 15
//! [potential]
//! kind = woods-saxon
//! [energy]
//! min = 0.5
//! max = 30
//! count = 120
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::basis::OscillatorBasis;
use crate::constants::reduced_mass;
use crate::error::{HorseError, Result};
use crate::potential::{SharedPotential, SquareWell, Tabulated, WoodsSaxon, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Single,
    Coulomb,
    Multichannel,
    PmatrixScan,
    PlateauScan,
    OracleCompare,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Single => "single",
            Mode::Coulomb => "coulomb",
            Mode::Multichannel => "multichannel",
            Mode::PmatrixScan => "pmatrix-scan",
            Mode::PlateauScan => "plateau-scan",
            Mode::OracleCompare => "oracle-compare",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [
            Mode::Single,
            Mode::Coulomb,
            Mode::Multichannel,
            Mode::PmatrixScan,
            Mode::PlateauScan,
            Mode::OracleCompare,
        ]
        .into_iter()
        .find(|m| m.name() == s)
    }
}

#[derive(Debug, Clone)]
pub enum PotentialSpec {
    Zero,
    SquareWell {
        depth: f64,
        radius: f64,
    },
    WoodsSaxon {
        depth: f64,
        radius: f64,
        diffuseness: f64,
        spin_orbit: f64,
        /// Total angular momentum; the spin-orbit term is off when absent.
        j: Option<f64>,
    },
    Tabulated {
        path: PathBuf,
        table: Tabulated,
    },
}

impl PotentialSpec {
    /// The potential for partial wave `l`.
    pub fn build(&self, l: usize) -> SharedPotential {
        match self {
            PotentialSpec::Zero => Arc::new(Zero),
            &PotentialSpec::SquareWell { depth, radius } => Arc::new(SquareWell { depth, radius }),
            &PotentialSpec::WoodsSaxon {
                depth,
                radius,
                diffuseness,
                spin_orbit,
                j,
            } => {
                let ws = WoodsSaxon {
                    depth,
                    radius,
                    diffuseness,
                    spin_orbit,
                    ls: 0.0,
                };
                Arc::new(match j {
                    Some(j) => ws.with_partial_wave(l, j),
                    None => ws,
                })
            }
            PotentialSpec::Tabulated { table, .. } => Arc::new(table.clone()),
        }
    }

    fn describe(&self, prefix: &str, out: &mut Vec<(String, String)>) {
        let mut put = |k: &str, v: String| out.push((format!("{prefix}.{k}"), v));
        match self {
            PotentialSpec::Zero => put("kind", "zero".into()),
            PotentialSpec::SquareWell { depth, radius } => {
                put("kind", "square-well".into());
                put("depth", depth.to_string());
                put("radius", radius.to_string());
            }
            PotentialSpec::WoodsSaxon {
                depth,
                radius,
                diffuseness,
                spin_orbit,
                j,
            } => {
                put("kind", "woods-saxon".into());
                put("depth", depth.to_string());
                put("radius", radius.to_string());
                put("diffuseness", diffuseness.to_string());
                put("spin_orbit", spin_orbit.to_string());
                put("j", j.map_or("none".into(), |j| j.to_string()));
            }
            PotentialSpec::Tabulated { path, .. } => {
                put("kind", "tabulated".into());
                put("file", path.display().to_string());
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub log: bool,
}

impl EnergyGrid {
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let span = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let t = i as f64 / span;
                if self.log {
                    self.min * (self.max / self.min).powf(t)
                } else {
                    self.min + (self.max - self.min) * t
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpec {
    pub l: usize,
    pub n_trunc: usize,
    pub threshold: f64,
    pub charge_product: f64,
    pub hbar_omega: f64,
    pub projectile_mass: f64,
    pub target_mass: f64,
    /// Channel radius; natural radius when absent.
    pub b: Option<f64>,
}

/// Validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mode: Mode,
    pub hbar_omega: f64,
    pub projectile_mass: f64,
    pub target_mass: f64,
    pub l: usize,
    pub n_trunc: usize,
    pub smoothing: bool,
    pub potential: PotentialSpec,
    pub charge_product: f64,
    /// Channel radius; natural radius (or 7 fm with charge) when absent.
    pub b: Option<f64>,
    pub energy: EnergyGrid,
    /// a_n² columns requested in single mode.
    pub coefficients: Vec<usize>,
    pub scan_b_min: f64,
    pub scan_b_max: f64,
    pub scan_count: usize,
    pub scan_energies: Vec<f64>,
    /// Half width of the resonance exclusion window (MeV).
    pub resonance_window: f64,
    pub channels: Vec<ChannelSpec>,
    /// Upper-triangle couplings (i ≤ j, zero-based).
    pub couplings: Vec<(usize, usize, PotentialSpec)>,
    pub output_name: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mode: Mode::Single,
            hbar_omega: 18.0,
            projectile_mass: 1.0,
            target_mass: 15.0,
            l: 0,
            n_trunc: 10,
            smoothing: false,
            potential: default_woods_saxon(15.0),
            charge_product: 0.0,
            b: None,
            energy: EnergyGrid {
                min: 0.5,
                max: 30.0,
                count: 120,
                log: false,
            },
            coefficients: Vec::new(),
            scan_b_min: 5.5,
            scan_b_max: 9.0,
            scan_count: 71,
            scan_energies: vec![2.0, 10.0],
            resonance_window: 0.5,
            channels: Vec::new(),
            couplings: Vec::new(),
            output_name: String::new(),
        }
    }
}

fn default_woods_saxon(a: f64) -> PotentialSpec {
    let ws = WoodsSaxon::nucleon_core(a);
    PotentialSpec::WoodsSaxon {
        depth: ws.depth,
        radius: ws.radius,
        diffuseness: ws.diffuseness,
        spin_orbit: ws.spin_orbit,
        j: None,
    }
}

impl RunConfig {
    pub fn reduced_mass(&self) -> f64 {
        reduced_mass(self.projectile_mass, self.target_mass)
    }

    pub fn basis(&self) -> Result<OscillatorBasis> {
        OscillatorBasis::new(self.hbar_omega, self.reduced_mass(), self.l)
    }

    pub fn nuclear(&self) -> SharedPotential {
        self.potential.build(self.l)
    }

    /// b as configured, else 7 fm with charge and the natural radius without.
    pub fn channel_radius(&self) -> Result<f64> {
        match self.b {
            Some(b) => Ok(b),
            None if self.charge_product != 0.0 => Ok(7.0),
            None => Ok(self.basis()?.natural_channel_radius(self.n_trunc)),
        }
    }

    /// Every resolved input as `key = value` pairs in a fixed order.
    pub fn describe(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = Vec::new();
        let mut put = |k: &str, v: String| out.push((k.to_string(), v));
        put("mode", self.mode.name().into());
        put("basis.hbar_omega", self.hbar_omega.to_string());
        put("basis.projectile_mass", self.projectile_mass.to_string());
        put("basis.target_mass", self.target_mass.to_string());
        put("basis.l", self.l.to_string());
        put("truncation.n", self.n_trunc.to_string());
        put("truncation.smoothing", self.smoothing.to_string());
        put("coulomb.z1z2", self.charge_product.to_string());
        put("coulomb.b", self.b.map_or("auto".into(), |b| b.to_string()));
        put("energy.min", self.energy.min.to_string());
        put("energy.max", self.energy.max.to_string());
        put("energy.count", self.energy.count.to_string());
        put("energy.log", self.energy.log.to_string());
        put(
            "output.coefficients",
            self.coefficients.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(","),
        );
        put("output.name", self.output_name.clone());
        put("scan.b_min", self.scan_b_min.to_string());
        put("scan.b_max", self.scan_b_max.to_string());
        put("scan.count", self.scan_count.to_string());
        put(
            "scan.energies",
            self.scan_energies.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(","),
        );
        put("compare.resonance_window", self.resonance_window.to_string());
        self.potential.describe("potential", &mut out);
        for (i, c) in self.channels.iter().enumerate() {
            let p = format!("channel.{}", i + 1);
            out.push((format!("{p}.l"), c.l.to_string()));
            out.push((format!("{p}.n"), c.n_trunc.to_string()));
            out.push((format!("{p}.threshold"), c.threshold.to_string()));
            out.push((format!("{p}.z1z2"), c.charge_product.to_string()));
            out.push((format!("{p}.hbar_omega"), c.hbar_omega.to_string()));
            out.push((format!("{p}.projectile_mass"), c.projectile_mass.to_string()));
            out.push((format!("{p}.target_mass"), c.target_mass.to_string()));
            out.push((format!("{p}.b"), c.b.map_or("auto".into(), |b| b.to_string())));
        }
        for (i, j, v) in &self.couplings {
            v.describe(&format!("coupling.{}.{}", i + 1, j + 1), &mut out);
        }
        out
    }
}

/// Raw sections: name → key → (value, line number).
type Sections = BTreeMap<String, BTreeMap<String, (String, usize)>>;

fn split_sections(text: &str) -> Result<Sections> {
    let mut out: Sections = BTreeMap::new();
    let mut current = String::new();
    out.insert(current.clone(), BTreeMap::new());
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| HorseError::config(format!("line {}", i + 1), "unterminated section header"))?;
            current = name.trim().to_string();
            out.entry(current.clone()).or_default();
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| HorseError::config(format!("line {}", i + 1), "expected `key = value`"))?;
        let key = k.trim().to_string();
        let prev = out.get_mut(&current).unwrap().insert(key.clone(), (v.trim().to_string(), i + 1));
        if prev.is_some() {
            return Err(HorseError::config(qualified(&current, &key), "duplicate key"));
        }
    }
    Ok(out)
}

fn qualified(section: &str, key: &str) -> String {
    if section.is_empty() {
        key.to_string()
    } else {
        format!("{section}.{key}")
    }
}

/// Typed access that remembers which keys were consumed.
struct Reader<'a> {
    sections: &'a Sections,
    used: BTreeSet<(String, String)>,
    base_dir: PathBuf,
}

impl<'a> Reader<'a> {
    fn raw(&mut self, section: &str, key: &str) -> Option<&'a str> {
        let v = self.sections.get(section)?.get(key)?;
        self.used.insert((section.to_string(), key.to_string()));
        Some(v.0.as_str())
    }

    fn f64(&mut self, section: &str, key: &str) -> Result<Option<f64>> {
        match self.raw(section, key) {
            None => Ok(None),
            Some(s) => s
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .map(Some)
                .ok_or_else(|| HorseError::config(qualified(section, key), format!("`{s}` is not a finite number"))),
        }
    }

    fn usize(&mut self, section: &str, key: &str) -> Result<Option<usize>> {
        match self.raw(section, key) {
            None => Ok(None),
            Some(s) => s
                .parse::<usize>()
                .map(Some)
                .map_err(|_| HorseError::config(qualified(section, key), format!("`{s}` is not a non-negative integer"))),
        }
    }

    fn bool(&mut self, section: &str, key: &str) -> Result<Option<bool>> {
        match self.raw(section, key) {
            None => Ok(None),
            Some("true" | "yes" | "1") => Ok(Some(true)),
            Some("false" | "no" | "0") => Ok(Some(false)),
            Some(s) => Err(HorseError::config(qualified(section, key), format!("`{s}` is not true/false"))),
        }
    }

    fn list<T: std::str::FromStr>(&mut self, section: &str, key: &str) -> Result<Option<Vec<T>>> {
        match self.raw(section, key) {
            None => Ok(None),
            Some(s) => s
                .split(',')
                .map(str::trim)
                .filter(|x| !x.is_empty())
                .map(|x| x.parse::<T>().map_err(|_| HorseError::config(qualified(section, key), format!("bad list entry `{x}`"))))
                .collect::<Result<Vec<T>>>()
                .map(Some),
        }
    }

    fn potential(&mut self, section: &str, target_mass: f64, default: PotentialSpec) -> Result<PotentialSpec> {
        let kind = match self.raw(section, "kind") {
            None if !self.sections.contains_key(section) => return Ok(default),
            None => "woods-saxon",
            Some(k) => k,
        };
        let field = |k: &str| qualified(section, k);
        match kind {
            "zero" => Ok(PotentialSpec::Zero),
            "square-well" => {
                let depth = self.f64(section, "depth")?.ok_or_else(|| HorseError::config(field("depth"), "required for a square well"))?;
                let radius = self.f64(section, "radius")?.ok_or_else(|| HorseError::config(field("radius"), "required for a square well"))?;
                positive(&field("radius"), radius)?;
                Ok(PotentialSpec::SquareWell { depth, radius })
            }
            "woods-saxon" => {
                let PotentialSpec::WoodsSaxon {
                    depth,
                    radius,
                    diffuseness,
                    spin_orbit,
                    ..
                } = default_woods_saxon(target_mass)
                else {
                    unreachable!()
                };
                let radius = self.f64(section, "radius")?.unwrap_or(radius);
                let diffuseness = self.f64(section, "diffuseness")?.unwrap_or(diffuseness);
                positive(&field("radius"), radius)?;
                positive(&field("diffuseness"), diffuseness)?;
                let j = self.f64(section, "j")?;
                if let Some(j) = j {
                    if j < 0.5 || (2.0 * j).fract() != 0.0 || (2.0 * j) as i64 % 2 == 0 {
                        return Err(HorseError::config(field("j"), "must be a positive half-integer"));
                    }
                }
                Ok(PotentialSpec::WoodsSaxon {
                    depth: self.f64(section, "depth")?.unwrap_or(depth),
                    radius,
                    diffuseness,
                    spin_orbit: self.f64(section, "spin_orbit")?.unwrap_or(spin_orbit),
                    j,
                })
            }
            "tabulated" => {
                let file = self.raw(section, "file").ok_or_else(|| HorseError::config(field("file"), "required for a tabulated potential"))?;
                let path = self.base_dir.join(file);
                let text = std::fs::read_to_string(&path).map_err(|e| HorseError::Io(format!("{}: {e}", path.display())))?;
                let table = Tabulated::parse(&text)?;
                Ok(PotentialSpec::Tabulated {
                    path: PathBuf::from(file),
                    table,
                })
            }
            other => Err(HorseError::config(
                field("kind"),
                format!("`{other}` is not one of zero, square-well, woods-saxon, tabulated"),
            )),
        }
    }
}

fn positive(field: &str, x: f64) -> Result<()> {
    if x > 0.0 {
        Ok(())
    } else {
        Err(HorseError::config(field, format!("{x} must be > 0")))
    }
}

fn bounded<T: PartialOrd + std::fmt::Display>(field: &str, x: T, lo: T, hi: T) -> Result<()> {
    if x >= lo && x <= hi {
        Ok(())
    } else {
        Err(HorseError::config(field, format!("{x} outside the valid range [{lo}, {hi}]")))
    }
}

const KNOWN_SECTIONS: [&str; 8] = ["", "basis", "potential", "truncation", "coulomb", "energy", "output", "scan"];

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HorseError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Parses and validates; relative file references resolve against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let sections = split_sections(text)?;
        let mut r = Reader {
            sections: &sections,
            used: BTreeSet::new(),
            base_dir: base_dir.to_path_buf(),
        };
        let mut c = RunConfig::default();
        if let Some(m) = r.raw("", "mode") {
            c.mode = Mode::parse(m).ok_or_else(|| {
                HorseError::config("mode", format!("`{m}` is not one of single, coulomb, multichannel, pmatrix-scan, plateau-scan, oracle-compare"))
            })?;
        }
        if let Some(x) = r.f64("basis", "hbar_omega")? {
            c.hbar_omega = x;
        }
        if let Some(x) = r.f64("basis", "projectile_mass")? {
            c.projectile_mass = x;
        }
        if let Some(x) = r.f64("basis", "target_mass")? {
            c.target_mass = x;
        }
        if let Some(x) = r.usize("basis", "l")? {
            c.l = x;
        }
        bounded("basis.hbar_omega", c.hbar_omega, 1e-3, 1e4)?;
        positive("basis.projectile_mass", c.projectile_mass)?;
        positive("basis.target_mass", c.target_mass)?;
        bounded("basis.l", c.l, 0, 20)?;
        c.potential = r.potential("potential", c.target_mass, default_woods_saxon(c.target_mass))?;
        if let Some(x) = r.usize("truncation", "n")? {
            c.n_trunc = x;
        }
        bounded("truncation.n", c.n_trunc, 0, 400)?;
        if let Some(x) = r.bool("truncation", "smoothing")? {
            c.smoothing = x;
        }
        if let Some(x) = r.f64("coulomb", "z1z2")? {
            c.charge_product = x;
        }
        bounded("coulomb.z1z2", c.charge_product, 0.0, 2000.0)?;
        c.b = r.f64("coulomb", "b")?;
        if let Some(b) = c.b {
            positive("coulomb.b", b)?;
        }
        if let Some(x) = r.f64("energy", "min")? {
            c.energy.min = x;
        }
        if let Some(x) = r.f64("energy", "max")? {
            c.energy.max = x;
        }
        if let Some(x) = r.usize("energy", "count")? {
            c.energy.count = x;
        }
        if let Some(x) = r.bool("energy", "log")? {
            c.energy.log = x;
        }
        positive("energy.min", c.energy.min)?;
        if c.energy.max < c.energy.min {
            return Err(HorseError::config("energy.max", format!("{} must be ≥ energy.min = {}", c.energy.max, c.energy.min)));
        }
        bounded("energy.count", c.energy.count, 1, 1_000_000)?;
        if let Some(v) = r.list::<usize>("output", "coefficients")? {
            c.coefficients = v;
        }
        if let Some(n) = r.raw("output", "name") {
            if n.is_empty() || n.contains(['/', '\\']) {
                return Err(HorseError::config("output.name", "must be a plain file stem"));
            }
            c.output_name = n.to_string();
        }
        if let Some(x) = r.f64("scan", "b_min")? {
            c.scan_b_min = x;
        }
        if let Some(x) = r.f64("scan", "b_max")? {
            c.scan_b_max = x;
        }
        if let Some(x) = r.usize("scan", "count")? {
            c.scan_count = x;
        }
        if let Some(v) = r.list::<f64>("scan", "energies")? {
            c.scan_energies = v;
        }
        if let Some(x) = r.f64("scan", "resonance_window")? {
            c.resonance_window = x;
        }
        positive("scan.b_min", c.scan_b_min)?;
        if c.scan_b_max <= c.scan_b_min {
            return Err(HorseError::config("scan.b_max", format!("{} must exceed scan.b_min = {}", c.scan_b_max, c.scan_b_min)));
        }
        bounded("scan.count", c.scan_count, 2, 100_000)?;
        for &e in &c.scan_energies {
            positive("scan.energies", e)?;
        }

        // channels: [channel.1], [channel.2], ...
        let mut idx = 1;
        while sections.contains_key(&format!("channel.{idx}")) {
            let s = format!("channel.{idx}");
            let ch = ChannelSpec {
                l: r.usize(&s, "l")?.unwrap_or(0),
                n_trunc: r.usize(&s, "n")?.unwrap_or(c.n_trunc),
                threshold: r.f64(&s, "threshold")?.unwrap_or(0.0),
                charge_product: r.f64(&s, "z1z2")?.unwrap_or(c.charge_product),
                hbar_omega: r.f64(&s, "hbar_omega")?.unwrap_or(c.hbar_omega),
                projectile_mass: r.f64(&s, "projectile_mass")?.unwrap_or(c.projectile_mass),
                target_mass: r.f64(&s, "target_mass")?.unwrap_or(c.target_mass),
                b: r.f64(&s, "b")?,
            };
            bounded(&format!("{s}.l"), ch.l, 0, 20)?;
            bounded(&format!("{s}.n"), ch.n_trunc, 0, 400)?;
            bounded(&format!("{s}.hbar_omega"), ch.hbar_omega, 1e-3, 1e4)?;
            bounded(&format!("{s}.z1z2"), ch.charge_product, 0.0, 2000.0)?;
            positive(&format!("{s}.projectile_mass"), ch.projectile_mass)?;
            positive(&format!("{s}.target_mass"), ch.target_mass)?;
            if let Some(b) = ch.b {
                positive(&format!("{s}.b"), b)?;
            }
            c.channels.push(ch);
            idx += 1;
        }
        let m = c.channels.len();
        for name in sections.keys() {
            if let Some(rest) = name.strip_prefix("coupling.") {
                let bad = || HorseError::config(name.clone(), format!("expected [coupling.i.j] with 1 ≤ i ≤ j ≤ {m}"));
                let (a, b) = rest.split_once('.').ok_or_else(bad)?;
                let (i, j) = (a.parse::<usize>().map_err(|_| bad())?, b.parse::<usize>().map_err(|_| bad())?);
                if i == 0 || j == 0 || i > j || j > m {
                    return Err(bad());
                }
                let tm = c.channels[i - 1].target_mass;
                let v = r.potential(name, tm, PotentialSpec::Zero)?;
                c.couplings.push((i - 1, j - 1, v));
            } else if !KNOWN_SECTIONS.contains(&name.as_str()) && !name.starts_with("channel.") {
                return Err(HorseError::config(format!("[{name}]"), "unknown section"));
            }
        }
        c.couplings.sort_by_key(|x| (x.0, x.1));
        if c.mode == Mode::Multichannel && m == 0 {
            return Err(HorseError::config("channel.1", "multichannel mode needs at least one [channel.N] section"));
        }
        for (s, keys) in &sections {
            for k in keys.keys() {
                if !r.used.contains(&(s.clone(), k.clone())) {
                    return Err(HorseError::config(qualified(s, k), "unknown key"));
                }
            }
        }
        if c.output_name.is_empty() {
            c.output_name = c.mode.name().to_string();
        }
        Ok(c)
    }
}
