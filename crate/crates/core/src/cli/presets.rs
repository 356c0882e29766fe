//! Built-in figure batteries. Every preset starts from the run configuration
//! (ħω, masses, potential, channel radius) and fixes its own grids.

use rayon::prelude::*;

use super::config::{PotentialSpec, RunConfig};
use super::modes::coulomb_solver;
use super::table::{num, num_list, Table};
use crate::basis::OscillatorBasis;
use crate::coulomb::{find_plateau, plateau_scan, resonance_position, CoulombProblem};
use crate::error::{HorseError, Result};
use crate::hamiltonian::TruncatedHamiltonian;
use crate::oracle::{normalized_wave, overlap_coefficient, phase_shift as oracle_phase, RadialProblem};
use crate::pmatrix::{find_poles, p_matrix_discrete, p_matrix_general, solve_channel_radius_near};
use crate::single_channel::unwrap_phases;

pub const PRESETS: [&str; 8] = ["fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8"];

pub fn run_preset(name: &str, base: &RunConfig) -> Result<Vec<Table>> {
    let t = match name {
        "fig1" => fig1(base)?,
        "fig2" => fig2(base)?,
        "fig3" => fig3(base)?,
        "fig4" => coulomb_phases(base, "fig4", 0)?,
        "fig5" => coefficients(base, "fig5", 0)?,
        "fig6" => fig6(base)?,
        "fig7" | "fig8" => {
            let l = if name == "fig7" { 1 } else { 2 };
            let mut a = coulomb_phases(base, name, l)?;
            let mut b = coefficients(base, name, l)?;
            a.name = format!("{name}_phases");
            b.name = format!("{name}_coefficients");
            return Ok(vec![a, b]);
        }
        other => return Err(HorseError::config("--preset", format!("`{other}` is not one of {}", PRESETS.join(", ")))),
    };
    Ok(vec![t])
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn inputs(base: &RunConfig, preset: &str, extra: &[(&str, String)]) -> Vec<(String, String)> {
    let mut v = vec![("preset".to_string(), preset.to_string())];
    v.extend(base.describe().into_iter().filter(|(k, _)| {
        k.starts_with("basis.") || k.starts_with("potential.") || k.starts_with("coulomb.") || k == "truncation.smoothing"
    }));
    v.extend(extra.iter().map(|(k, x)| (format!("{preset}.{k}"), x.clone())));
    v
}

fn charge(base: &RunConfig) -> f64 {
    if base.charge_product != 0.0 {
        base.charge_product
    } else {
        7.0
    }
}

fn radius(base: &RunConfig) -> f64 {
    base.b.unwrap_or(7.0)
}

/// The configured potential with the spin-orbit term set for j = l + 1/2.
fn partial_wave(base: &RunConfig, l: usize) -> RunConfig {
    let mut c = base.clone();
    c.l = l;
    if let PotentialSpec::WoodsSaxon { j, .. } = &mut c.potential {
        if j.is_none() && l > 0 {
            *j = Some(l as f64 + 0.5);
        }
    }
    c
}

fn corr(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    sxy / (sxx * syy).sqrt()
}

/// (b₀ − b)/b with b the free-particle root nearest b₀.
fn fig1(base: &RunConfig) -> Result<Table> {
    let energies = linspace(1.0, 30.0, 59);
    let ls = [0usize, 1, 4];
    let ns = [0usize, 1, 2, 5, 10];
    let mut cols = vec!["E".to_string()];
    for &l in &ls {
        for &n in &ns {
            cols.push(format!("dev_l{l}_N{n}"));
        }
    }
    let mut t = Table::new("fig1", inputs(base, "fig1", &[("l", "0 1 4".into()), ("N", "0 1 2 5 10".into())]), &[]);
    t.columns = cols;
    let mut curves = Vec::new();
    for &l in &ls {
        let basis = OscillatorBasis::new(base.hbar_omega, base.reduced_mass(), l)?;
        for &n in &ns {
            let b0 = basis.natural_channel_radius(n);
            let c: Vec<f64> = energies
                .par_iter()
                .map(|&e| solve_channel_radius_near(&basis, n, e, b0).map(|r| (b0 - r.b) / r.b))
                .collect::<Result<_>>()?;
            curves.push(c);
        }
    }
    let n0 = &curves[0];
    t.result("max_abs_dev_l0_N0", num(n0.iter().fold(0.0f64, |a, b| a.max(b.abs()))));
    t.result("correlation_l0_N0", num(corr(&energies, n0)));
    for (i, &e) in energies.iter().enumerate() {
        let mut row = vec![num(e)];
        row.extend(curves.iter().map(|c| num(c[i])));
        t.push(row);
    }
    Ok(t)
}

/// Exact P at b₀ against the discrete analogue for N ∈ {1, 9}.
fn fig2(base: &RunConfig) -> Result<Table> {
    let c = partial_wave(base, 0);
    let basis = c.basis()?;
    let energies = linspace(0.5, 30.0, 296);
    let mut t = Table::new("fig2", inputs(&c, "fig2", &[("N", "1 9".into())]), &["E", "P_exact_N1", "P_discrete_N1", "P_exact_N9", "P_discrete_N9"]);
    let mut cols = Vec::new();
    for n in [1usize, 9] {
        let h = TruncatedHamiltonian::diagonalize(basis, c.nuclear().as_ref(), n, c.smoothing)?;
        let b0 = basis.natural_channel_radius(n);
        let exact: Vec<f64> = energies
            .par_iter()
            .map(|&e| match p_matrix_general(&h, e, b0) {
                Ok(p) => p.p().unwrap_or(f64::INFINITY),
                Err(_) => f64::NAN,
            })
            .collect();
        let discrete: Vec<f64> = energies
            .par_iter()
            .map(|&e| p_matrix_discrete(&h, e).map_or(f64::NAN, |d| d.from_coefficients))
            .collect();
        let poles = find_poles(|e| p_matrix_general(&h, e, b0), 0.5, 30.0, 600, 1e-9)?;
        let eig: Vec<f64> = h.eigenvalues.iter().copied().filter(|&x| x > 0.5 && x < 30.0).collect();
        t.result(format!("b0_N{n}"), num(b0));
        t.result(format!("eigenvalues_N{n}"), num_list(&eig));
        t.result(format!("poles_exact_N{n}"), num_list(&poles));
        cols.push(exact);
        cols.push(discrete);
    }
    for (i, &e) in energies.iter().enumerate() {
        let mut row = vec![num(e)];
        row.extend(cols.iter().map(|c| num(c[i])));
        t.push(row);
    }
    Ok(t)
}

/// δ₀(b) at E ∈ {2, 10} MeV for N ∈ {4, 9}.
fn fig3(base: &RunConfig) -> Result<Table> {
    let c = partial_wave(base, 0);
    let basis = c.basis()?;
    let z = charge(&c);
    let grid = linspace(5.5, 9.0, 71);
    let energies = [2.0, 10.0];
    let ns = [4usize, 9];
    let mut t = Table::new("fig3", inputs(&c, "fig3", &[("E", "2 10".into()), ("N", "4 9".into()), ("z1z2", num(z))]), &[]);
    t.columns = vec!["b".to_string()];
    let prob_pot = c.nuclear();
    let prob = RadialProblem::new(prob_pot.as_ref(), 0, basis.reduced_mass).with_charge(z);
    let mut curves = Vec::new();
    for &e in &energies {
        t.result(format!("oracle_E{}", num(e)), num(oracle_phase(&prob, e, None, None)?.delta));
        for &n in &ns {
            let template = CoulombProblem::new(c.nuclear(), z, grid[0], basis, n);
            let pts = plateau_scan(&template, e, &grid)?;
            if let Some(p) = find_plateau(&pts, 0.02) {
                t.result(
                    format!("plateau_E{}_N{n}", num(e)),
                    format!("{} {} {}", num(p.b_lower), num(p.b_upper), num(p.mean)),
                );
            }
            t.columns.push(format!("delta_E{}_N{n}", num(e)));
            curves.push(pts.into_iter().map(|p| p.delta).collect::<Vec<_>>());
        }
    }
    for (i, &b) in grid.iter().enumerate() {
        let mut row = vec![num(b)];
        row.extend(curves.iter().map(|c| num(c[i])));
        t.push(row);
    }
    Ok(t)
}

/// Coulomb-corrected phase shifts for N ∈ {6, 8, 10} and the oracle.
fn coulomb_phases(base: &RunConfig, name: &str, l: usize) -> Result<Table> {
    let c = partial_wave(base, l);
    let basis = c.basis()?;
    let (z, b) = (charge(&c), radius(&c));
    let energies = linspace(0.5, 30.0, 120);
    let ns = [6usize, 8, 10];
    let mut t = Table::new(name, inputs(&c, name, &[("l", l.to_string()), ("N", "6 8 10".into()), ("b", num(b)), ("z1z2", num(z))]), &[]);
    t.columns = vec!["E".into()];
    let mut curves = Vec::new();
    for &n in &ns {
        let s = coulomb_solver(basis, c.nuclear(), z, b, n)?;
        let d: Vec<f64> = energies.par_iter().map(|&e| s.phase_shift(e).map(|p| p.delta)).collect::<Result<_>>()?;
        let d = unwrap_phases(&d);
        if let Some((e, _)) = resonance_position(&energies, &d) {
            t.result(format!("resonance_N{n}"), num(e));
        }
        t.columns.push(format!("delta_N{n}"));
        curves.push(d);
    }
    let pot = c.nuclear();
    let prob = RadialProblem::new(pot.as_ref(), l, basis.reduced_mass).with_charge(z);
    let o: Vec<f64> = energies.par_iter().map(|&e| oracle_phase(&prob, e, None, None).map(|p| p.delta)).collect::<Result<_>>()?;
    let o = unwrap_phases(&o);
    if let Some((e, _)) = resonance_position(&energies, &o) {
        t.result("resonance_oracle", num(e));
    }
    t.columns.push("delta_oracle".into());
    curves.push(o);
    for (i, &e) in energies.iter().enumerate() {
        let mut row = vec![num(e)];
        row.extend(curves.iter().map(|c| num(c[i])));
        t.push(row);
    }
    Ok(t)
}

/// a_n², n ∈ {0, 1, 2}, at N = 10 against the overlap oracle.
fn coefficients(base: &RunConfig, name: &str, l: usize) -> Result<Table> {
    let c = partial_wave(base, l);
    let basis = c.basis()?;
    let (z, b, n) = (charge(&c), radius(&c), 10usize);
    let energies = linspace(1.0, 30.0, 59);
    let s = coulomb_solver(basis, c.nuclear(), z, b, n)?;
    let pot = c.nuclear();
    let prob = RadialProblem::new(pot.as_ref(), l, basis.reduced_mass).with_charge(z);
    let rows: Vec<Vec<f64>> = energies
        .par_iter()
        .map(|&e| -> Result<Vec<f64>> {
            let ren = s.renormalize(e, n + 1)?;
            let (w, _) = normalized_wave(&prob, e, basis.classical_turning_point(2) + 10.0 * basis.r0, None)?;
            let mut row = vec![e];
            row.extend((0..3).map(|m| ren.coefficients[m].powi(2)));
            row.extend((0..3).map(|m| overlap_coefficient(&w, |r| basis.radial_function(m, r)).powi(2)));
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new(
        name,
        inputs(&c, name, &[("l", l.to_string()), ("N", n.to_string()), ("b", num(b)), ("z1z2", num(z))]),
        &["E", "a2_0", "a2_1", "a2_2", "a2_0_oracle", "a2_1_oracle", "a2_2_oracle"],
    );
    for r in rows {
        t.push(r.into_iter().map(num).collect());
    }
    Ok(t)
}

/// ũ(r) at E ∈ {3, 15} MeV: oracle, M = N = 10 and M = 100.
fn fig6(base: &RunConfig) -> Result<Table> {
    let c = partial_wave(base, 0);
    let basis = c.basis()?;
    let (z, b, n) = (charge(&c), radius(&c), 10usize);
    let s = coulomb_solver(basis, c.nuclear(), z, b, n)?;
    let pot = c.nuclear();
    let prob = RadialProblem::new(pot.as_ref(), 0, basis.reduced_mass).with_charge(z);
    let grid = linspace(0.0, 10.0, 201);
    let mut t = Table::new(
        "fig6",
        inputs(&c, "fig6", &[("N", n.to_string()), ("M", "10 100".into()), ("b", num(b)), ("z1z2", num(z))]),
        &["r", "u_exact_E3", "u_MN_E3", "u_M100_E3", "u_exact_E15", "u_MN_E15", "u_M100_E15"],
    );
    let mut cols = Vec::new();
    for e in [3.0, 15.0] {
        let (w, _) = normalized_wave(&prob, e, 12.0, None)?;
        let exact: Vec<f64> = grid
            .iter()
            .map(|&r| if r == 0.0 { Ok(0.0) } else { w.value_and_derivative(r).map(|v| v.1) })
            .collect::<Result<_>>()?;
        let peak = exact.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        let mn = s.wave_function(e, &grid, n)?;
        let m100 = s.wave_function(e, &grid, 100)?;
        let dev = |u: &[f64]| u.iter().zip(&exact).map(|(a, x)| (a - x).abs()).fold(0.0, f64::max) / peak;
        t.result(format!("dev_MN_E{}", num(e)), num(dev(&mn)));
        t.result(format!("dev_M100_E{}", num(e)), num(dev(&m100)));
        cols.extend([exact, mn, m100]);
    }
    for (i, &r) in grid.iter().enumerate() {
        let mut row = vec![num(r)];
        row.extend(cols.iter().map(|c| num(c[i])));
        t.push(row);
    }
    Ok(t)
}

