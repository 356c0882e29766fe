//! One function per `mode`; each returns the tables it produces.

use rayon::prelude::*;

use super::config::{Mode, RunConfig};
use super::table::{num, num_list, status_tag, Table};
use crate::basis::OscillatorBasis;
use crate::constants::reduced_mass;
use crate::coulomb::{estimate_nuclear_radius, find_plateau, plateau_scan, resonance_position, CoulombProblem, CoulombSolver};
use crate::error::{HorseError, Result};
use crate::hamiltonian::TruncatedHamiltonian;
use crate::multichannel::{
    eigenphases, multichannel_coulomb_s, s_matrix, Channel, CoupledCoulombProblem, CoupledHamiltonian, PotentialMatrix,
};
use crate::oracle::{phase_shift as oracle_phase, RadialProblem};
use crate::pmatrix::{find_poles, p_matrix_discrete, p_matrix_general, PValue};
use crate::single_channel::{coefficients, default_n_asym, unwrap_phases};

pub fn run(c: &RunConfig) -> Result<Vec<Table>> {
    Ok(match c.mode {
        Mode::Single => vec![single(c)?],
        Mode::Coulomb => vec![coulomb(c)?],
        Mode::Multichannel => vec![multichannel(c)?],
        Mode::PmatrixScan => vec![pmatrix_scan(c)?],
        Mode::PlateauScan => vec![plateau(c)?],
        Mode::OracleCompare => vec![oracle_compare(c)?],
    })
}

fn neutral_only(c: &RunConfig) -> Result<()> {
    if c.charge_product != 0.0 {
        return Err(HorseError::config(
            "coulomb.z1z2",
            format!("mode {} is for neutral channels; use mode = coulomb", c.mode.name()),
        ));
    }
    Ok(())
}

fn diagonalize(c: &RunConfig) -> Result<TruncatedHamiltonian> {
    TruncatedHamiltonian::diagonalize(c.basis()?, c.nuclear().as_ref(), c.n_trunc, c.smoothing)
}

/// Continuous phases over the successful rows; failed rows stay NaN.
fn continuous(deltas: &[f64]) -> Vec<f64> {
    let ok: Vec<f64> = deltas.iter().copied().filter(|d| d.is_finite()).collect();
    let mut un = unwrap_phases(&ok).into_iter();
    deltas.iter().map(|d| if d.is_finite() { un.next().unwrap() } else { f64::NAN }).collect()
}

fn fold(d: f64) -> f64 {
    crate::multichannel::fold_phase(d)
}

fn a2_columns(c: &RunConfig) -> Vec<String> {
    c.coefficients.iter().map(|n| format!("a2_{n}")).collect()
}

fn columns(base: &[&str], extra: &[String], tail: &[&str]) -> Vec<String> {
    base.iter().map(|s| s.to_string()).chain(extra.iter().cloned()).chain(tail.iter().map(|s| s.to_string())).collect()
}

fn table_with(name: &str, c: &RunConfig, cols: Vec<String>) -> Table {
    let mut t = Table::new(name, c.describe(), &[]);
    t.columns = cols;
    t
}

pub fn single(c: &RunConfig) -> Result<Table> {
    neutral_only(c)?;
    let h = diagonalize(c)?;
    let n_asym = c.coefficients.iter().map(|n| n + 1).max().unwrap_or(0).max(default_n_asym(c.n_trunc));
    let grid = c.energy.points();
    let res: Vec<_> = grid.par_iter().map(|&e| coefficients(&h, e, n_asym)).collect();
    let deltas: Vec<f64> = res.iter().map(|r| r.as_ref().map_or(f64::NAN, |s| s.delta)).collect();
    let cont = continuous(&deltas);
    let mut t = table_with(&c.output_name, c, columns(&["E", "k", "delta_rad", "delta_continuous"], &a2_columns(c), &["status"]));
    t.result("eigenvalues", num_list(h.eigenvalues.as_slice()));
    for (i, (&e, r)) in grid.iter().zip(&res).enumerate() {
        let mut row = vec![num(e)];
        match r {
            Ok(s) => {
                row.extend([num(s.k), num(s.delta), num(cont[i])]);
                row.extend(c.coefficients.iter().map(|&n| num(s.coefficients[n].powi(2))));
                row.push("ok".into());
            }
            Err(err) => {
                row.extend(std::iter::repeat_n("nan".to_string(), 3 + c.coefficients.len()));
                row.push(status_tag(err).into());
                t.failures += 1;
            }
        }
        t.push(row);
    }
    Ok(t)
}

/// The Coulomb solver with window violations reported against `coulomb.b`.
pub(crate) fn coulomb_solver(basis: OscillatorBasis, nuclear: crate::potential::SharedPotential, z: f64, b: f64, n: usize) -> Result<CoulombSolver> {
    CoulombProblem::new(nuclear, z, b, basis, n).solver().map_err(|e| match e {
        HorseError::RadiusWindow { b, lower, upper } => {
            HorseError::config("coulomb.b", format!("{b} fm outside the valid range [{lower:.3}, {upper:.3}) fm"))
        }
        other => other,
    })
}

pub fn coulomb(c: &RunConfig) -> Result<Table> {
    let basis = c.basis()?;
    let b = c.channel_radius()?;
    let solver = coulomb_solver(basis, c.nuclear(), c.charge_product, b, c.n_trunc)?;
    let n_asym = c.coefficients.iter().map(|n| n + 1).max().unwrap_or(0).max(default_n_asym(c.n_trunc));
    let grid = c.energy.points();
    let res: Vec<_> = grid.par_iter().map(|&e| solver.renormalize(e, n_asym)).collect();
    let deltas: Vec<f64> = res.iter().map(|r| r.as_ref().map_or(f64::NAN, |s| s.phase.delta)).collect();
    let cont = continuous(&deltas);
    let mut t = table_with(
        &c.output_name,
        c,
        columns(
            &["E", "k", "eta", "sigma", "delta_short", "delta_rad", "delta_continuous", "renormalization"],
            &a2_columns(c),
            &["status"],
        ),
    );
    t.result("b", num(b));
    let (lo, hi) = solver.problem.window();
    t.result("radius_window", format!("{} {}", num(lo), num(hi)));
    let ok: Vec<(f64, f64)> = grid.iter().zip(&cont).filter(|(_, d)| d.is_finite()).map(|(&e, &d)| (e, d)).collect();
    let (es, ds): (Vec<f64>, Vec<f64>) = ok.into_iter().unzip();
    if let Some((e, slope)) = resonance_position(&es, &ds) {
        t.result("resonance", format!("{} {}", num(e), num(slope)));
    }
    for (i, (&e, r)) in grid.iter().zip(&res).enumerate() {
        let mut row = vec![num(e)];
        match r {
            Ok(s) => {
                row.extend([
                    num(basis.momentum(e)?),
                    num(s.phase.eta),
                    num(s.phase.sigma),
                    num(s.phase.delta_short),
                    num(s.phase.delta),
                    num(cont[i]),
                    num(s.factor),
                ]);
                row.extend(c.coefficients.iter().map(|&n| num(s.coefficients[n].powi(2))));
                row.push("ok".into());
            }
            Err(err) => {
                row.extend(std::iter::repeat_n("nan".to_string(), 7 + c.coefficients.len()));
                row.push(status_tag(err).into());
                t.failures += 1;
            }
        }
        t.push(row);
    }
    Ok(t)
}

fn nearest_row(grid: &[f64], e: f64) -> usize {
    grid.iter()
        .enumerate()
        .min_by(|a, b| (a.1 - e).abs().total_cmp(&(b.1 - e).abs()))
        .map_or(0, |x| x.0)
}

pub fn pmatrix_scan(c: &RunConfig) -> Result<Table> {
    neutral_only(c)?;
    let h = diagonalize(c)?;
    let b = c.channel_radius()?;
    let grid = c.energy.points();
    let (lo, hi) = (c.energy.min, c.energy.max);
    let steps = (4 * c.energy.count).max(200);
    let exact_poles = find_poles(|e| p_matrix_general(&h, e, b), lo, hi, steps, 1e-9)?;
    let discrete_poles = find_poles(|e| p_matrix_discrete(&h, e).map(|d| PValue::finite(d.from_coefficients)), lo, hi, steps, 1e-9)?;
    let rows: Vec<_> = grid
        .par_iter()
        .map(|&e| Ok((p_matrix_general(&h, e, b)?, p_matrix_discrete(&h, e)?.from_coefficients)))
        .collect::<Vec<Result<_>>>();
    let mut flag_exact = vec![0u8; grid.len()];
    let mut flag_discrete = vec![0u8; grid.len()];
    for &p in &exact_poles {
        flag_exact[nearest_row(&grid, p)] = 1;
    }
    for &p in &discrete_poles {
        flag_discrete[nearest_row(&grid, p)] = 1;
    }
    let mut t = Table::new(&c.output_name, c.describe(), &["E", "P_exact", "P_discrete", "pole_exact", "pole_discrete", "status"]);
    t.result("b", num(b));
    t.result("natural_radius", num(c.basis()?.natural_channel_radius(c.n_trunc)));
    let eig: Vec<f64> = h.eigenvalues.iter().copied().filter(|&x| x >= lo && x <= hi).collect();
    t.result("eigenvalues", num_list(&eig));
    t.result("poles_exact", num_list(&exact_poles));
    t.result("poles_discrete", num_list(&discrete_poles));
    for (i, (&e, r)) in grid.iter().zip(&rows).enumerate() {
        match r {
            Ok((p, d)) => t.push(vec![
                num(e),
                num(p.p().unwrap_or(f64::INFINITY)),
                num(*d),
                flag_exact[i].to_string(),
                flag_discrete[i].to_string(),
                "ok".into(),
            ]),
            Err(err) => {
                t.failures += 1;
                t.push(vec![
                    num(e),
                    "nan".into(),
                    "nan".into(),
                    flag_exact[i].to_string(),
                    flag_discrete[i].to_string(),
                    status_tag(err).into(),
                ]);
            }
        }
    }
    Ok(t)
}

pub fn plateau(c: &RunConfig) -> Result<Table> {
    let basis = c.basis()?;
    let nuclear = c.nuclear();
    let template = CoulombProblem::new(nuclear.clone(), c.charge_product, c.scan_b_min, basis, c.n_trunc);
    let n = c.scan_count;
    let grid: Vec<f64> = (0..n).map(|i| c.scan_b_min + (c.scan_b_max - c.scan_b_min) * i as f64 / (n - 1) as f64).collect();
    let prob = RadialProblem::new(nuclear.as_ref(), c.l, basis.reduced_mass).with_charge(c.charge_product);
    let mut t = Table::new(&c.output_name, c.describe(), &["E", "b", "delta", "in_window"]);
    for &e in &c.scan_energies {
        let pts = plateau_scan(&template, e, &grid)?;
        let oracle = oracle_phase(&prob, e, None, None)?;
        t.result(format!("oracle_E{}", num(e)), num(oracle.delta));
        match find_plateau(&pts, 0.02) {
            Some(p) => t.result(
                format!("plateau_E{}", num(e)),
                format!("{} {} {} {}", num(p.b_lower), num(p.b_upper), num(p.mean), num(p.spread)),
            ),
            None => t.result(format!("plateau_E{}", num(e)), "none"),
        }
        for p in pts {
            t.push(vec![num(e), num(p.b), num(p.delta), (p.in_window as u8).to_string()]);
        }
    }
    Ok(t)
}

pub fn oracle_compare(c: &RunConfig) -> Result<Table> {
    let basis = c.basis()?;
    let nuclear = c.nuclear();
    let grid = c.energy.points();
    let horse: Vec<Result<f64>> = if c.charge_product != 0.0 {
        let solver = coulomb_solver(basis, nuclear.clone(), c.charge_product, c.channel_radius()?, c.n_trunc)?;
        grid.par_iter().map(|&e| solver.phase_shift(e).map(|p| p.delta)).collect()
    } else {
        let h = diagonalize(c)?;
        grid.par_iter().map(|&e| crate::single_channel::phase_shift(&h, e)).collect()
    };
    let prob = RadialProblem::new(nuclear.as_ref(), c.l, basis.reduced_mass).with_charge(c.charge_product);
    let oracle: Vec<_> = grid.par_iter().map(|&e| oracle_phase(&prob, e, None, None)).collect();
    let od: Vec<f64> = oracle.iter().map(|o| o.as_ref().map_or(f64::NAN, |o| o.delta)).collect();
    let cont = continuous(&od);
    let ok: Vec<(f64, f64)> = grid.iter().zip(&cont).filter(|(_, d)| d.is_finite()).map(|(&e, &d)| (e, d)).collect();
    let (es, ds): (Vec<f64>, Vec<f64>) = ok.into_iter().unzip();
    let resonance = resonance_position(&es, &ds).map(|r| r.0);
    let mut t = Table::new(&c.output_name, c.describe(), &["E", "delta_horse", "delta_oracle", "diff", "oracle_err_est", "status"]);
    let (mut max_all, mut max_out) = (0.0f64, 0.0f64);
    for ((&e, hz), o) in grid.iter().zip(&horse).zip(&oracle) {
        match (hz, o) {
            (Ok(d), Ok(o)) => {
                let diff = fold(d - o.delta);
                max_all = max_all.max(diff.abs());
                if resonance.is_none_or(|r| (e - r).abs() > c.resonance_window) {
                    max_out = max_out.max(diff.abs());
                }
                t.push(vec![num(e), num(*d), num(o.delta), num(diff), num(o.error_estimate), "ok".into()]);
            }
            (Err(err), _) | (_, Err(err)) => {
                t.failures += 1;
                t.push(vec![num(e), "nan".into(), "nan".into(), "nan".into(), "nan".into(), status_tag(err).into()]);
            }
        }
    }
    t.result("resonance", resonance.map_or("none".into(), num));
    t.result("max_abs_diff", num(max_all));
    t.result("max_abs_diff_outside_window", num(max_out));
    Ok(t)
}

/// Channels, potential matrix and radii of a multichannel run.
pub(crate) fn coupled_setup(c: &RunConfig) -> Result<(Vec<Channel>, PotentialMatrix, Vec<f64>)> {
    let mut channels = Vec::new();
    for (i, s) in c.channels.iter().enumerate() {
        let basis = OscillatorBasis::new(s.hbar_omega, reduced_mass(s.projectile_mass, s.target_mass), s.l)
            .map_err(|e| HorseError::config(format!("channel.{}", i + 1), e.to_string()))?;
        channels.push(Channel {
            basis,
            n_trunc: s.n_trunc,
            threshold: s.threshold,
            charge_product: s.charge_product,
        });
    }
    let mut v = PotentialMatrix::zeros(channels.len());
    for (i, j, spec) in &c.couplings {
        v.set(*i, *j, spec.build(channels[*i].l()));
    }
    let radii = c
        .channels
        .iter()
        .zip(&channels)
        .map(|(s, ch)| s.b.unwrap_or_else(|| ch.natural_radius()))
        .collect();
    Ok((channels, v, radii))
}

pub fn multichannel(c: &RunConfig) -> Result<Table> {
    let (channels, v, radii) = coupled_setup(c)?;
    let m = channels.len();
    let charged = channels.iter().any(|ch| ch.charge_product != 0.0);
    let h = if charged {
        let nuclear_radius = c
            .couplings
            .iter()
            .map(|(i, _, s)| estimate_nuclear_radius(s.build(channels[*i].l()).as_ref(), 0.01))
            .fold(0.0, f64::max);
        let p = CoupledCoulombProblem {
            channels: channels.clone(),
            nuclear: v,
            radii: radii.clone(),
        };
        p.check_radii(nuclear_radius).map_err(|e| HorseError::config("channel.N.b", e.to_string()))?;
        p.auxiliary_hamiltonian()?
    } else {
        CoupledHamiltonian::new(channels, &v)?
    };
    let grid = c.energy.points();
    let res: Vec<_> = grid
        .par_iter()
        .map(|&e| -> Result<_> {
            let s = if charged {
                multichannel_coulomb_s(&h, e, &radii)?.s
            } else {
                s_matrix(&h, e)?.s
            };
            let (ph, _) = eigenphases(&s)?;
            let n = s.nrows();
            let defect = (s.adjoint() * &s - nalgebra::DMatrix::identity(n, n)).norm();
            Ok((s, ph, defect))
        })
        .collect();
    let mut cols = vec!["E".to_string()];
    for i in 1..=m {
        for j in 1..=m {
            cols.push(format!("S{i}{j}_re"));
            cols.push(format!("S{i}{j}_im"));
        }
    }
    cols.extend((1..=m).map(|a| format!("eigenphase_{a}")));
    cols.push("unitarity_defect".into());
    cols.push("status".into());
    let width = cols.len();
    let mut t = table_with(&c.output_name, c, cols);
    t.result("radii", num_list(&radii));
    t.result("charged", charged.to_string());
    for (&e, r) in grid.iter().zip(&res) {
        let mut row = vec![num(e)];
        match r {
            Ok((s, ph, defect)) => {
                for i in 0..m {
                    for j in 0..m {
                        row.push(num(s[(i, j)].re));
                        row.push(num(s[(i, j)].im));
                    }
                }
                row.extend(ph.iter().map(|&x| num(x)));
                row.push(num(*defect));
                row.push("ok".into());
            }
            Err(err) => {
                row.extend(std::iter::repeat_n("nan".to_string(), width - 2));
                row.push(status_tag(err).into());
                if !matches!(err, HorseError::ClosedChannel { .. }) {
                    t.failures += 1;
                }
            }
        }
        t.push(row);
    }
    Ok(t)
}
