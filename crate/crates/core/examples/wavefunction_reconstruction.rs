//! Radial wave function rebuilt from oscillator coefficients: truncating the
//! sum at M = N leaves a visible error, adding asymptotic terms removes it.

use std::sync::Arc;

use horse::basis::OscillatorBasis;
use horse::constants::reduced_mass;
use horse::coulomb::CoulombProblem;
use horse::oracle::{normalized_wave, RadialProblem};
use horse::potential::WoodsSaxon;

fn main() -> horse::Result<()> {
    let basis = OscillatorBasis::new(18.0, reduced_mass(1.0, 15.0), 0)?;
    let ws = WoodsSaxon::nucleon_core(15.0);
    let solver = CoulombProblem::new(Arc::new(ws), 7.0, 7.0, basis, 10).solver()?;
    let oracle = RadialProblem::new(&ws, 0, basis.reduced_mass).with_charge(7.0);
    let grid: Vec<f64> = (1..=100).map(|i| 0.1 * i as f64).collect();
    for e in [3.0, 15.0] {
        let (w, _) = normalized_wave(&oracle, e, 12.0, None)?;
        let exact: Vec<f64> = grid.iter().map(|&r| w.value_and_derivative(r).unwrap().1).collect();
        let peak = exact.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        for m in [10, 30, 100] {
            let u = solver.wave_function(e, &grid, m)?;
            let dev = u.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            println!("E={e:4.1} M={m:3}: max|ũ−u|/peak = {:.3}", dev / peak);
        }
    }
    Ok(())
}
