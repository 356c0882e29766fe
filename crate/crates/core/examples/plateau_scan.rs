//! δ₀ as a function of the channel radius b: a flat stretch inside the
//! admissible window signals a trustworthy cut.

use std::sync::Arc;

use horse::basis::OscillatorBasis;
use horse::constants::reduced_mass;
use horse::coulomb::{find_plateau, plateau_scan, CoulombProblem};
use horse::potential::WoodsSaxon;

fn main() -> horse::Result<()> {
    let basis = OscillatorBasis::new(18.0, reduced_mass(1.0, 15.0), 0)?;
    let template = CoulombProblem::new(Arc::new(WoodsSaxon::nucleon_core(15.0)), 7.0, 5.5, basis, 9);
    let grid: Vec<f64> = (0..=70).map(|i| 5.5 + 0.05 * i as f64).collect();
    for e in [2.0, 10.0] {
        let pts = plateau_scan(&template, e, &grid)?;
        for p in pts.iter().step_by(10) {
            println!("E={e:4.1} b={:.2} δ={:.4} {}", p.b, p.delta, if p.in_window { "" } else { "(outside window)" });
        }
        match find_plateau(&pts, 0.02) {
            Some(p) => println!("plateau [{:.2}, {:.2}] fm, δ = {:.4}", p.b_lower, p.b_upper, p.mean),
            None => println!("no plateau"),
        }
    }
    Ok(())
}
