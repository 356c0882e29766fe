//! A potential read from a two-column (r, V) table: cubic interpolation,
//! zero beyond the last point. Tabulating the default Woods–Saxon reproduces
//! its phase shifts.

use horse::basis::OscillatorBasis;
use horse::constants::reduced_mass;
use horse::hamiltonian::TruncatedHamiltonian;
use horse::potential::{RadialPotential, Tabulated, WoodsSaxon};
use horse::single_channel::phase_shift;

fn main() -> horse::Result<()> {
    let ws = WoodsSaxon::nucleon_core(15.0);
    let text: String = (0..=300).map(|i| {
        let r = 0.05 * i as f64;
        format!("{r} {}\n", ws.value(r))
    }).collect();
    let table = Tabulated::parse(&text)?;
    let basis = OscillatorBasis::new(18.0, reduced_mass(1.0, 15.0), 0)?;
    let a = TruncatedHamiltonian::diagonalize(basis, &ws, 12, false)?;
    let b = TruncatedHamiltonian::diagonalize(basis, &table, 12, false)?;
    for e in [1.0, 5.0, 15.0, 30.0] {
        println!("E={e:4.1} δ analytic {:.6}  tabulated {:.6}", phase_shift(&a, e)?, phase_shift(&b, e)?);
    }
    Ok(())
}
