//! p + ¹⁵N s-wave phase shifts with the Coulomb tail handled through a cut
//! auxiliary potential, against a Coulomb-matched Numerov integration.

use std::sync::Arc;

use horse::basis::OscillatorBasis;
use horse::constants::reduced_mass;
use horse::coulomb::CoulombProblem;
use horse::multichannel::fold_phase;
use horse::oracle::{phase_shift, RadialProblem};
use horse::potential::WoodsSaxon;

fn main() -> horse::Result<()> {
    let basis = OscillatorBasis::new(18.0, reduced_mass(1.0, 15.0), 0)?;
    let ws = WoodsSaxon::nucleon_core(15.0);
    let oracle = RadialProblem::new(&ws, 0, basis.reduced_mass).with_charge(7.0);
    let solvers: Vec<_> = [10, 20, 40]
        .iter()
        .map(|&n| CoulombProblem::new(Arc::new(ws), 7.0, 7.0, basis, n).solver())
        .collect::<horse::Result<_>>()?;
    println!("   E     oracle   Δ(N=10)  Δ(N=20)  Δ(N=40)");
    for e in [0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 30.0] {
        let o = phase_shift(&oracle, e, None, None)?.delta;
        print!("{e:5.1}  {o:8.4}");
        for s in &solvers {
            print!("  {:7.4}", fold_phase(s.phase_shift(e)?.delta - o));
        }
        println!();
    }
    Ok(())
}
