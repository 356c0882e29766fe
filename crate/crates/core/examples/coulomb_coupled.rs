//! Charged coupled channels: the Coulomb-corrected S-matrix through the
//! auxiliary P-matrix and through the auxiliary S-matrix, and the
//! renormalization matrix linking interior and exterior waves.

use std::sync::Arc;

use horse::basis::OscillatorBasis;
use horse::constants::reduced_mass;
use horse::multichannel::{multichannel_coulomb_s, Channel, CoupledCoulombProblem, PotentialMatrix};
use horse::potential::SquareWell;

fn main() -> horse::Result<()> {
    let basis = OscillatorBasis::new(18.0, reduced_mass(1.0, 15.0), 0)?;
    let ch = |threshold| Channel {
        basis,
        n_trunc: 10,
        threshold,
        charge_product: 7.0,
    };
    let mut v = PotentialMatrix::zeros(2);
    v.set(0, 0, Arc::new(SquareWell { depth: -20.0, radius: 3.0 }));
    v.set(1, 1, Arc::new(SquareWell { depth: -15.0, radius: 3.0 }));
    v.set(0, 1, Arc::new(SquareWell { depth: -5.0, radius: 3.0 }));
    let problem = CoupledCoulombProblem {
        channels: vec![ch(0.0), ch(2.0)],
        nuclear: v,
        radii: vec![6.0, 6.0],
    };
    problem.check_radii(3.0)?;
    let h = problem.auxiliary_hamiltonian()?;
    for e in [4.0, 10.0, 20.0] {
        let sol = multichannel_coulomb_s(&h, e, &problem.radii)?;
        println!(
            "E={e:4.1} |S−S'|={:.1e} |S12|={:.4} |𝒩12|={:.4}",
            (&sol.s - &sol.s_from_short).norm(),
            sol.s[(0, 1)].norm(),
            sol.renormalization[(0, 1)].norm()
        );
    }
    Ok(())
}
