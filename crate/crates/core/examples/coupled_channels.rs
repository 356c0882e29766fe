//! Two s-wave channels coupled by square wells: S-matrix, eigenphases, and
//! the symmetry of the real P-matrix.

use std::sync::Arc;

use horse::basis::OscillatorBasis;
use horse::constants::reduced_mass;
use horse::multichannel::{eigenphases, natural_radii, p_matrix, p_symmetry_defect, s_matrix, Channel, CoupledHamiltonian, PotentialMatrix};
use horse::potential::SquareWell;

fn main() -> horse::Result<()> {
    let basis = OscillatorBasis::new(18.0, reduced_mass(1.0, 15.0), 0)?;
    let ch = |threshold| Channel {
        basis,
        n_trunc: 20,
        threshold,
        charge_product: 0.0,
    };
    let mut v = PotentialMatrix::zeros(2);
    v.set(0, 0, Arc::new(SquareWell { depth: -20.0, radius: 3.0 }));
    v.set(1, 1, Arc::new(SquareWell { depth: -15.0, radius: 3.0 }));
    v.set(0, 1, Arc::new(SquareWell { depth: -5.0, radius: 3.0 }));
    let channels = vec![ch(0.0), ch(2.0)];
    let h = CoupledHamiltonian::new(channels.clone(), &v)?;
    let radii = natural_radii(&channels);
    for e in [3.0, 8.0, 15.0, 25.0] {
        let s = s_matrix(&h, e)?;
        let (ph, _) = eigenphases(&s.s)?;
        let p = p_matrix(&h, e, &radii)?;
        println!(
            "E={e:4.1} |S12|²={:.4} eigenphases={ph:.4?} unitarity={:.1e} P-symmetry={:.1e}",
            s.s[(0, 1)].norm_sqr(),
            s.unitarity_defect(),
            p_symmetry_defect(&channels, &p, &radii)
        );
    }
    Ok(())
}
