//! Free motion in the oscillator basis: the Casoratian of the regular and
//! irregular solutions is constant and V = 0 gives a vanishing phase shift.

use horse::basis::OscillatorBasis;
use horse::constants::reduced_mass;
use horse::hamiltonian::TruncatedHamiltonian;
use horse::potential::Zero;
use horse::single_channel::phase_shift;

fn main() -> horse::Result<()> {
    let mu = reduced_mass(1.0, 15.0);
    for l in [0, 2, 4] {
        let basis = OscillatorBasis::new(18.0, mu, l)?;
        let k = 0.8;
        let sol = basis.asymptotic_solutions(300, k)?;
        let target = basis.casoratian_constant();
        let worst = (0..300)
            .map(|n| (basis.kinetic_offdiagonal(n) * sol.casoratian(n) / target - 1.0).abs())
            .fold(0.0, f64::max);
        let h = TruncatedHamiltonian::diagonalize(basis, &Zero, 12, false)?;
        let d = [1.0, 10.0, 40.0].map(|e| phase_shift(&h, e).unwrap().abs()).into_iter().fold(0.0, f64::max);
        println!("l={l}: Casoratian drift {worst:.1e}, max |δ(V=0)| at 1/10/40 MeV = {d:.1e}");
    }
    Ok(())
}
