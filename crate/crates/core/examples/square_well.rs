//! s-wave phase shift of a square well against the closed form, showing the
//! algebraic convergence in the truncation boundary N for a sharp edge.

use horse::basis::OscillatorBasis;
use horse::constants::reduced_mass;
use horse::hamiltonian::TruncatedHamiltonian;
use horse::potential::SquareWell;
use horse::single_channel::phase_shift;
use horse::specfun::spherical_bessel;

fn exact(mu: f64, depth: f64, radius: f64, e: f64) -> f64 {
    let hc = horse::constants::HBAR_C;
    let k = (2.0 * mu * e).sqrt() / hc;
    let q = (2.0 * mu * (e - depth)).sqrt() / hc;
    let i = spherical_bessel(0, q * radius).unwrap();
    let o = spherical_bessel(0, k * radius).unwrap();
    let g = q * i.dj / i.j;
    ((k * o.dj - g * o.j) / (k * o.dn - g * o.n)).atan()
}

fn main() -> horse::Result<()> {
    let mu = reduced_mass(1.0, 15.0);
    let well = SquareWell { depth: -20.0, radius: 3.0 };
    let basis = OscillatorBasis::new(18.0, mu, 0)?;
    println!("   N  smoothing  max|Δδ| on [1, 25] MeV");
    for n in [10, 20, 40, 80] {
        for smooth in [false, true] {
            let h = TruncatedHamiltonian::diagonalize(basis, &well, n, smooth)?;
            let worst = (1..=25)
                .map(|e| {
                    let e = e as f64;
                    let d = phase_shift(&h, e).unwrap() - exact(mu, -20.0, 3.0, e);
                    horse::multichannel::fold_phase(d).abs()
                })
                .fold(0.0, f64::max);
            println!("{n:4}  {smooth:9}  {worst:.4}");
        }
    }
    Ok(())
}
