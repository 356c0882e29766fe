//! Exact P-matrix at the natural radius versus its discrete analogue built
//! from the last two oscillator coefficients; both pole lists are printed.

use horse::basis::OscillatorBasis;
use horse::constants::reduced_mass;
use horse::hamiltonian::TruncatedHamiltonian;
use horse::pmatrix::{find_poles, p_matrix_discrete, p_matrix_exact_radius, p_matrix_general, PValue};
use horse::potential::WoodsSaxon;

fn main() -> horse::Result<()> {
    let basis = OscillatorBasis::new(18.0, reduced_mass(1.0, 15.0), 0)?;
    let ws = WoodsSaxon::nucleon_core(15.0);
    let h = TruncatedHamiltonian::diagonalize(basis, &ws, 9, false)?;
    let b0 = basis.natural_channel_radius(9);
    let exact = find_poles(|e| p_matrix_general(&h, e, b0), 0.5, 30.0, 600, 1e-9)?;
    let discrete = find_poles(|e| p_matrix_discrete(&h, e).map(|d| PValue::finite(d.from_coefficients)), 0.5, 30.0, 600, 1e-9)?;
    let moving = find_poles(|e| p_matrix_exact_radius(&h, e, b0).map(|x| x.0), 0.5, 30.0, 600, 1e-9)?;
    println!("eigenvalues        {:?}", h.positive_eigenvalues());
    println!("poles at b0        {exact:?}");
    println!("poles, discrete    {discrete:?}");
    println!("poles at exact b(E) {moving:?}");
    for e in [2.0, 5.0, 12.0, 25.0] {
        let p = p_matrix_general(&h, e, b0)?.p().unwrap_or(f64::INFINITY);
        let d = p_matrix_discrete(&h, e)?.from_coefficients;
        println!("E={e:5.1}  P={p:9.4}  P_discrete={d:9.4}");
    }
    Ok(())
}
