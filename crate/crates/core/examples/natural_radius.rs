//! Exact channel radius b(E) at which the P-matrix poles sit on the
//! variational eigenvalues, compared with the natural radius b₀.

use horse::basis::OscillatorBasis;
use horse::constants::reduced_mass;
use horse::pmatrix::solve_channel_radius_near;

fn main() -> horse::Result<()> {
    let basis = OscillatorBasis::new(18.0, reduced_mass(1.0, 15.0), 0)?;
    for n in [0, 2, 9] {
        let b0 = basis.natural_channel_radius(n);
        print!("N={n} b0={b0:.3} fm  (b0-b)/b:");
        for e in [1.0, 10.0, 20.0, 30.0] {
            let root = solve_channel_radius_near(&basis, n, e, b0)?;
            print!("  {:.4}", (b0 - root.b) / root.b);
        }
        println!();
    }
    Ok(())
}
