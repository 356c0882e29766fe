//! The Numerov reference on its own: single-channel phase shift with its
//! step-halving error bar, and a coupled-channel S-matrix.

use nalgebra::DMatrix;

use horse::constants::reduced_mass;
use horse::oracle::{phase_shift, CoupledProblem, OracleChannel, RadialProblem};
use horse::potential::WoodsSaxon;

fn main() -> horse::Result<()> {
    let mu = reduced_mass(1.0, 15.0);
    let ws = WoodsSaxon::nucleon_core(15.0);
    for z in [0.0, 7.0] {
        let p = RadialProblem::new(&ws, 0, mu).with_charge(z);
        let d = phase_shift(&p, 10.0, None, None)?;
        println!("Z1Z2={z}: δ(10 MeV) = {:.6} ± {:.1e} (r_match {:.1} fm)", d.delta, d.error_estimate, d.r_match);
    }
    let chan = |threshold| OracleChannel {
        l: 0,
        reduced_mass: mu,
        threshold,
        charge_product: 0.0,
    };
    let v = |r: f64| {
        if r < 3.0 {
            DMatrix::from_row_slice(2, 2, &[-20.0, -5.0, -5.0, -15.0])
        } else {
            DMatrix::zeros(2, 2)
        }
    };
    let prob = CoupledProblem {
        channels: vec![chan(0.0), chan(2.0)],
        potential: &v,
        breakpoints: vec![3.0],
        range: 3.0,
    };
    let s = prob.s_matrix(10.0, None, None)?;
    println!("coupled S(10 MeV) = {:.5}  error {:.1e}", s.s, s.error_estimate);
    Ok(())
}
