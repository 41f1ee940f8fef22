//! Effective qubit-qubit coupling against coupler frequency and the point
//! where it vanishes.

use ftt_sim::effective::{effective_coupling_curve, find_zero_coupling, off_pole_grid, EffectiveOptions};
use ftt_sim::CircuitSpec;

fn main() -> ftt_sim::Result<()> {
    let spec = CircuitSpec::table1();
    let opts = EffectiveOptions::default();
    let grid = off_pole_grid(&spec, 4.0, 8.0, 17);
    let curve = effective_coupling_curve(&spec, &grid, &opts)?;
    for (w, g2) in curve.omega_c.iter().zip(&curve.two_g) {
        println!("{w:.3} GHz  2g = {g2:+9.2} MHz");
    }
    let zero = find_zero_coupling(&spec, 4.0, 8.0, &opts)?;
    println!("coupling vanishes at omega_c = {:.6} GHz", zero.omega_c_star);
    let with_cr = find_zero_coupling(&spec, 4.0, 8.0, &EffectiveOptions { counter_rotating: true, ..opts })?;
    println!("with counter-rotating terms: {:.6} GHz", with_cr.omega_c_star);
    Ok(())
}
