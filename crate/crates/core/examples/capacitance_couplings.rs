//! Couplings from a capacitance network, exact and to leading order.

use ftt_sim::circuit::{coupling_from_capacitances, invert_capacitance_matrix, CapacitanceNetwork};

fn main() -> ftt_sim::Result<()> {
    // fF
    let net = CapacitanceNetwork {
        c_1: 80.0,
        c_2: 90.0,
        c_c: 70.0,
        c_1c: 4.0,
        c_2c: 5.0,
        c_12: 0.3,
    };
    let exact = invert_capacitance_matrix(&net)?;
    let approx = net.perturbative_inverse();
    println!("inverse capacitance matrix (1/fF), exact vs leading order:");
    for i in 0..3 {
        let row: Vec<String> = (0..3).map(|j| format!("{:+.3e} / {:+.3e}", exact[(i, j)], approx[(i, j)])).collect();
        println!("  {}", row.join("   "));
    }
    let g = coupling_from_capacitances(&net, 5.7, 6.4, 6.0)?;
    println!("g_1c = {:.2} MHz, g_2c = {:.2} MHz, g_12 = {:.2} MHz", g.g_1c, g.g_2c, g.g_12);
    Ok(())
}
