//! Fluxonium Kerr coefficient from the potential expansion, and its range
//! over a flux period.

use ftt_sim::effective::{kerr_pipeline, kerr_scan, KerrEcSource};
use ftt_sim::CircuitSpec;

fn main() -> ftt_sim::Result<()> {
    let spec = CircuitSpec::table1();
    let r = kerr_pipeline(&spec.fluxonium, spec.omega_1())?;
    println!("phi_min = {:.4}, g3 = {:.2} MHz, g4 = {:.2} MHz, K = {:.1} MHz", r.phi_min, r.g3, r.g4, r.k);
    let scan = kerr_scan(&spec.fluxonium, KerrEcSource::Fluxonium, 401)?;
    let (lo, hi) = scan.range();
    println!("K over phi_ext in [0, 2 pi): [{lo:.1}, {hi:.1}] MHz");
    match scan.locate(-5.95) {
        Ok(phi) => println!("K = -5.95 MHz at phi_ext = {phi:.4}"),
        Err(e) => println!("{e}"),
    }
    Ok(())
}
