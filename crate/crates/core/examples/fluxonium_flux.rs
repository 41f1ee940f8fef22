//! Single-mode spectra: the fluxonium against external flux and the
//! transmon against offset charge.

use ftt_sim::hamiltonian::{fluxonium_frequency, transmon_frequency};
use ftt_sim::CircuitSpec;

fn main() {
    let spec = CircuitSpec::table1();
    println!("phi_ext/pi  fluxonium omega_01 (GHz)");
    for k in 0..=8 {
        let phi = std::f64::consts::PI * k as f64 / 4.0;
        let p = spec.fluxonium.with_phi_ext(phi);
        println!("{:.2}  {:.5}", phi / std::f64::consts::PI, fluxonium_frequency(&p, spec.truncation.fluxonium_basis));
    }
    println!("n_g  transmon omega_01 (GHz)");
    for n_g in [0.0, 0.25, 0.5] {
        let mut t = spec.transmon;
        t.n_g = n_g;
        println!("{n_g:.2}  {:.6}", transmon_frequency(&t, spec.truncation.charge_cutoff));
    }
}
