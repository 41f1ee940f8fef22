//! Cat preparation and Wigner tomography protocol: pulse timeline and the
//! ideal parity readout at a few phase-space points.

use ftt_sim::cat::{run_protocol, tomography_sequence, KerrSetting};
use ftt_sim::linalg::C64;
use ftt_sim::CircuitSpec;

fn main() -> ftt_sim::Result<()> {
    let spec = CircuitSpec::table1();
    let alpha = C64::new(2.0, 0.0);
    let p = tomography_sequence(&spec, alpha, KerrSetting::Given(-5.95), 2, C64::new(0.0, 0.0))?;
    println!("parity interval {:.2} ns, Kerr pulse {:.2} ns", p.parity_interval, p.flux_width);
    for pulse in &p.sequence.pulses {
        println!("  {:<12} {:?} at {:.2} ns for {:.2} ns", pulse.label, pulse.target, pulse.envelope.start, pulse.envelope.duration);
    }
    for gamma in [C64::new(0.0, 0.0), C64::new(0.0, 0.39), C64::new(2.0, 0.0)] {
        let probe = tomography_sequence(&spec, alpha, KerrSetting::Given(-5.95), 2, gamma)?;
        let o = run_protocol(&probe, 60)?;
        println!("gamma = {gamma}: P(e) = {:.4}, W = {:+.4}", o.p_excited, o.wigner);
    }
    let tuned = KerrSetting::Tuned { target_mhz: -5.95, fluxonium: spec.fluxonium };
    if let Err(e) = tomography_sequence(&spec, alpha, tuned, 2, C64::new(0.0, 0.0)) {
        println!("flux tuning: {e}");
    }
    Ok(())
}
