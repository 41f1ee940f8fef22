//! Calibrated 15 ns gaussian X(pi/2) on the fluxonium with the coupler parked.

use ftt_sim::dynamics::{simulate_x_half_pi, Frame, X90Options};
use ftt_sim::CircuitSpec;

fn main() -> ftt_sim::Result<()> {
    let spec = CircuitSpec::table1();
    for frame in [Frame::Rotating, Frame::Lab] {
        let r = simulate_x_half_pi(&spec, &X90Options { frame, ..Default::default() })?;
        println!(
            "{frame:?}: A = {:.4} MHz, fidelity {:.8}, spectator deviation {:.1e}",
            r.amplitude_mhz.unwrap_or(f64::NAN),
            r.fidelity,
            r.spectator_deviation.unwrap_or(0.0)
        );
        for (label, f) in &r.per_state {
            println!("  |{label}>  {f:.8}");
        }
    }
    Ok(())
}
