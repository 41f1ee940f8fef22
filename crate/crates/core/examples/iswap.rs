//! iSWAP by a rectangular coupler flux pulse, with the erf-square
//! compensation pulse on the fluxonium.

use ftt_sim::dynamics::{simulate_iswap, IswapOptions};
use ftt_sim::CircuitSpec;

fn main() -> ftt_sim::Result<()> {
    let r = simulate_iswap(&CircuitSpec::table1(), &IswapOptions::default())?;
    println!("gate time {:.4} ns, fidelity {:.10}", r.gate_time_ns, r.fidelity);
    if let Some(p) = r.process_fidelity {
        println!("average gate fidelity {p:.10}");
    }
    for (label, f) in &r.per_state {
        println!("  {label:>6}  {f:.10}");
    }
    for p in &r.sequence.pulses {
        println!(
            "  {:<12} {:?} start {:.3} ns, {:.3} ns long",
            p.label, p.target, p.envelope.start, p.envelope.duration
        );
    }
    Ok(())
}
