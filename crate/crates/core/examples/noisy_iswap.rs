//! iSWAP under relaxation and dephasing, and leakage with a third level.

use ftt_sim::circuit::CoherenceSpec;
use ftt_sim::dynamics::{simulate_iswap, IswapOptions};
use ftt_sim::CircuitSpec;

fn main() -> ftt_sim::Result<()> {
    let spec = CircuitSpec::table1();
    let clean = simulate_iswap(&spec, &IswapOptions::default())?;
    let noisy = simulate_iswap(&spec, &IswapOptions { noise: Some(CoherenceSpec::default()), ..Default::default() })?;
    println!("closed {:.10}, with T1/T2 {:.10}", clean.fidelity, noisy.fidelity);
    // Short coherence times make the loss visible.
    let mut short = CoherenceSpec::default();
    short.fluxonium.t1_ms = 1e-4;
    short.fluxonium.t2_ms = 1e-4;
    let lossy = simulate_iswap(&spec, &IswapOptions { noise: Some(short), ..Default::default() })?;
    println!("fluxonium T1 = T2 = 100 ns: {:.6}", lossy.fidelity);
    let three = simulate_iswap(&spec, &IswapOptions { levels: [3, 3], ..Default::default() })?;
    println!("three levels per qubit: fidelity {:.6}, leakage {:.4}", three.fidelity, three.leakage);
    Ok(())
}
