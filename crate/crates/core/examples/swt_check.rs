//! Schrieffer-Wolff reduction checked against the dressed three-mode levels.

use ftt_sim::effective::{effective_parameters, swt_verify, SwtOptions};
use ftt_sim::CircuitSpec;

fn main() -> ftt_sim::Result<()> {
    let spec = CircuitSpec::table1();
    for w in [2.5, 3.5, 4.27] {
        let eff = effective_parameters(&spec, w)?;
        let r = swt_verify(&spec, w, &SwtOptions::default())?;
        println!(
            "omega_c = {w:.2}: g~ = {:+.2} MHz, off-block {:.2} -> {:.2} MHz, level mismatch {:.3} MHz",
            eff.g_t, r.off_block_before, r.off_block_after, r.mismatch
        );
    }
    Ok(())
}
