//! Two-, three- and four-component cats from Kerr evolution of |alpha>.

use ftt_sim::cat::{coherent_state, ideal_cat, kerr_cat, kerr_evolve, revival_time};
use ftt_sim::linalg::C64;

fn main() -> ftt_sim::Result<()> {
    let k = -5.95;
    let alpha = C64::new(2.0, 0.0);
    let tau = revival_time(k);
    println!("tau_0 = {tau:.2} ns");
    for m in 2..=4 {
        let cat = kerr_cat(alpha, m, k, 40)?;
        let overlap = cat.overlap(&ideal_cat(alpha, m, k, 40)?);
        println!("m = {m}: t = {:.2} ns, overlap with the analytic cat {overlap:.12}", tau / m as f64);
    }
    let start = coherent_state(alpha, 40)?;
    let flipped = coherent_state(-alpha, 40)?;
    println!("at tau_0: |<-alpha|psi>| = {:.12}", flipped.overlap(&kerr_evolve(alpha, k, tau, 40)?));
    println!("at 2 tau_0: |<alpha|psi>| = {:.12}", start.overlap(&kerr_evolve(alpha, k, 2.0 * tau, 40)?));
    Ok(())
}
