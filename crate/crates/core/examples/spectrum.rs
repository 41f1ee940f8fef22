//! Lowest levels of the three-mode circuit as the coupler is tuned, with the
//! two coupler anticrossings.

use ftt_sim::hamiltonian::{find_anticrossings, label_string, spectrum_scan, ScanOptions, SweepParam};
use ftt_sim::CircuitSpec;

fn main() -> ftt_sim::Result<()> {
    let spec = CircuitSpec::table1();
    let grid: Vec<f64> = (0..7).map(|i| 5.0 + 0.3 * i as f64).collect();
    let table = spectrum_scan(&spec, SweepParam::CouplerFrequency, &grid, &ScanOptions { levels: 5, ..Default::default() })?;
    let labels = table.labels.as_ref().expect("full scope is labelled");
    println!("omega_c   E1..E4 (GHz, labels Q1 C Q2)");
    for (i, w) in table.grid.iter().enumerate() {
        let levels: Vec<String> = (1..5).map(|k| format!("{:.4} [{}]", table.energies[i][k], labels[i][k])).collect();
        println!("{w:.2}  {}", levels.join("  "));
    }

    let pairs = [([1, 0, 0], [0, 1, 0]), ([0, 0, 1], [0, 1, 0])];
    for ac in find_anticrossings(&spec, &pairs, 5.0, 6.8, 13, 1e-3)? {
        println!(
            "{} <-> {}: minimum gap {:.4} GHz at omega_c = {:.4} GHz",
            label_string(&ac.a),
            label_string(&ac.b),
            ac.gap,
            ac.omega_c
        );
    }
    Ok(())
}
