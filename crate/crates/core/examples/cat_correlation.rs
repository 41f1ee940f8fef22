//! Difference of cat Wigner functions at n+1 and n mean photons.

use ftt_sim::cat::{cat_correlation, Grid};

fn main() -> ftt_sim::Result<()> {
    let grid = Grid::square(5.0, 101);
    for (n, m) in [(2, 2), (2, 3), (4, 4)] {
        let c = cat_correlation(n, m, -5.95, &grid, 40)?;
        let centre = &c.values[50];
        let cut: Vec<String> = (0..=10).map(|j| format!("{:+.3}", centre[50 + 5 * j])).collect();
        println!("n = {n}, m = {m}: max |C| = {:.4}; C(re >= 0, im = 0): {}", c.max_abs(), cut.join(" "));
    }
    Ok(())
}
