//! Wigner function of a Kerr cat, written as CSV and SVG.

use std::path::Path;

use ftt_sim::cat::{kerr_cat, wigner, Grid};
use ftt_sim::linalg::C64;
use ftt_sim::output::{write_table, write_text, Cell, Heatmap};

fn main() -> ftt_sim::Result<()> {
    let alpha = C64::new(2.0, 0.0);
    let grid = Grid::for_alpha(alpha);
    let w = wigner(&kerr_cat(alpha, 4, -5.95, 40)?, &grid);
    println!("integral {:.6}, min {:.4}, max {:.4}", w.integral(), w.min(), w.max());

    let out = Path::new("out/examples");
    std::fs::create_dir_all(out)?;
    let mut rows = Vec::new();
    for (i, &y) in grid.im.iter().enumerate() {
        for (j, &x) in grid.re.iter().enumerate() {
            rows.push(vec![Cell::from(x), Cell::from(y), Cell::from(w.values[i][j])]);
        }
    }
    let header = ["re_gamma", "im_gamma", "value"].map(String::from);
    write_table(&header, &rows, &out.join("wigner_m4.csv"))?;
    let svg = Heatmap {
        title: "four-component cat",
        x: &grid.re,
        y: &grid.im,
        values: &w.values,
        x_label: "Re γ",
        y_label: "Im γ",
    }
    .render();
    write_text(&svg, &out.join("wigner_m4.svg"))?;
    println!("wrote {}", out.display());
    Ok(())
}
