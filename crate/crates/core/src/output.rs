//! Data files, SVG figures and run manifests.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Significant digits of every number written to a data file.
pub const SIG_DIGITS: usize = 12;

/// `%.{digits}g`: shortest of fixed and exponential notation, trailing
/// zeros removed, exponent with at least two digits.
pub fn format_g(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => format_g(*x, SIG_DIGITS),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io(std::io::Error::other(format!("{}: {e}", path.display())))
}

/// Writes a CSV table with LF line endings. Every row must match the
/// header width.
pub fn write_table(header: &[String], rows: &[Vec<Cell>], path: &Path) -> Result<()> {
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != header.len()) {
        return Err(Error::invariant(
            "table rows match the header",
            format!("row {i} has {} cells, header has {}", r.len(), header.len()),
        ));
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| io_err(path, e))?;
    w.write_record(header).map_err(|e| io_err(path, e))?;
    for r in rows {
        w.write_record(r.iter().map(Cell::render)).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))?;
    Ok(())
}

/// Reads a table written by [`write_table`]; numeric-looking cells become
/// numbers.
pub fn read_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<Cell>>)> {
    let mut r = csv::Reader::from_path(path).map_err(|e| io_err(path, e))?;
    let header = r
        .headers()
        .map_err(|e| io_err(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| io_err(path, e))?;
        rows.push(
            rec.iter()
                .map(|s| s.parse::<f64>().map(Cell::Num).unwrap_or_else(|_| Cell::Text(s.to_string())))
                .collect(),
        );
    }
    Ok((header, rows))
}

pub fn write_json(value: &serde_json::Value, path: &Path) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Numerical(e.to_string()))?;
    s.push('\n');
    fs::write(path, s).map_err(|e| io_err(path, e))
}

pub fn write_text(text: &str, path: &Path) -> Result<()> {
    fs::write(path, text).map_err(|e| io_err(path, e))
}

/// Diverging palette: blue at `-1`, white at `0`, red at `+1`.
pub fn diverging(v: f64) -> (u8, u8, u8) {
    let v = v.clamp(-1.0, 1.0);
    let mix = |a: f64, b: f64, t: f64| (a + (b - a) * t).round() as u8;
    if v >= 0.0 {
        (mix(255.0, 178.0, v), mix(255.0, 24.0, v), mix(255.0, 43.0, v))
    } else {
        let t = -v;
        (mix(255.0, 33.0, t), mix(255.0, 102.0, t), mix(255.0, 172.0, t))
    }
}

/// Number of colour steps used by heatmaps.
const PALETTE_STEPS: i32 = 64;

fn palette_index(v: f64, limit: f64) -> i32 {
    if limit == 0.0 {
        return 0;
    }
    ((v / limit).clamp(-1.0, 1.0) * PALETTE_STEPS as f64).round() as i32
}

fn hex((r, g, b): (u8, u8, u8)) -> String {
    format!("#{r:02x}{g:02x}{b:02x}")
}

fn fmt_num(x: f64) -> String {
    format_g(x, 6)
}

/// Heatmap over a phase-space grid. `values[i][j]` sits at `(x[j], y[i])`.
pub struct Heatmap<'a> {
    pub title: &'a str,
    pub x: &'a [f64],
    pub y: &'a [f64],
    pub values: &'a [Vec<f64>],
    pub x_label: &'a str,
    pub y_label: &'a str,
}

impl Heatmap<'_> {
    /// Self-contained SVG with a colour scale symmetric about zero. Equal
    /// neighbouring cells in a row are merged into one rectangle.
    pub fn render(&self) -> String {
        let (nx, ny) = (self.x.len(), self.y.len());
        let limit = self.values.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
        let max = self.values.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
        let plot = 480.0;
        let (left, top) = (70.0, 40.0);
        let (cw, ch) = (plot / nx.max(1) as f64, plot / ny.max(1) as f64);
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="660" height="580" viewBox="0 0 660 580">"#
        );
        let _ = writeln!(
            s,
            r#"<metadata>{{"scale_min": {}, "scale_max": {}, "value_max": {}}}</metadata>"#,
            fmt_num(-limit),
            fmt_num(limit),
            fmt_num(max)
        );
        let _ = writeln!(s, r#"<rect width="660" height="580" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
            left + plot / 2.0,
            self.title
        );
        s.push_str("<g shape-rendering=\"crispEdges\">\n");
        for (i, row) in self.values.iter().enumerate() {
            // Row 0 is the smallest y and goes at the bottom.
            let yy = top + plot - (i + 1) as f64 * ch;
            let mut j = 0;
            while j < nx {
                let idx = palette_index(row[j], limit);
                let mut k = j + 1;
                while k < nx && palette_index(row[k], limit) == idx {
                    k += 1;
                }
                let colour = hex(diverging(idx as f64 / PALETTE_STEPS as f64));
                let _ = writeln!(
                    s,
                    r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{colour}"/>"#,
                    left + j as f64 * cw,
                    yy,
                    (k - j) as f64 * cw,
                    ch
                );
                j = k;
            }
        }
        s.push_str("</g>\n");
        let _ = writeln!(
            s,
            r#"<rect x="{left}" y="{top}" width="{plot}" height="{plot}" fill="none" stroke="black"/>"#
        );
        axis_ticks(&mut s, self.x, self.y, left, top, plot, plot);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
            left + plot / 2.0,
            top + plot + 40.0,
            self.x_label
        );
        let _ = writeln!(
            s,
            r#"<text x="20" y="{}" font-family="sans-serif" font-size="14" text-anchor="middle" transform="rotate(-90 20 {})">{}</text>"#,
            top + plot / 2.0,
            top + plot / 2.0,
            self.y_label
        );
        // Colour bar.
        let bx = left + plot + 30.0;
        for k in -PALETTE_STEPS..PALETTE_STEPS {
            let y0 = top + plot * (PALETTE_STEPS - k - 1) as f64 / (2 * PALETTE_STEPS) as f64;
            let _ = writeln!(
                s,
                r#"<rect x="{bx}" y="{:.3}" width="20" height="{:.3}" fill="{}"/>"#,
                y0,
                plot / (2 * PALETTE_STEPS) as f64 + 0.5,
                hex(diverging((k as f64 + 0.5) / PALETTE_STEPS as f64))
            );
        }
        for (frac, v) in [(0.0, limit), (0.5, 0.0), (1.0, -limit)] {
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{:.3}" font-family="sans-serif" font-size="11">{}</text>"#,
                bx + 24.0,
                top + plot * frac + 4.0,
                fmt_num(v)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">max {}</text>"#,
            left + plot / 2.0,
            top + plot + 60.0,
            fmt_num(max)
        );
        s.push_str("</svg>\n");
        s
    }
}

fn axis_ticks(s: &mut String, x: &[f64], y: &[f64], left: f64, top: f64, w: f64, h: f64) {
    let range = |v: &[f64]| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if hi > lo { (lo, hi) } else { (lo - 0.5, lo + 0.5) }
    };
    let (x0, x1) = range(x);
    let (y0, y1) = range(y);
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
            left + f * w,
            top + h + 16.0,
            fmt_num(x0 + f * (x1 - x0))
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
            left - 6.0,
            top + h - f * h + 4.0,
            fmt_num(y0 + f * (y1 - y0))
        );
    }
}

/// One polyline of a line chart; `None` values break the line.
pub struct Series {
    pub name: String,
    pub y: Vec<Option<f64>>,
}

pub struct LineChart<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub x: &'a [f64],
    pub series: Vec<Series>,
}

const LINE_COLOURS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

impl LineChart<'_> {
    pub fn render(&self) -> String {
        let (left, top, w, h) = (70.0, 40.0, 520.0, 360.0);
        let ys = self.series.iter().flat_map(|s| s.y.iter().flatten().copied());
        let (mut y0, mut y1) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        if !(y1 > y0) {
            y0 = if y0.is_finite() { y0 - 0.5 } else { 0.0 };
            y1 = y0 + 1.0;
        }
        let x0 = self.x.first().copied().unwrap_or(0.0);
        let x1 = self.x.last().copied().unwrap_or(1.0);
        let sx = |x: f64| left + if x1 > x0 { (x - x0) / (x1 - x0) * w } else { 0.0 };
        let sy = |y: f64| top + h - (y - y0) / (y1 - y0) * h;
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="760" height="470" viewBox="0 0 760 470">"#
        );
        let _ = writeln!(s, r#"<rect width="760" height="470" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
            left + w / 2.0,
            self.title
        );
        let _ = writeln!(
            s,
            r#"<rect x="{left}" y="{top}" width="{w}" height="{h}" fill="none" stroke="black"/>"#
        );
        axis_ticks(&mut s, &[x0, x1], &[y0, y1], left, top, w, h);
        for (k, series) in self.series.iter().enumerate() {
            let colour = LINE_COLOURS[k % LINE_COLOURS.len()];
            let mut segment: Vec<String> = Vec::new();
            let flush = |seg: &mut Vec<String>, s: &mut String| {
                if seg.len() > 1 {
                    let _ = writeln!(
                        s,
                        r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
                        seg.join(" ")
                    );
                }
                seg.clear();
            };
            for (x, y) in self.x.iter().zip(&series.y) {
                match y {
                    Some(y) => segment.push(format!("{:.3},{:.3}", sx(*x), sy(*y))),
                    None => flush(&mut segment, &mut s),
                }
            }
            flush(&mut segment, &mut s);
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" fill="{colour}">{}</text>"#,
                left + w + 10.0,
                top + 14.0 * (k + 1) as f64,
                series.name
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
            left + w / 2.0,
            top + h + 40.0,
            self.x_label
        );
        let _ = writeln!(
            s,
            r#"<text x="20" y="{}" font-family="sans-serif" font-size="14" text-anchor="middle" transform="rotate(-90 20 {})">{}</text>"#,
            top + h / 2.0,
            top + h / 2.0,
            self.y_label
        );
        s.push_str("</svg>\n");
        s
    }
}

/// Record of one CLI run, written next to its outputs.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    /// SHA-256 of the resolved configuration JSON.
    pub config_hash: String,
    pub outputs: Vec<PathBuf>,
    pub wall_time_s: f64,
    pub version: String,
    /// Seconds since the Unix epoch at completion.
    pub finished_unix: u64,
    pub warnings: Vec<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl RunManifest {
    /// Fails when a listed output is missing.
    pub fn verify(&self) -> Result<()> {
        match self.outputs.iter().find(|p| !p.exists()) {
            Some(p) => Err(io_err(p, "listed output is missing")),
            None => Ok(()),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let v = serde_json::to_value(self).map_err(|e| Error::Numerical(e.to_string()))?;
        write_json(&v, path)
    }
}
