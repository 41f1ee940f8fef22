//! Eigensystems, parameter sweeps and anticrossing search.

use rayon::prelude::*;

use crate::circuit::CircuitSpec;
use crate::error::{Error, Result};
use crate::linalg::{eigh, flat_index, max_abs, max_asymmetry, multi_index, CMatrix, Operator};

use super::full::{FullModel, DEFAULT_DIM_CAP};
use super::mode::{e_j_for_frequency, fluxonium_hamiltonian, transmon_hamiltonian};

/// Lowest eigenpairs of a Hermitian operator.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    /// Energies in GHz, ascending.
    pub energies: Vec<f64>,
    /// Columns are the matching orthonormal eigenvectors.
    pub states: CMatrix,
}

/// The `k` lowest eigenpairs; fails on non-Hermitian input.
pub fn eigensystem(h: &Operator, k: usize) -> Result<Eigensystem> {
    let asym = max_asymmetry(&h.data);
    if asym > 1e-12 * max_abs(&h.data).max(1.0) {
        return Err(Error::NonHermitian { max_asymmetry: asym });
    }
    let e = eigh(&h.data);
    let k = k.min(e.values.len());
    Ok(Eigensystem {
        energies: e.values[..k].to_vec(),
        states: e.vectors.columns(0, k).into_owned(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    /// External flux of the fluxonium in radians.
    FluxoniumPhiExt,
    TransmonNg,
    CouplerEj,
    /// Coupler 0-1 frequency in GHz; `E_J` is solved from it.
    CouplerFrequency,
}

impl SweepParam {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParam::FluxoniumPhiExt => "fluxonium.phi_ext",
            SweepParam::TransmonNg => "transmon.n_g",
            SweepParam::CouplerEj => "coupler.E_J",
            SweepParam::CouplerFrequency => "coupler.omega",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "fluxonium.phi_ext" | "phi_ext" | "fluxonium" => Ok(SweepParam::FluxoniumPhiExt),
            "transmon.n_g" | "n_g" | "transmon" => Ok(SweepParam::TransmonNg),
            "coupler.E_J" | "coupler.e_j" => Ok(SweepParam::CouplerEj),
            "coupler.omega" | "coupler" | "omega_c" => Ok(SweepParam::CouplerFrequency),
            other => Err(Error::config("sweep", format!("unknown sweep parameter `{other}`"))),
        }
    }

    /// Spec with the swept parameter set to `value`.
    pub fn apply(&self, spec: &CircuitSpec, value: f64) -> Result<CircuitSpec> {
        let mut s = spec.clone();
        match self {
            SweepParam::FluxoniumPhiExt => s.fluxonium = spec.fluxonium.with_phi_ext(value),
            SweepParam::TransmonNg => s.transmon = spec.transmon.with_n_g(value),
            SweepParam::CouplerEj => {
                if !(value > spec.coupler.e_c) {
                    return Err(Error::invariant(
                        "coupler: E_C<E_J violated",
                        format!("E_J = {value}"),
                    ));
                }
                s.coupler = spec.coupler.with_e_j(value)
            }
            SweepParam::CouplerFrequency => {
                let e_j = e_j_for_frequency(&spec.coupler, value, spec.truncation.charge_cutoff)?;
                s.coupler = spec.coupler.with_e_j(e_j);
            }
        }
        Ok(s)
    }
}

/// Which Hamiltonian a scan diagonalizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    Full,
    Fluxonium,
    Transmon,
    Coupler,
}

#[derive(Debug, Clone, Copy)]
pub struct ScanOptions {
    pub scope: Scope,
    /// Number of eigenvalues reported per point.
    pub levels: usize,
    /// Level jumps larger than this (GHz) between neighbours are flagged.
    pub jump_threshold: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            scope: Scope::Full,
            levels: 8,
            jump_threshold: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTable {
    pub param: String,
    pub grid: Vec<f64>,
    /// Energies relative to the ground state, per grid point.
    pub energies: Vec<Vec<f64>>,
    /// Bare-state label `Q1 C Q2` of each eigenstate (full scope only).
    pub labels: Option<Vec<Vec<String>>>,
    /// Points where two bare-state overlaps are within 1e-3.
    pub ambiguous: Vec<bool>,
    /// Points where some level moved by more than the jump threshold.
    pub jumps: Vec<bool>,
}

pub fn label_string(levels: &[usize]) -> String {
    if levels.iter().all(|&l| l < 10) {
        levels.iter().map(|l| l.to_string()).collect()
    } else {
        levels
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

struct Point {
    energies: Vec<f64>,
    labels: Option<Vec<String>>,
    ambiguous: bool,
}

fn scan_point(spec: &CircuitSpec, opts: &ScanOptions) -> Result<Point> {
    let t = spec.truncation;
    let h = match opts.scope {
        Scope::Full => FullModel::build(spec, DEFAULT_DIM_CAP)?.hamiltonian(),
        Scope::Fluxonium => fluxonium_hamiltonian(&spec.fluxonium, t.fluxonium_basis)?,
        Scope::Transmon => transmon_hamiltonian(&spec.transmon, t.charge_cutoff)?,
        Scope::Coupler => transmon_hamiltonian(&spec.coupler, t.charge_cutoff)?,
    };
    let es = eigensystem(&h, opts.levels)?;
    let e0 = es.energies[0];
    let energies = es.energies.iter().map(|e| e - e0).collect();
    if opts.scope != Scope::Full {
        return Ok(Point {
            energies,
            labels: None,
            ambiguous: false,
        });
    }
    let mut ambiguous = false;
    let mut labels = Vec::with_capacity(es.energies.len());
    for k in 0..es.energies.len() {
        let (best, first, second) = top_two(es.states.column(k).iter().map(|z| z.norm_sqr()));
        ambiguous |= first - second < 1e-3;
        labels.push(label_string(&multi_index(best, &h.dims)));
    }
    Ok(Point {
        energies,
        labels: Some(labels),
        ambiguous,
    })
}

/// Index of the largest value, the largest and the runner-up.
fn top_two(values: impl Iterator<Item = f64>) -> (usize, f64, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    let mut second = f64::NEG_INFINITY;
    for (i, v) in values.enumerate() {
        if v > best.1 {
            second = best.1;
            best = (i, v);
        } else if v > second {
            second = v;
        }
    }
    (best.0, best.1, second)
}

/// Diagonalizes at every grid point; points run in parallel, output order
/// follows the grid.
pub fn spectrum_scan(
    spec: &CircuitSpec,
    sweep: SweepParam,
    grid: &[f64],
    opts: &ScanOptions,
) -> Result<SpectrumTable> {
    let points: Vec<Point> = grid
        .par_iter()
        .map(|&x| scan_point(&sweep.apply(spec, x)?, opts))
        .collect::<Result<_>>()?;
    let mut jumps = vec![false; grid.len()];
    for i in 1..points.len() {
        jumps[i] = points[i]
            .energies
            .iter()
            .zip(&points[i - 1].energies)
            .any(|(a, b)| (a - b).abs() > opts.jump_threshold);
    }
    let ambiguous = points.iter().map(|p| p.ambiguous).collect();
    let labels = if opts.scope == Scope::Full {
        Some(points.iter().map(|p| p.labels.clone().unwrap_or_default()).collect())
    } else {
        None
    };
    Ok(SpectrumTable {
        param: sweep.name().to_string(),
        grid: grid.to_vec(),
        energies: points.into_iter().map(|p| p.energies).collect(),
        labels,
        ambiguous,
        jumps,
    })
}

impl SpectrumTable {
    /// Header `param, E0, E1, ..., label0, label1, ...`.
    pub fn header(&self) -> Vec<String> {
        let k = self.energies.first().map_or(0, |e| e.len());
        let mut h = vec![self.param.clone()];
        h.extend((0..k).map(|i| format!("E{i}")));
        if self.labels.is_some() {
            h.extend((0..k).map(|i| format!("label{i}")));
        }
        h
    }

    /// Energy of the eigenstate labelled `label` at each grid point.
    pub fn track(&self, label: &str) -> Vec<Option<f64>> {
        let Some(labels) = &self.labels else {
            return vec![None; self.grid.len()];
        };
        labels
            .iter()
            .zip(&self.energies)
            .map(|(ls, es)| ls.iter().position(|l| l == label).map(|k| es[k]))
            .collect()
    }
}

/// Splitting between the two eigenstates carrying the most combined weight
/// on bare states `a` and `b`.
pub fn labeled_gap(spec: &CircuitSpec, a: [usize; 3], b: [usize; 3]) -> Result<f64> {
    let h = FullModel::build(spec, DEFAULT_DIM_CAP)?.hamiltonian();
    Ok(gaps_from(&h, &[(a, b)])?[0])
}

fn gaps_from(h: &Operator, pairs: &[([usize; 3], [usize; 3])]) -> Result<Vec<f64>> {
    let e = eigh(&h.data);
    let n = e.values.len();
    pairs
        .iter()
        .map(|(a, b)| {
            let ia = flat_index(a, &h.dims);
            let ib = flat_index(b, &h.dims);
            if a.iter().zip(&h.dims).any(|(l, d)| l >= d) || b.iter().zip(&h.dims).any(|(l, d)| l >= d) {
                return Err(Error::invariant("bare label within truncation", format!("{a:?} / {b:?}")));
            }
            let weights = (0..n).map(|k| e.vectors[(ia, k)].norm_sqr() + e.vectors[(ib, k)].norm_sqr());
            let mut w: Vec<(usize, f64)> = weights.enumerate().collect();
            w.sort_by(|x, y| y.1.total_cmp(&x.1));
            Ok((e.values[w[0].0] - e.values[w[1].0]).abs())
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Anticrossing {
    pub a: [usize; 3],
    pub b: [usize; 3],
    /// Coupler frequency (GHz) at the minimum gap.
    pub omega_c: f64,
    /// Minimum splitting (GHz).
    pub gap: f64,
}

/// Locates the minimum labelled gap of each pair over a coupler-frequency
/// window: one shared coarse sweep, then golden-section refinement.
pub fn find_anticrossings(
    spec: &CircuitSpec,
    pairs: &[([usize; 3], [usize; 3])],
    lo: f64,
    hi: f64,
    coarse: usize,
    tol: f64,
) -> Result<Vec<Anticrossing>> {
    if coarse < 3 || !(hi > lo) {
        return Err(Error::invariant("coarse >= 3 and hi > lo", format!("{coarse}, [{lo}, {hi}]")));
    }
    let step = (hi - lo) / (coarse - 1) as f64;
    let grid: Vec<f64> = (0..coarse).map(|i| lo + step * i as f64).collect();
    let gap_at = |w: f64, pairs: &[([usize; 3], [usize; 3])]| -> Result<Vec<f64>> {
        let s = SweepParam::CouplerFrequency.apply(spec, w)?;
        gaps_from(&FullModel::build(&s, DEFAULT_DIM_CAP)?.hamiltonian(), pairs)
    };
    let table: Vec<Vec<f64>> = grid
        .par_iter()
        .map(|&w| gap_at(w, pairs))
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(pairs.len());
    for (p, &(a, b)) in pairs.iter().enumerate() {
        let imin = (0..coarse)
            .min_by(|&i, &j| table[i][p].total_cmp(&table[j][p]))
            .expect("non-empty grid");
        let left = grid[imin.saturating_sub(1)];
        let right = grid[(imin + 1).min(coarse - 1)];
        let f = |w: f64| gap_at(w, &[(a, b)]).map(|v| v[0]);
        let (omega_c, gap) = golden_min(f, left, right, tol)?;
        let (omega_c, gap) = if table[imin][p] < gap {
            (grid[imin], table[imin][p])
        } else {
            (omega_c, gap)
        };
        out.push(Anticrossing { a, b, omega_c, gap });
    }
    Ok(out)
}

/// Largest coupler-excited weight among the dressed states continuing the
/// bare computational states `|q1 0 q2>` of the three-mode model, with the
/// coupler tuned to `omega_c`.
pub fn coupler_leakage(spec: &CircuitSpec, omega_c: f64) -> Result<f64> {
    let s = SweepParam::CouplerFrequency.apply(spec, omega_c)?;
    let h = FullModel::build(&s, DEFAULT_DIM_CAP)?.hamiltonian();
    let e = eigh(&h.data);
    let mut worst: f64 = 0.0;
    for (q1, q2) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        let idx = flat_index(&[q1, 0, q2], &h.dims);
        let k = (0..e.values.len())
            .max_by(|&x, &y| e.vectors[(idx, x)].norm_sqr().total_cmp(&e.vectors[(idx, y)].norm_sqr()))
            .expect("non-empty spectrum");
        let excited: f64 = (0..h.dim())
            .filter(|&i| multi_index(i, &h.dims)[1] > 0)
            .map(|i| e.vectors[(i, k)].norm_sqr())
            .sum();
        worst = worst.max(excited);
    }
    Ok(worst)
}

/// Golden-section minimization of `f` on `[lo, hi]`.
pub fn golden_min(f: impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64, tol: f64) -> Result<(f64, f64)> {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while hi - lo > tol {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 < f2 { (x1, f1) } else { (x2, f2) })
}
