//! Effective two-qubit model, fluxonium Kerr coefficient and the coupler
//! operating points.

use rayon::prelude::*;

use crate::circuit::{coupling_from_capacitances, CircuitSpec, CouplingSet, CouplingSource, FluxoniumParams};
use crate::error::{Error, Result};
use crate::hamiltonian::lowering;
use crate::linalg::{eigh, embed, expm_hermitian, flat_index, multi_index, CMatrix, C64, I, TWO_PI};

/// Fluxonium potential `U(phi)` and its first four derivatives (GHz).
pub fn potential_derivatives(p: &FluxoniumParams, phi: f64) -> [f64; 5] {
    let (bj, ej, el) = (p.beta * p.e_j, p.e_j, p.e_l);
    let d = p.phi_ext() - phi;
    [
        -bj * phi.cos() - ej * d.cos() + 0.5 * el * phi * phi,
        bj * phi.sin() - ej * d.sin() + el * phi,
        bj * phi.cos() + ej * d.cos() + el,
        -bj * phi.sin() + ej * d.sin(),
        -bj * phi.cos() - ej * d.cos(),
    ]
}

/// Global minimum of the fluxonium potential: dense grid, then Newton.
pub fn potential_minimum(p: &FluxoniumParams) -> f64 {
    // Beyond this radius the inductive term exceeds any junction energy gain.
    let reach = 2.0 * ((1.0 + p.beta) * p.e_j / p.e_l).sqrt() + std::f64::consts::PI;
    let n = 20_001;
    let mut best = (0.0, f64::INFINITY);
    for i in 0..n {
        let phi = -reach + 2.0 * reach * i as f64 / (n - 1) as f64;
        let u = potential_derivatives(p, phi)[0];
        if u < best.1 {
            best = (phi, u);
        }
    }
    let mut phi = best.0;
    for _ in 0..100 {
        let d = potential_derivatives(p, phi);
        if d[2] <= 0.0 {
            break;
        }
        let step = d[1] / d[2];
        phi -= step;
        if step.abs() < 1e-15 {
            break;
        }
    }
    phi
}

/// `c_i = U^(i)(phi_min) / E_J` for `i = 2, 3, 4`.
pub fn taylor_coefficients(p: &FluxoniumParams, phi_min: f64) -> (f64, f64, f64) {
    let d = potential_derivatives(p, phi_min);
    (d[2] / p.e_j, d[3] / p.e_j, d[4] / p.e_j)
}

/// Small-oscillation frequency `sqrt(8 E_J E_C c2)` around the minimum (GHz).
pub fn harmonic_frequency(p: &FluxoniumParams, c2: f64) -> f64 {
    (8.0 * p.e_j * p.e_c * c2).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KerrPipelineResult {
    pub phi_min: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    /// Three- and four-wave mixing strengths (MHz).
    pub g3: f64,
    pub g4: f64,
    /// Kerr coefficient (MHz).
    pub k: f64,
}

/// Which charging energy enters the wave-mixing strengths. The fluxonium's
/// own `E_C` is the physical choice; the transmon option reproduces the
/// alternative reading of the printed formula.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum KerrEcSource {
    #[default]
    Fluxonium,
    Transmon(f64),
}

/// Kerr coefficient from the Taylor expansion at the potential minimum.
pub fn kerr_pipeline(p: &FluxoniumParams, omega_q1: f64) -> Result<KerrPipelineResult> {
    kerr_pipeline_with(p, omega_q1, KerrEcSource::Fluxonium)
}

pub fn kerr_pipeline_with(p: &FluxoniumParams, omega_q1: f64, ec: KerrEcSource) -> Result<KerrPipelineResult> {
    if !(omega_q1 > 0.0) {
        return Err(Error::invariant("omega_q1 > 0", format!("got {omega_q1}")));
    }
    let e_c = match ec {
        KerrEcSource::Fluxonium => p.e_c,
        KerrEcSource::Transmon(e) => e,
    };
    let phi_min = potential_minimum(p);
    let (c2, c3, c4) = taylor_coefficients(p, phi_min);
    if c2 <= 0.0 {
        return Err(Error::UnstableMinimum { c2 });
    }
    let g3 = c3 / c2 * (e_c * omega_q1).sqrt() / 6.0;
    let g4 = c4 / c2 * e_c / 12.0;
    let k = 12.0 * (g4 - 5.0 * g3 * g3 / omega_q1);
    Ok(KerrPipelineResult {
        phi_min,
        c2,
        c3,
        c4,
        g3: 1e3 * g3,
        g4: 1e3 * g4,
        k: 1e3 * k,
    })
}

/// Kerr coefficient with the drive frequency taken as the local harmonic
/// frequency.
pub fn kerr_at(p: &FluxoniumParams, ec: KerrEcSource) -> Result<KerrPipelineResult> {
    let (c2, _, _) = taylor_coefficients(p, potential_minimum(p));
    if c2 <= 0.0 {
        return Err(Error::UnstableMinimum { c2 });
    }
    kerr_pipeline_with(p, harmonic_frequency(p, c2), ec)
}

/// `K(phi_ext)` sampled on `[0, 2*pi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KerrScan {
    pub phi_ext: Vec<f64>,
    /// MHz.
    pub k: Vec<f64>,
}

pub const KERR_SCAN_POINTS: usize = 2001;

pub fn kerr_scan(p: &FluxoniumParams, ec: KerrEcSource, points: usize) -> Result<KerrScan> {
    let phi_ext: Vec<f64> = (0..points).map(|i| TWO_PI * i as f64 / points as f64).collect();
    let k = phi_ext
        .par_iter()
        .map(|&x| kerr_at(&p.with_phi_ext(x), ec).map(|r| r.k))
        .collect::<Result<Vec<_>>>()?;
    Ok(KerrScan { phi_ext, k })
}

impl KerrScan {
    pub fn range(&self) -> (f64, f64) {
        let lo = self.k.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.k.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    /// First flux (radians) where `K` crosses `target_mhz`, by linear
    /// interpolation.
    pub fn locate(&self, target_mhz: f64) -> Result<f64> {
        for i in 1..self.k.len() {
            let (a, b) = (self.k[i - 1] - target_mhz, self.k[i] - target_mhz);
            if a == 0.0 {
                return Ok(self.phi_ext[i - 1]);
            }
            if a * b < 0.0 || b == 0.0 {
                let t = a / (a - b);
                return Ok(self.phi_ext[i - 1] + t * (self.phi_ext[i] - self.phi_ext[i - 1]));
            }
        }
        let (min_mhz, max_mhz) = self.range();
        Err(Error::UnreachableKerr {
            target_mhz,
            min_mhz,
            max_mhz,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EffectiveOptions {
    /// Include the `1/(omega_j + omega_c)` terms in the effective coupling.
    pub counter_rotating: bool,
    /// Recompute capacitive couplings at each coupler frequency (only when
    /// the spec is capacitance-based).
    pub frequency_dependent_g: bool,
}

/// Parameters of the two-qubit effective Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveModel {
    pub omega_c: f64,
    /// Dressed qubit frequencies (GHz).
    pub omega_1_t: f64,
    pub omega_2_t: f64,
    /// Fluxonium Kerr coefficient (MHz).
    pub k: f64,
    /// Transmon anharmonicity (GHz, negative).
    pub alpha_2_t: f64,
    /// Effective qubit-qubit coupling (MHz).
    pub g_t: f64,
    /// `omega_j - omega_c` (GHz).
    pub delta_1: f64,
    pub delta_2: f64,
    /// False when some `g_jc / |Delta_j|` exceeds 0.1.
    pub dispersive: bool,
}

/// Effective coupling (MHz) for bare frequencies in GHz and couplings in MHz.
pub fn effective_coupling(
    omega_1: f64,
    omega_2: f64,
    omega_c: f64,
    g: &CouplingSet,
    counter_rotating: bool,
) -> f64 {
    let (g1, g2) = (g.g_1c * 1e-3, g.g_2c * 1e-3);
    let d1 = omega_1 - omega_c;
    let d2 = omega_2 - omega_c;
    let mut gt = 0.5 * g1 * g2 * (1.0 / d1 + 1.0 / d2) + g.g_12 * 1e-3;
    if counter_rotating {
        gt -= 0.5 * g1 * g2 * (1.0 / (omega_1 + omega_c) + 1.0 / (omega_2 + omega_c));
    }
    1e3 * gt
}

fn couplings_at(spec: &CircuitSpec, omega_c: f64, opts: &EffectiveOptions) -> Result<CouplingSet> {
    match spec.source {
        CouplingSource::Capacitances(net) if opts.frequency_dependent_g => {
            coupling_from_capacitances(&net, spec.omega_1(), spec.omega_2(), omega_c)
        }
        _ => Ok(spec.couplings),
    }
}

fn check_resonance(omega_1: f64, omega_2: f64, omega_c: f64) -> Result<()> {
    for (mode, w) in [(1, omega_1), (2, omega_2)] {
        let delta = w - omega_c;
        if delta.abs() < 1e-3 {
            return Err(Error::Resonance { mode, delta_ghz: delta });
        }
    }
    Ok(())
}

pub fn effective_parameters(spec: &CircuitSpec, omega_c: f64) -> Result<EffectiveModel> {
    effective_parameters_with(spec, omega_c, &EffectiveOptions::default())
}

pub fn effective_parameters_with(spec: &CircuitSpec, omega_c: f64, opts: &EffectiveOptions) -> Result<EffectiveModel> {
    let k = kerr_pipeline(&spec.fluxonium, spec.omega_1())?.k;
    effective_parameters_with_kerr(spec, omega_c, opts, k)
}

/// Same as [`effective_parameters_with`] with a given Kerr coefficient (MHz),
/// which skips the potential minimization.
pub fn effective_parameters_with_kerr(
    spec: &CircuitSpec,
    omega_c: f64,
    opts: &EffectiveOptions,
    k: f64,
) -> Result<EffectiveModel> {
    let (w1, w2) = (spec.omega_1(), spec.omega_2());
    check_resonance(w1, w2, omega_c)?;
    let g = couplings_at(spec, omega_c, opts)?;
    let (g1, g2) = (g.g_1c * 1e-3, g.g_2c * 1e-3);
    let (d1, d2) = (w1 - omega_c, w2 - omega_c);
    Ok(EffectiveModel {
        omega_c,
        omega_1_t: w1 + g1 * g1 / d1,
        omega_2_t: w2 + g2 * g2 / d2,
        k,
        alpha_2_t: -spec.transmon.e_c,
        g_t: effective_coupling(w1, w2, omega_c, &g, opts.counter_rotating),
        delta_1: d1,
        delta_2: d2,
        dispersive: g1 / d1.abs() <= 0.1 && g2 / d2.abs() <= 0.1,
    })
}

/// `2 g~` sampled over coupler frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingCurve {
    pub omega_c: Vec<f64>,
    /// MHz.
    pub two_g: Vec<f64>,
    /// Adjacent grid intervals with a sign change and no pole inside.
    pub brackets: Vec<(f64, f64)>,
}

pub fn effective_coupling_curve(spec: &CircuitSpec, grid: &[f64], opts: &EffectiveOptions) -> Result<CouplingCurve> {
    let (w1, w2) = (spec.omega_1(), spec.omega_2());
    let two_g = grid
        .iter()
        .map(|&wc| {
            check_resonance(w1, w2, wc)?;
            Ok(2.0 * effective_coupling(w1, w2, wc, &couplings_at(spec, wc, opts)?, opts.counter_rotating))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut brackets = Vec::new();
    for i in 1..grid.len() {
        let (a, b) = (grid[i - 1], grid[i]);
        let pole = [w1, w2].iter().any(|&w| (a.min(b)..=a.max(b)).contains(&w));
        if !pole && two_g[i - 1] * two_g[i] <= 0.0 {
            brackets.push((a, b));
        }
    }
    Ok(CouplingCurve {
        omega_c: grid.to_vec(),
        two_g,
        brackets,
    })
}

/// Evenly spaced grid `lo..=hi` with `n` points.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// [`linspace`] with points within 2 MHz of a qubit frequency pushed
/// 2 MHz away from it, so the dispersive formulas stay finite.
pub fn off_pole_grid(spec: &CircuitSpec, lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let mut grid = linspace(lo, hi, n);
    for x in grid.iter_mut() {
        for w in [spec.omega_1(), spec.omega_2()] {
            if (*x - w).abs() < 2e-3 {
                *x = if *x >= w { w + 2e-3 } else { w - 2e-3 };
            }
        }
    }
    grid
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroCoupling {
    pub omega_c_star: f64,
    /// `|g~|` at the root (MHz).
    pub residual: f64,
    pub bracket: (f64, f64),
}

pub const ZERO_SEARCH_POINTS: usize = 400;

/// Coupler frequency where the effective coupling vanishes: first
/// pole-free sign change on a grid over `[lo, hi]`, then bisection.
pub fn find_zero_coupling(spec: &CircuitSpec, lo: f64, hi: f64, opts: &EffectiveOptions) -> Result<ZeroCoupling> {
    let grid = off_pole_grid(spec, lo, hi, ZERO_SEARCH_POINTS);
    let (w1, w2) = (spec.omega_1(), spec.omega_2());
    let curve = effective_coupling_curve(spec, &grid, opts)?;
    let Some(&bracket) = curve.brackets.first() else {
        let (gmin, gmax) = curve
            .two_g
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        return Err(Error::ZeroNotFound {
            lo,
            hi,
            summary: format!("2g~ ranges over [{gmin:.6}, {gmax:.6}] MHz with no pole-free sign change"),
        });
    };
    let f = |wc: f64| -> Result<f64> {
        Ok(effective_coupling(w1, w2, wc, &couplings_at(spec, wc, opts)?, opts.counter_rotating))
    };
    let (mut a, mut b) = bracket;
    let fa = f(a)?;
    if fa == 0.0 {
        b = a;
    }
    // Sign decisions only, so the root is invariant under uniform scaling of g.
    while (b - a).abs() > 1e-13 {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        let fm = f(m)?;
        if fm == 0.0 {
            a = m;
            b = m;
            break;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    let root = 0.5 * (a + b);
    let residual = f(root)?.abs();
    if residual >= 1e-3 {
        return Err(Error::Numerical(format!(
            "bisection stalled at {root} GHz with |g~| = {residual} MHz"
        )));
    }
    Ok(ZeroCoupling {
        omega_c_star: root,
        residual,
        bracket,
    })
}

/// Diagnostics of the Schrieffer-Wolff reduction on an oscillator model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwtReport {
    pub omega_c: f64,
    /// Largest coupling between zero- and one-coupler-excitation states in
    /// the single-excitation manifold, before and after the transform (MHz).
    pub off_block_before: f64,
    pub off_block_after: f64,
    /// Dressed qubit levels of the three-mode model (GHz, ground-referenced).
    pub dressed: [f64; 2],
    /// Eigenvalues of the effective two-qubit exchange block (GHz).
    pub effective: [f64; 2],
    /// Largest difference between the two (MHz).
    pub mismatch: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwtOptions {
    /// Oscillator levels per mode.
    pub levels: usize,
    /// Keep the `a_dag c_dag + a c` terms in the coupling.
    pub counter_rotating: bool,
}

impl Default for SwtOptions {
    fn default() -> Self {
        Self {
            levels: 4,
            counter_rotating: false,
        }
    }
}

/// Applies the leading-order transform to an oscillator model of the
/// three modes (order fluxonium, coupler, transmon) and compares it with the
/// effective parameters.
pub fn swt_verify(spec: &CircuitSpec, omega_c: f64, opts: &SwtOptions) -> Result<SwtReport> {
    let eff = effective_parameters(spec, omega_c)?;
    let (w1, w2) = (spec.omega_1(), spec.omega_2());
    let n = opts.levels.max(2);
    let dims = [n, n, n];
    let a = lowering(n);
    let ops: Vec<CMatrix> = (0..3).map(|s| embed(&a, s, &dims)).collect();
    let (a1, ac, a2) = (&ops[0], &ops[1], &ops[2]);
    let num = |x: &CMatrix| x.adjoint() * x;
    let kerr = |x: &CMatrix| x.adjoint() * x.adjoint() * x * x;
    let g = spec.couplings;
    let (g1, g2, g12) = (g.g_1c * 1e-3, g.g_2c * 1e-3, g.g_12 * 1e-3);
    let exchange = |x: &CMatrix, y: &CMatrix| {
        let mut t = x.adjoint() * y + x * y.adjoint();
        if opts.counter_rotating {
            t -= x.adjoint() * y.adjoint() + x * y;
        }
        t
    };
    let h = num(a1) * C64::from(w1)
        + kerr(a1) * C64::from(0.5e-3 * eff.k)
        + num(ac) * C64::from(omega_c)
        - kerr(ac) * C64::from(0.5 * spec.coupler.e_c)
        + num(a2) * C64::from(w2)
        - kerr(a2) * C64::from(0.5 * spec.transmon.e_c)
        + exchange(a1, ac) * C64::from(g1)
        + exchange(a2, ac) * C64::from(g2)
        + exchange(a1, a2) * C64::from(g12);

    // U = exp(S), S = sum_j (g_j/Delta_j)(a_j^dag c - a_j c^dag); S = -iA.
    let s = (a1.adjoint() * ac - a1 * ac.adjoint()) * C64::from(g1 / eff.delta_1)
        + (a2.adjoint() * ac - a2 * ac.adjoint()) * C64::from(g2 / eff.delta_2);
    let generator = &s * I;
    let u = expm_hermitian(&generator, 1.0);
    let h_t = &u * &h * u.adjoint();

    let off_block = |m: &CMatrix| {
        let dim = m.nrows();
        let mut worst: f64 = 0.0;
        for i in 0..dim {
            let li = multi_index(i, &dims);
            if li.iter().sum::<usize>() > 1 || li[1] != 0 {
                continue;
            }
            for j in 0..dim {
                let lj = multi_index(j, &dims);
                if lj.iter().sum::<usize>() == 1 && lj[1] == 1 {
                    worst = worst.max(m[(i, j)].norm());
                }
            }
        }
        1e3 * worst
    };

    let e = eigh(&h);
    let e0 = e.values[0];
    let pick = |label: [usize; 3]| {
        let idx = flat_index(&label, &dims);
        let k = (0..e.values.len())
            .max_by(|&x, &y| e.vectors[(idx, x)].norm_sqr().total_cmp(&e.vectors[(idx, y)].norm_sqr()))
            .expect("non-empty");
        e.values[k] - e0
    };
    let mut dressed = [pick([1, 0, 0]), pick([0, 0, 1])];
    dressed.sort_by(f64::total_cmp);
    let block = CMatrix::from_row_slice(
        2,
        2,
        &[
            C64::from(eff.omega_1_t),
            C64::from(1e-3 * eff.g_t),
            C64::from(1e-3 * eff.g_t),
            C64::from(eff.omega_2_t),
        ],
    );
    let eb = eigh(&block);
    let effective = [eb.values[0], eb.values[1]];
    let mismatch = 1e3 * (dressed[0] - effective[0]).abs().max((dressed[1] - effective[1]).abs());
    Ok(SwtReport {
        omega_c,
        off_block_before: off_block(&h),
        off_block_after: off_block(&h_t),
        dressed,
        effective,
        mismatch,
    })
}
