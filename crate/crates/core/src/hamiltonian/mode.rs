//! Single-mode operators and Hamiltonians.

use crate::circuit::{FluxoniumParams, TransmonParams};
use crate::error::{Error, Result};
use crate::linalg::{eigh, from_eigh, CMatrix, Operator, C64, I, ONE, ZERO};

/// Ladder and quadrature operators of one truncated oscillator.
#[derive(Debug, Clone)]
pub struct ModeOperators {
    pub a: CMatrix,
    pub a_dag: CMatrix,
    pub n: CMatrix,
    pub phi: CMatrix,
}

/// Lowering operator with `a|k> = sqrt(k)|k-1>`.
///
/// On the truncated space `[a, a_dag]` equals the identity except for the
/// top level, where it is `1 - dim`.
pub fn lowering(dim: usize) -> CMatrix {
    let mut a = CMatrix::zeros(dim, dim);
    for k in 1..dim {
        a[(k - 1, k)] = C64::new((k as f64).sqrt(), 0.0);
    }
    a
}

/// Operators for a mode with charging energy `e_c` and inductive (or
/// Josephson) energy `e_ind`:
/// `phi = (2 E_C/E)^(1/4) (a_dag + a)`, `n = (i/2) (E/2 E_C)^(1/4) (a_dag - a)`.
pub fn mode_operators(dim: usize, e_c: f64, e_ind: f64) -> Result<ModeOperators> {
    if dim < 2 {
        return Err(Error::invariant("basis size >= 2", format!("got {dim}")));
    }
    if !(e_c > 0.0 && e_ind > 0.0) {
        return Err(Error::invariant(
            "mode energies > 0",
            format!("E_C = {e_c}, E = {e_ind}"),
        ));
    }
    let a = lowering(dim);
    let a_dag = a.adjoint();
    let phi_zpf = (2.0 * e_c / e_ind).powf(0.25);
    let n_zpf = 0.5 * (e_ind / (2.0 * e_c)).powf(0.25);
    let phi = (&a_dag + &a) * C64::new(phi_zpf, 0.0);
    let n = (&a_dag - &a) * (I * n_zpf);
    Ok(ModeOperators { a, a_dag, n, phi })
}

/// `cos(phi)` and `sin(phi)` of a Hermitian phase operator, exact in the
/// truncated space.
pub fn cos_sin(phi: &CMatrix) -> (CMatrix, CMatrix) {
    let e = eigh(phi);
    let c = from_eigh(&e, |x| C64::new(x.cos(), 0.0));
    let s = from_eigh(&e, |x| C64::new(x.sin(), 0.0));
    (c, s)
}

/// Fluxonium Hamiltonian in the harmonic basis of its LC part.
pub fn fluxonium_hamiltonian(p: &FluxoniumParams, basis: usize) -> Result<Operator> {
    let ops = mode_operators(basis, p.e_c, p.e_l)?;
    let omega_lc = (8.0 * p.e_c * p.e_l).sqrt();
    let mut h = CMatrix::zeros(basis, basis);
    // 4 E_C n^2 + E_L phi^2 / 2 written as an exact oscillator so the top
    // Fock level carries no truncation artifact.
    for k in 0..basis {
        h[(k, k)] = C64::new(omega_lc * (k as f64 + 0.5), 0.0);
    }
    let (cos_phi, sin_phi) = cos_sin(&ops.phi);
    let phi_ext = p.phi_ext();
    // cos(phi_ext - phi) = cos(phi_ext) cos(phi) + sin(phi_ext) sin(phi)
    let junctions = &cos_phi * C64::new(p.beta * p.e_j + p.e_j * phi_ext.cos(), 0.0)
        + &sin_phi * C64::new(p.e_j * phi_ext.sin(), 0.0);
    h -= junctions;
    Ok(Operator::single(crate::linalg::hermitian_part(&h), "fluxonium"))
}

/// Charge operator `n - n_g` on the basis `n = -n_cut..=n_cut`.
pub fn charge_operator(n_cut: usize, n_g: f64) -> CMatrix {
    let dim = 2 * n_cut + 1;
    let mut m = CMatrix::zeros(dim, dim);
    for k in 0..dim {
        m[(k, k)] = C64::new(k as f64 - n_cut as f64 - n_g, 0.0);
    }
    m
}

/// Transmon Hamiltonian in the charge basis:
/// `4 E_C (n - n_g)^2 - (E_J/2) sum |n><n+1| + h.c.`
pub fn transmon_hamiltonian(p: &TransmonParams, n_cut: usize) -> Result<Operator> {
    if n_cut < 1 {
        return Err(Error::invariant("charge cutoff >= 1", format!("got {n_cut}")));
    }
    let dim = 2 * n_cut + 1;
    let mut h = CMatrix::zeros(dim, dim);
    for k in 0..dim {
        let q = k as f64 - n_cut as f64 - p.n_g;
        h[(k, k)] = C64::new(4.0 * p.e_c * q * q, 0.0);
        if k + 1 < dim {
            h[(k, k + 1)] = C64::new(-0.5 * p.e_j, 0.0);
            h[(k + 1, k)] = C64::new(-0.5 * p.e_j, 0.0);
        }
    }
    Ok(Operator::single(h, "transmon"))
}

/// Lowest `k` eigenvalues (GHz, absolute) of a Hermitian operator.
pub fn lowest(h: &Operator, k: usize) -> Vec<f64> {
    let e = eigh(&h.data);
    e.values.into_iter().take(k).collect()
}

/// Fluxonium 0-1 transition frequency (GHz).
pub fn fluxonium_frequency(p: &FluxoniumParams, basis: usize) -> f64 {
    let e = lowest(&fluxonium_hamiltonian(p, basis).expect("validated params"), 2);
    e[1] - e[0]
}

/// Transmon-type 0-1 transition frequency (GHz).
pub fn transmon_frequency(p: &TransmonParams, n_cut: usize) -> f64 {
    let e = lowest(&transmon_hamiltonian(p, n_cut).expect("validated params"), 2);
    e[1] - e[0]
}

/// Basis-size convergence of the lowest levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Convergence {
    /// Largest shift of the checked levels when the basis grows by 10.
    pub max_shift: f64,
    pub converged: bool,
}

pub const CONVERGENCE_TOL: f64 = 1e-6;

fn convergence(a: &[f64], b: &[f64]) -> Convergence {
    let max_shift = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    Convergence {
        max_shift,
        converged: max_shift <= CONVERGENCE_TOL,
    }
}

/// Compares the lowest `levels` fluxonium eigenvalues at `basis` and `basis + 10`.
pub fn fluxonium_convergence(p: &FluxoniumParams, basis: usize, levels: usize) -> Result<Convergence> {
    let a = lowest(&fluxonium_hamiltonian(p, basis)?, levels);
    let b = lowest(&fluxonium_hamiltonian(p, basis + 10)?, levels);
    Ok(convergence(&a, &b))
}

pub fn transmon_convergence(p: &TransmonParams, n_cut: usize, levels: usize) -> Result<Convergence> {
    let a = lowest(&transmon_hamiltonian(p, n_cut)?, levels);
    let b = lowest(&transmon_hamiltonian(p, n_cut + 10)?, levels);
    Ok(convergence(&a, &b))
}

/// Josephson energy that puts a transmon-type mode's exact 0-1 transition
/// at `omega` (GHz). Bisection to 1e-9 GHz.
pub fn e_j_for_frequency(p: &TransmonParams, omega: f64, n_cut: usize) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::invariant("target frequency > 0", format!("got {omega}")));
    }
    let f = |e_j: f64| transmon_frequency(&p.with_e_j(e_j), n_cut) - omega;
    // The plasma estimate brackets the root from both sides comfortably.
    let guess = (omega + p.e_c).powi(2) / (8.0 * p.e_c);
    let mut lo = (0.5 * guess).max(1.0001 * p.e_c);
    let mut hi = 2.0 * guess + 10.0 * p.e_c;
    if f(lo) > 0.0 || f(hi) < 0.0 {
        return Err(Error::Numerical(format!(
            "cannot reach {omega} GHz with E_C = {} in the transmon regime",
            p.e_c
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if f(hi) - f(lo) < 1e-9 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Diagonalized single mode truncated to `levels` states.
#[derive(Debug, Clone)]
pub struct DressedMode {
    /// Energies relative to the mode ground state (GHz).
    pub energies: Vec<f64>,
    /// Charge operator in the eigenbasis, scaled so `|<0|N|1>| = 1`.
    pub charge: CMatrix,
    /// Unscaled `|<0|n|1>|`.
    pub charge_scale: f64,
}

fn dress(h: &CMatrix, n_op: &CMatrix, levels: usize) -> Result<DressedMode> {
    let e = eigh(h);
    if levels > e.values.len() {
        return Err(Error::invariant(
            "levels <= basis size",
            format!("{levels} > {}", e.values.len()),
        ));
    }
    let v = e.vectors.columns(0, levels).into_owned();
    let n = v.adjoint() * n_op * &v;
    let scale = n[(0, 1)].norm();
    if !(scale > 0.0) {
        return Err(Error::Numerical("vanishing 0-1 charge matrix element".into()));
    }
    let charge = n.map(|z| z / scale);
    let e0 = e.values[0];
    Ok(DressedMode {
        energies: e.values[..levels].iter().map(|x| x - e0).collect(),
        charge: crate::linalg::hermitian_part(&charge),
        charge_scale: scale,
    })
}

pub fn dress_fluxonium(p: &FluxoniumParams, basis: usize, levels: usize) -> Result<DressedMode> {
    let h = fluxonium_hamiltonian(p, basis)?;
    let ops = mode_operators(basis, p.e_c, p.e_l)?;
    dress(&h.data, &ops.n, levels)
}

pub fn dress_transmon(p: &TransmonParams, n_cut: usize, levels: usize) -> Result<DressedMode> {
    let h = transmon_hamiltonian(p, n_cut)?;
    dress(&h.data, &charge_operator(n_cut, p.n_g), levels)
}

/// Diagonal operator from a list of energies.
pub fn diagonal(values: &[f64]) -> CMatrix {
    let n = values.len();
    let mut m = CMatrix::from_element(n, n, ZERO);
    for (k, &v) in values.iter().enumerate() {
        m[(k, k)] = ONE * v;
    }
    m
}
