//! Three-mode Hamiltonian on fluxonium ⊗ coupler ⊗ transmon.
//!
//! Each mode is diagonalized on its own and truncated to the configured
//! number of levels; the product of those eigenbases is the bare-state basis
//! `|Q1, C, Q2>`. Charge-charge couplings use the charge operators rotated
//! into that basis and scaled so that the 0-1 matrix element has modulus
//! one, which makes `g` the exchange rate between single excitations and
//! keeps the counter-rotating terms.

use crate::circuit::CircuitSpec;
use crate::error::{Error, Result};
use crate::linalg::{embed, kron_all, CMatrix, Operator, C64};

use super::mode::{diagonal, dress_fluxonium, dress_transmon, DressedMode};

pub const DEFAULT_DIM_CAP: usize = 20_000;

pub const MODE_LABELS: [&str; 3] = ["fluxonium", "coupler", "transmon"];

/// Dressed modes plus the individual Hamiltonian terms (GHz).
#[derive(Debug, Clone)]
pub struct FullModel {
    pub dims: Vec<usize>,
    pub modes: Vec<DressedMode>,
    /// Named terms; their sum is the Hamiltonian.
    pub terms: Vec<(String, CMatrix)>,
}

impl FullModel {
    pub fn build(spec: &CircuitSpec, cap: usize) -> Result<Self> {
        let t = spec.truncation;
        let dims = vec![t.fluxonium, t.coupler, t.transmon];
        let dim: usize = dims.iter().product();
        if dim > cap {
            return Err(Error::DimensionOverflow { dim, cap });
        }
        let modes = vec![
            dress_fluxonium(&spec.fluxonium, t.fluxonium_basis, t.fluxonium)?,
            dress_transmon(&spec.coupler, t.charge_cutoff, t.coupler)?,
            dress_transmon(&spec.transmon, t.charge_cutoff, t.transmon)?,
        ];
        let mut terms = Vec::new();
        for (slot, m) in modes.iter().enumerate() {
            terms.push((
                MODE_LABELS[slot].to_string(),
                embed(&diagonal(&m.energies), slot, &dims),
            ));
        }
        let g = spec.couplings;
        for (name, strength, i, j) in [
            ("g_1c", g.g_1c, 0, 1),
            ("g_2c", g.g_2c, 2, 1),
            ("g_12", g.g_12, 0, 2),
        ] {
            terms.push((name.to_string(), coupling_term(&modes, &dims, i, j, strength * 1e-3)));
        }
        Ok(Self { dims, modes, terms })
    }

    pub fn hamiltonian(&self) -> Operator {
        let n: usize = self.dims.iter().product();
        let mut h = CMatrix::zeros(n, n);
        for (_, t) in &self.terms {
            h += t;
        }
        Operator {
            data: h,
            dims: self.dims.clone(),
            labels: MODE_LABELS.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn term(&self, name: &str) -> Option<&CMatrix> {
        self.terms.iter().find(|(n, _)| n == name).map(|(_, m)| m)
    }
}

fn coupling_term(modes: &[DressedMode], dims: &[usize], i: usize, j: usize, g_ghz: f64) -> CMatrix {
    let eyes: Vec<CMatrix> = dims.iter().map(|&d| CMatrix::identity(d, d)).collect();
    let factors: Vec<&CMatrix> = (0..dims.len())
        .map(|k| {
            if k == i || k == j {
                &modes[k].charge
            } else {
                &eyes[k]
            }
        })
        .collect();
    kron_all(&factors) * C64::new(g_ghz, 0.0)
}

/// Full Hamiltonian with the default dimension cap.
pub fn full_hamiltonian(spec: &CircuitSpec) -> Result<Operator> {
    full_hamiltonian_capped(spec, DEFAULT_DIM_CAP)
}

pub fn full_hamiltonian_capped(spec: &CircuitSpec, cap: usize) -> Result<Operator> {
    Ok(FullModel::build(spec, cap)?.hamiltonian())
}
