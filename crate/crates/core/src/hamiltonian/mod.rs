//! Single-mode and three-mode Hamiltonians, eigensystems and spectrum scans.

mod full;
mod mode;
mod spectrum;

pub use full::{full_hamiltonian, full_hamiltonian_capped, FullModel, DEFAULT_DIM_CAP, MODE_LABELS};
pub use mode::{
    charge_operator, cos_sin, dress_fluxonium, dress_transmon, e_j_for_frequency,
    fluxonium_convergence, fluxonium_frequency, fluxonium_hamiltonian, lowering, lowest,
    mode_operators, transmon_convergence, transmon_frequency, transmon_hamiltonian, Convergence,
    DressedMode, ModeOperators, CONVERGENCE_TOL,
};
pub use spectrum::{
    coupler_leakage, eigensystem, find_anticrossings, golden_min, label_string, labeled_gap, spectrum_scan,
    Anticrossing, Eigensystem, ScanOptions, Scope, SpectrumTable, SweepParam,
};
