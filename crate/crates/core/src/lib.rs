//! Simulation toolkit for a fluxonium and a transmon joined by a tunable
//! transmon coupler.
//!
//! Units: frequencies and energies in GHz (linear, `E/h`), coupling
//! strengths and Kerr coefficients in MHz, times in ns. Factors of `2*pi`
//! appear only inside propagators.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circuit;
pub mod cli;
pub mod cat;
pub mod dynamics;
pub mod effective;
pub mod error;
pub mod hamiltonian;
pub mod linalg;
pub mod output;

pub use circuit::{parse_config, CircuitSpec};
pub use error::{Error, Result};
