//! Time evolution, pulses, fidelities and gate protocols.

pub mod evolve;
pub mod fidelity;
pub mod gates;
pub mod noise;
pub mod pulse;

pub use evolve::{evolve_lindblad, evolve_unitary, propagator, State, TimeGrid, Trajectory};
pub use fidelity::{iswap, iswap_unitary, state_fidelity, x_half_pi};
pub use gates::{simulate_iswap, simulate_x_half_pi, Frame, GateResult, IswapOptions, X90Options};
pub use noise::collapse_ops_from_t;
pub use pulse::{PulseEnvelope, PulseSequence, Shape, Target};
