//! Master-equation evolution of a driven, decaying qubit.

use ftt_sim::circuit::CoherenceTimes;
use ftt_sim::dynamics::{collapse_ops_from_t, evolve_lindblad, State, TimeGrid};
use ftt_sim::hamiltonian::lowering;
use ftt_sim::linalg::{CMatrix, C64};

fn main() -> ftt_sim::Result<()> {
    // Rabi drive of 10 MHz in the rotating frame, T1 = 200 ns, T2 = 150 ns.
    let a = lowering(2);
    let h = (&a + a.adjoint()) * C64::new(-0.01, 0.0);
    let ops = collapse_ops_from_t(&CoherenceTimes { t1_ms: 2e-4, t2_ms: 1.5e-4 }, &a)?;
    let rho0 = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]));
    let grid = TimeGrid::new(0.0, 400.0, 4000)?;
    let run = evolve_lindblad(|_| h.clone(), &rho0, &ops, &grid, 400)?;
    for (t, s) in run.trajectory.times.iter().zip(&run.trajectory.states) {
        if let State::Density(rho) = s {
            println!("t = {t:5.0} ns  P1 = {:.4}  |rho01| = {:.4}", rho[(1, 1)].re, rho[(0, 1)].norm());
        }
    }
    println!("smallest eigenvalue seen {:.2e}", run.min_eigenvalue);
    Ok(())
}
