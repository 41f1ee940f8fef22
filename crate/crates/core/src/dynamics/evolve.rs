//! Fixed-step propagation: midpoint exponential for the Schrodinger equation
//! and a symmetric split step for the Lindblad equation.

use crate::error::{Error, Result};
use crate::linalg::{eigh, expm_hermitian, hermitian_part, norm_inf, trace, CMatrix, CVector, C64, I, TWO_PI};

/// Largest allowed `2*pi*|H|*dt`.
pub const STEP_LIMIT: f64 = 0.1;

/// Uniform grid `t0 + k*dt`, `k = 0..=steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t0: f64,
    pub dt: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, t1: f64, steps: usize) -> Result<Self> {
        if steps == 0 || !(t1 > t0) {
            return Err(Error::invariant("time grid: steps > 0 and t1 > t0", format!("[{t0}, {t1}] / {steps}")));
        }
        Ok(Self {
            t0,
            dt: (t1 - t0) / steps as f64,
            steps,
        })
    }

    /// Grid over `[t0, t1]` with step at most `max_dt`.
    pub fn with_max_step(t0: f64, t1: f64, max_dt: f64) -> Result<Self> {
        let steps = ((t1 - t0) / max_dt).ceil().max(1.0) as usize;
        Self::new(t0, t1, steps)
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + self.dt * k as f64
    }

    pub fn midpoint(&self, k: usize) -> f64 {
        self.t0 + self.dt * (k as f64 + 0.5)
    }

    pub fn end(&self) -> f64 {
        self.time(self.steps)
    }

    pub fn halved(&self) -> Self {
        Self {
            dt: 0.5 * self.dt,
            steps: 2 * self.steps,
            ..*self
        }
    }
}

/// Evolved state: a ket or a density matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Ket(CVector),
    Density(CMatrix),
}

impl State {
    pub fn dim(&self) -> usize {
        match self {
            State::Ket(v) => v.len(),
            State::Density(m) => m.nrows(),
        }
    }

    pub fn density(&self) -> CMatrix {
        match self {
            State::Ket(v) => v * v.adjoint(),
            State::Density(m) => m.clone(),
        }
    }

    /// Diagonal of the density matrix.
    pub fn populations(&self) -> Vec<f64> {
        match self {
            State::Ket(v) => v.iter().map(|z| z.norm_sqr()).collect(),
            State::Density(m) => m.diagonal().iter().map(|z| z.re).collect(),
        }
    }
}

/// States recorded at selected grid times.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<State>,
}

impl Trajectory {
    pub fn last(&self) -> &State {
        self.states.last().expect("trajectory has at least the initial state")
    }
}

/// Rejects grids whose step violates the step-size rule at any midpoint.
pub fn check_step(h: &impl Fn(f64) -> CMatrix, grid: &TimeGrid) -> Result<()> {
    let mut worst: f64 = 0.0;
    for k in 0..grid.steps {
        worst = worst.max(norm_inf(&h(grid.midpoint(k))));
    }
    let phase = TWO_PI * worst * grid.dt;
    if phase >= STEP_LIMIT {
        return Err(Error::StepSize {
            phase,
            limit: STEP_LIMIT,
        });
    }
    Ok(())
}

/// Step propagator `exp(-i 2 pi H(t + dt/2) dt)`.
fn step_unitary(h: &impl Fn(f64) -> CMatrix, grid: &TimeGrid, k: usize) -> CMatrix {
    expm_hermitian(&h(grid.midpoint(k)), TWO_PI * grid.dt)
}

/// Propagates the columns of `psi0` together. `observe(k, t, psi)` is
/// called at the initial time and after every step.
pub fn evolve_columns(
    h: impl Fn(f64) -> CMatrix,
    psi0: &CMatrix,
    grid: &TimeGrid,
    mut observe: impl FnMut(usize, f64, &CMatrix),
) -> Result<CMatrix> {
    check_step(&h, grid)?;
    let mut psi = psi0.clone();
    observe(0, grid.t0, &psi);
    for k in 0..grid.steps {
        psi = step_unitary(&h, grid, k) * psi;
        observe(k + 1, grid.time(k + 1), &psi);
    }
    Ok(psi)
}

/// Full propagator over the grid.
pub fn propagator(h: impl Fn(f64) -> CMatrix, dim: usize, grid: &TimeGrid) -> Result<CMatrix> {
    evolve_columns(h, &CMatrix::identity(dim, dim), grid, |_, _, _| {})
}

/// Unitary evolution of a ket; records every `stride`-th step and the end.
pub fn evolve_unitary(h: impl Fn(f64) -> CMatrix, psi0: &CVector, grid: &TimeGrid, stride: usize) -> Result<Trajectory> {
    let stride = stride.max(1);
    let mut traj = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
    };
    let m = CMatrix::from_column_slice(psi0.len(), 1, psi0.as_slice());
    evolve_columns(h, &m, grid, |k, t, psi| {
        if k % stride == 0 || k == grid.steps {
            traj.times.push(t);
            traj.states.push(State::Ket(psi.column(0).into_owned()));
        }
    })?;
    Ok(traj)
}

/// Dissipator `sum_k L rho L^dag - {L^dag L, rho}/2` (rates in 1/ns).
fn dissipator(ls: &[CMatrix], ldl: &[CMatrix], rho: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(rho.nrows(), rho.ncols());
    for (l, ll) in ls.iter().zip(ldl) {
        out += l * rho * l.adjoint();
        out -= (ll * rho + rho * ll) * C64::new(0.5, 0.0);
    }
    out
}

fn dissipate(ls: &[CMatrix], ldl: &[CMatrix], rho: &CMatrix, tau: f64) -> CMatrix {
    if ls.is_empty() {
        return rho.clone();
    }
    let half = C64::new(0.5 * tau, 0.0);
    let k1 = dissipator(ls, ldl, rho);
    let k2 = dissipator(ls, ldl, &(rho + &k1 * half));
    let k3 = dissipator(ls, ldl, &(rho + &k2 * half));
    let k4 = dissipator(ls, ldl, &(rho + &k3 * C64::new(tau, 0.0)));
    rho + (k1 + (k2 + k3) * C64::new(2.0, 0.0) + k4) * C64::new(tau / 6.0, 0.0)
}

/// Result of a master-equation run.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladRun {
    pub trajectory: Trajectory,
    /// Most negative eigenvalue of rho seen at the recorded times.
    pub min_eigenvalue: f64,
    /// Set when `min_eigenvalue < -1e-7`.
    pub positivity_warning: bool,
}

/// Lindblad evolution: half dissipator (RK4), unitary step, half dissipator.
/// `collapse` operators carry their rates (`sqrt(rate) * L`, rate in 1/ns).
pub fn evolve_lindblad(
    h: impl Fn(f64) -> CMatrix,
    rho0: &CMatrix,
    collapse: &[CMatrix],
    grid: &TimeGrid,
    stride: usize,
) -> Result<LindbladRun> {
    check_step(&h, grid)?;
    for l in collapse {
        if l.nrows() != rho0.nrows() {
            return Err(Error::Numerical("collapse operator dimension mismatch".into()));
        }
    }
    let stride = stride.max(1);
    let ldl: Vec<CMatrix> = collapse.iter().map(|l| l.adjoint() * l).collect();
    let mut rho = rho0.clone();
    let mut traj = Trajectory {
        times: vec![grid.t0],
        states: vec![State::Density(rho.clone())],
    };
    let mut min_eig = eigh(&rho).values[0];
    for k in 0..grid.steps {
        rho = dissipate(collapse, &ldl, &rho, 0.5 * grid.dt);
        let u = step_unitary(&h, grid, k);
        rho = &u * rho * u.adjoint();
        rho = dissipate(collapse, &ldl, &rho, 0.5 * grid.dt);
        rho = hermitian_part(&rho);
        if (k + 1) % stride == 0 || k + 1 == grid.steps {
            min_eig = min_eig.min(eigh(&rho).values[0]);
            traj.times.push(grid.time(k + 1));
            traj.states.push(State::Density(rho.clone()));
        }
    }
    Ok(LindbladRun {
        trajectory: traj,
        min_eigenvalue: min_eig,
        positivity_warning: min_eig < -1e-7,
    })
}

/// `tr(rho)` as a real number.
pub fn real_trace(rho: &CMatrix) -> f64 {
    trace(rho).re
}

/// `exp(+i 2 pi D T)`-style diagonal frame factor for accumulated phases.
pub fn frame_phases(phases: &[f64]) -> CMatrix {
    let n = phases.len();
    let mut m = CMatrix::zeros(n, n);
    for (k, &p) in phases.iter().enumerate() {
        m[(k, k)] = (I * (TWO_PI * p)).exp();
    }
    m
}
