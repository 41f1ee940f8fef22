//! Uhlmann fidelity and the target gates.

use crate::error::{Error, Result};
use crate::linalg::{sqrtm_psd, trace, CMatrix, CVector, C64, I, ONE, TWO_PI, ZERO};

use super::evolve::State;

fn check_trace(s: &State) -> Result<()> {
    let tr = match s {
        State::Ket(v) => v.norm_squared(),
        State::Density(m) => trace(m).re,
    };
    if (tr - 1.0).abs() > 1e-6 {
        return Err(Error::Numerical(format!("state trace {tr} differs from 1")));
    }
    Ok(())
}

/// `F(rho, sigma) = tr sqrt(sqrt(rho) sigma sqrt(rho))`, which is `|<a|b>|`
/// for pure states.
pub fn state_fidelity(a: &State, b: &State) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::Numerical(format!("dimension mismatch {} vs {}", a.dim(), b.dim())));
    }
    check_trace(a)?;
    check_trace(b)?;
    let f = match (a, b) {
        (State::Ket(x), State::Ket(y)) => x.dotc(y).norm(),
        (State::Ket(x), State::Density(r)) | (State::Density(r), State::Ket(x)) => {
            (x.adjoint() * r * x)[(0, 0)].re.max(0.0).sqrt()
        }
        (State::Density(r), State::Density(s)) => {
            let sr = sqrtm_psd(r);
            let inner = &sr * s * &sr;
            trace(&sqrtm_psd(&crate::linalg::hermitian_part(&inner))).re
        }
    };
    Ok(f.clamp(0.0, 1.0))
}

pub fn ket_fidelity(a: &CVector, b: &CVector) -> f64 {
    a.dotc(b).norm().min(1.0)
}

/// Exchange propagator `exp(-i 2 pi g t (|01><10| + |10><01|))` on two qubits
/// (`g` in MHz, `t` in ns).
pub fn iswap_unitary(g_mhz: f64, t_ns: f64) -> CMatrix {
    let theta = TWO_PI * g_mhz * 1e-3 * t_ns;
    let (c, s) = (theta.cos(), theta.sin());
    let mut u = CMatrix::zeros(4, 4);
    u[(0, 0)] = ONE;
    u[(3, 3)] = ONE;
    u[(1, 1)] = C64::new(c, 0.0);
    u[(2, 2)] = C64::new(c, 0.0);
    u[(1, 2)] = -I * s;
    u[(2, 1)] = -I * s;
    u
}

/// The iSWAP gate.
pub fn iswap() -> CMatrix {
    CMatrix::from_row_slice(
        4,
        4,
        &[
            ONE, ZERO, ZERO, ZERO, //
            ZERO, ZERO, -I, ZERO, //
            ZERO, -I, ZERO, ZERO, //
            ZERO, ZERO, ZERO, ONE,
        ],
    )
}

/// `exp(-i pi/4 sigma_x)`.
pub fn x_half_pi() -> CMatrix {
    let r = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    CMatrix::from_row_slice(2, 2, &[r, -I * r, -I * r, r])
}

/// Average gate fidelity of `u` against `target` on a `d`-dimensional
/// subspace, insensitive to a global phase.
pub fn average_gate_fidelity(u: &CMatrix, target: &CMatrix) -> f64 {
    let d = target.nrows() as f64;
    let m = target.adjoint() * u;
    let tr = trace(&m).norm_sqr();
    let tr_mm = trace(&(m.adjoint() * &m)).re;
    (tr_mm + tr) / (d * (d + 1.0))
}
