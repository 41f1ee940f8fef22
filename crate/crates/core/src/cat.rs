//! Kerr cat states, Wigner functions and cat correlation maps.
//!
//! Kerr coefficients are linear frequencies in MHz; a Fock level `n`
//! acquires the phase `exp(i pi K n^2 t)`, so `tau_0 = 1/|K|`.

use rayon::prelude::*;

use crate::circuit::{CircuitSpec, FluxoniumParams};
use crate::dynamics::{PulseEnvelope, PulseSequence, Shape, Target};
use crate::effective::{kerr_scan, KerrEcSource, KERR_SCAN_POINTS};
use crate::error::{Error, Result};
use crate::hamiltonian::{lowering, transmon_frequency};
use crate::linalg::{expm_hermitian, CMatrix, CVector, C64, I, TWO_PI, ZERO};

/// Tolerated population in the top Fock level.
pub const TAIL_TOLERANCE: f64 = 1e-8;

/// Smallest admissible truncation for a coherent amplitude `alpha`.
pub fn minimum_truncation(alpha: C64) -> usize {
    let n = alpha.norm_sqr();
    (n + 6.0 * (n + 1.0).sqrt()).floor() as usize + 1
}

fn check_truncation(alpha: C64, n: usize) -> Result<()> {
    let need = minimum_truncation(alpha);
    if n < need {
        return Err(Error::Truncation { n, suggested: need.max(40) });
    }
    Ok(())
}

/// State vector in a truncated Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    pub amplitudes: CVector,
}

impl FockState {
    pub fn new(amplitudes: CVector) -> Self {
        Self { amplitudes }
    }

    pub fn vacuum(n: usize) -> Self {
        let mut a = CVector::zeros(n);
        a[0] = C64::new(1.0, 0.0);
        Self { amplitudes: a }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// Population of the highest retained level.
    pub fn tail_mass(&self) -> f64 {
        self.amplitudes[self.dim() - 1].norm_sqr()
    }

    pub fn populations(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.populations().iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }

    /// `|<self|other>|`.
    pub fn overlap(&self, other: &FockState) -> f64 {
        self.amplitudes.dotc(&other.amplitudes).norm()
    }

    pub fn density(&self) -> CMatrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }
}

/// `e^{-|alpha|^2/2} sum alpha^n / sqrt(n!) |n>`, built by the ratio
/// recursion so no factorial is ever formed, and renormalized on the
/// `n` retained levels.
pub fn coherent_state(alpha: C64, n: usize) -> Result<FockState> {
    check_truncation(alpha, n)?;
    let mut a = CVector::zeros(n);
    a[0] = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for k in 1..n {
        a[k] = a[k - 1] * alpha / (k as f64).sqrt();
    }
    let norm = a.norm();
    Ok(FockState::new(a / C64::new(norm, 0.0)))
}

/// `exp(alpha a_dag - alpha* a)` on `n` Fock levels.
pub fn displacement_operator(alpha: C64, n: usize) -> Result<CMatrix> {
    check_truncation(alpha, n)?;
    let a = lowering(n);
    let generator = a.adjoint() * alpha - &a * alpha.conj();
    // exp(G) = exp(-i H) with H = i G Hermitian.
    Ok(expm_hermitian(&(generator * I), 1.0))
}

/// Multiplies the Fock amplitudes of `state` by `exp(i pi K n^2 t)`.
pub fn kerr_phase(state: &FockState, k_mhz: f64, t_ns: f64) -> FockState {
    let k = k_mhz * 1e-3;
    let a = CVector::from_iterator(
        state.dim(),
        state.amplitudes.iter().enumerate().map(|(n, c)| {
            let nf = n as f64;
            c * C64::from_polar(1.0, 0.5 * TWO_PI * k * nf * nf * t_ns)
        }),
    );
    FockState::new(a)
}

/// Coherent state `|alpha>` after Kerr evolution for `t_ns`.
pub fn kerr_evolve(alpha: C64, k_mhz: f64, t_ns: f64, n: usize) -> Result<FockState> {
    Ok(kerr_phase(&coherent_state(alpha, n)?, k_mhz, t_ns))
}

/// `tau_0 = 1/|K|` in ns.
pub fn revival_time(k_mhz: f64) -> f64 {
    1e3 / k_mhz.abs()
}

/// Analytic `m`-component cat reached from `|alpha>` at `t = tau_0/m`.
///
/// The Kerr phase `exp(i s pi n^2/m)` (`s` the sign of `K`) is periodic in
/// `n`; its discrete Fourier coefficients `c_j` give the cat as
/// `sum_j c_j |alpha e^{2 pi i j/P}>`.
pub fn ideal_cat(alpha: C64, m: usize, k_mhz: f64, n: usize) -> Result<FockState> {
    if !(2..=4).contains(&m) {
        return Err(Error::invariant("cat component count in {2, 3, 4}", format!("got {m}")));
    }
    let s = k_mhz.signum();
    let period = if m.is_multiple_of(2) { m } else { 2 * m };
    let phase = |k: usize| C64::from_polar(1.0, s * std::f64::consts::PI * (k * k) as f64 / m as f64);
    let mut out = CVector::zeros(n);
    for j in 0..period {
        let c: C64 = (0..period)
            .map(|k| phase(k) * C64::from_polar(1.0, -TWO_PI * (j * k) as f64 / period as f64))
            .sum::<C64>()
            / period as f64;
        if c.norm() < 1e-14 {
            continue;
        }
        let rotated = alpha * C64::from_polar(1.0, TWO_PI * j as f64 / period as f64);
        out += coherent_state(rotated, n)?.amplitudes * c;
    }
    let norm = out.norm();
    Ok(FockState::new(out / C64::new(norm, 0.0)))
}

/// Rectangular phase-space grid for `gamma = re + i im`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl Grid {
    /// `points x points` over `[-half, half]^2`.
    pub fn square(half: f64, points: usize) -> Self {
        let axis = crate::effective::linspace(-half, half, points);
        Self {
            re: axis.clone(),
            im: axis,
        }
    }

    /// Default field of view for a given amplitude: `|gamma| <= |alpha| + 4`
    /// on a 201-point axis.
    pub fn for_alpha(alpha: C64) -> Self {
        Self::square(alpha.norm() + 4.0, 201)
    }

    pub fn cell_area(&self) -> f64 {
        let step = |v: &[f64]| if v.len() > 1 { (v[v.len() - 1] - v[0]) / (v.len() - 1) as f64 } else { 1.0 };
        step(&self.re) * step(&self.im)
    }
}

/// `values[i][j]` is `W(re[j] + i im[i])`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerMap {
    pub grid: Grid,
    pub values: Vec<Vec<f64>>,
    /// Population of the top Fock level of the source state.
    pub tail_mass: f64,
}

impl WignerMap {
    pub fn integral(&self) -> f64 {
        self.values.iter().flatten().sum::<f64>() * self.grid.cell_area()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().flatten().copied().fold(f64::INFINITY, f64::min)
    }

    /// Warning text when the source state is not well truncated.
    pub fn warning(&self) -> Option<String> {
        (self.tail_mass >= TAIL_TOLERANCE)
            .then(|| format!("truncation inadequate: top Fock level holds {:.3e}", self.tail_mass))
    }
}

/// Wigner function at one point by the Laguerre recursion over the
/// displaced-parity matrix elements. Each element `W_mn(gamma)` of
/// `|m><n|` is generated from its neighbours, so large `n` stays stable.
fn wigner_point(rho: &CMatrix, gamma: C64, w: &mut [C64]) -> f64 {
    let n = rho.nrows();
    let two_g = gamma * 2.0;
    w[0] = C64::new(2.0 / std::f64::consts::PI * (-2.0 * gamma.norm_sqr()).exp(), 0.0);
    let mut total = rho[(0, 0)].re * w[0].re;
    for k in 1..n {
        w[k] = two_g * w[k - 1] / (k as f64).sqrt();
        total += 2.0 * (rho[(0, k)] * w[k]).re;
    }
    for m in 1..n {
        let sm = (m as f64).sqrt();
        let mut temp = w[m];
        w[m] = (two_g.conj() * temp - w[m - 1] * sm) / sm;
        total += (rho[(m, m)] * w[m]).re;
        for k in m + 1..n {
            let next = (two_g * w[k - 1] - temp * sm) / (k as f64).sqrt();
            temp = w[k];
            w[k] = next;
            total += 2.0 * (rho[(m, k)] * w[k]).re;
        }
    }
    total
}

/// Wigner function of a density matrix in the Fock basis.
pub fn wigner_density(rho: &CMatrix, grid: &Grid) -> WignerMap {
    let n = rho.nrows();
    let values = grid
        .im
        .par_iter()
        .map(|&y| {
            let mut scratch = vec![ZERO; n];
            grid.re.iter().map(|&x| wigner_point(rho, C64::new(x, y), &mut scratch)).collect()
        })
        .collect();
    WignerMap {
        grid: grid.clone(),
        values,
        tail_mass: rho[(n - 1, n - 1)].re.abs(),
    }
}

pub fn wigner(state: &FockState, grid: &Grid) -> WignerMap {
    wigner_density(&state.density(), grid)
}

/// Pointwise difference of two Wigner maps on the same grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMap {
    pub grid: Grid,
    pub values: Vec<Vec<f64>>,
}

impl CorrelationMap {
    pub fn difference(a: &WignerMap, b: &WignerMap) -> Result<Self> {
        if a.grid != b.grid {
            return Err(Error::invariant("correlation operands share a grid", "grids differ"));
        }
        let values = a
            .values
            .iter()
            .zip(&b.values)
            .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x - y).collect())
            .collect();
        Ok(Self {
            grid: a.grid.clone(),
            values,
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs()))
    }
}

/// Cat made from `|alpha>` by Kerr evolution for `tau_0/m`.
pub fn kerr_cat(alpha: C64, m: usize, k_mhz: f64, n: usize) -> Result<FockState> {
    if !(2..=4).contains(&m) {
        return Err(Error::invariant("cat component count in {2, 3, 4}", format!("got {m}")));
    }
    kerr_evolve(alpha, k_mhz, revival_time(k_mhz) / m as f64, n)
}

/// `W_m` at `alpha = sqrt(n+1)` minus `W_m` at `alpha = sqrt(n)`.
pub fn cat_correlation(photons: usize, m: usize, k_mhz: f64, grid: &Grid, fock: usize) -> Result<CorrelationMap> {
    if photons < 1 {
        return Err(Error::invariant("photon number >= 1", format!("got {photons}")));
    }
    let cat = |n: usize| kerr_cat(C64::new((n as f64).sqrt(), 0.0), m, k_mhz, fock);
    let upper = wigner(&cat(photons + 1)?, grid);
    let lower = wigner(&cat(photons)?, grid);
    CorrelationMap::difference(&upper, &lower)
}

/// How the Kerr coefficient of the protocol is obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KerrSetting {
    /// Use the value as given (MHz).
    Given(f64),
    /// Find a flux bias reaching the target on the `K(phi_ext)` scan of the
    /// fluxonium.
    Tuned { target_mhz: f64, fluxonium: FluxoniumParams },
}

impl KerrSetting {
    pub fn resolve(&self) -> Result<(f64, Option<f64>)> {
        match *self {
            KerrSetting::Given(k) => Ok((k, None)),
            KerrSetting::Tuned { target_mhz, fluxonium } => {
                let scan = kerr_scan(&fluxonium, KerrEcSource::Fluxonium, KERR_SCAN_POINTS)?;
                Ok((target_mhz, Some(scan.locate(target_mhz)?)))
            }
        }
    }
}

/// Waiting time between the two transmon pulses: half a period of the
/// dispersive shift `g_2c^2/Delta_2` (ns).
pub fn parity_interval(spec: &CircuitSpec) -> Result<f64> {
    let omega_c = spec
        .coupler
        .omega
        .unwrap_or_else(|| transmon_frequency(&spec.coupler, spec.truncation.charge_cutoff));
    let delta = spec.omega_2() - omega_c;
    if delta.abs() < 1e-3 {
        return Err(Error::Resonance { mode: 2, delta_ghz: delta });
    }
    let chi = (spec.couplings.g_2c * 1e-3).powi(2) / delta;
    Ok(1.0 / (2.0 * chi.abs()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TomographyProtocol {
    pub alpha: C64,
    pub gamma: C64,
    pub m: usize,
    pub k_mhz: f64,
    /// Flux bias reaching `k_mhz`, when tuned.
    pub phi_ext: Option<f64>,
    pub flux_width: f64,
    pub parity_interval: f64,
    pub sequence: PulseSequence,
}

const PUMP_NS: f64 = 10.0;
const QUBIT_PULSE_NS: f64 = 15.0;
const READOUT_NS: f64 = 200.0;

/// Rectangular drive of length `t` displacing by `beta`.
fn displacement_pulse(beta: C64, start: f64, t: f64) -> Result<PulseEnvelope> {
    let mut p = PulseEnvelope::new(Shape::Rectangular, 1e3 * beta.norm() / (TWO_PI * t), start, t)?;
    p.phase = beta.arg();
    Ok(p)
}

/// Pump, Kerr flux pulse, tomography displacement, two transmon `pi/2`
/// pulses and readout, in that order.
pub fn tomography_sequence(
    spec: &CircuitSpec,
    alpha: C64,
    kerr: KerrSetting,
    m: usize,
    gamma: C64,
) -> Result<TomographyProtocol> {
    if !(2..=4).contains(&m) {
        return Err(Error::invariant("cat component count in {2, 3, 4}", format!("got {m}")));
    }
    let (k_mhz, phi_ext) = kerr.resolve()?;
    let flux_width = revival_time(k_mhz) / m as f64;
    let interval = parity_interval(spec)?;
    let mut seq = PulseSequence::default();
    let mut t = 0.0;
    seq.push("pump", Target::FluxoniumDrive, displacement_pulse(alpha, t, PUMP_NS)?)?;
    t += PUMP_NS;
    seq.push(
        "kerr_flux",
        Target::FluxoniumFlux,
        PulseEnvelope::new(Shape::Rectangular, k_mhz, t, flux_width)?,
    )?;
    t += flux_width;
    seq.push("displacement", Target::FluxoniumDrive, displacement_pulse(-gamma, t, PUMP_NS)?)?;
    t += PUMP_NS;
    let half_pi = |start: f64| -> Result<PulseEnvelope> {
        let mut p = PulseEnvelope::new(Shape::Gaussian { sigma: QUBIT_PULSE_NS / 4.0 }, 1.0, start, QUBIT_PULSE_NS)?;
        p.amplitude = 1e3 / (8.0 * p.area());
        Ok(p)
    };
    seq.push("parity_1", Target::TransmonDrive, half_pi(t)?)?;
    t += QUBIT_PULSE_NS + interval;
    seq.push("parity_2", Target::TransmonDrive, half_pi(t)?)?;
    t += QUBIT_PULSE_NS;
    seq.push("readout", Target::Readout, PulseEnvelope::new(Shape::Rectangular, 1.0, t, READOUT_NS)?)?;
    seq.metadata.insert("kerr_mhz".into(), format!("{k_mhz}"));
    seq.metadata.insert("components".into(), m.to_string());
    seq.metadata.insert("parity_interval_ns".into(), format!("{interval}"));
    seq.metadata.insert("transmon_pulse_spectrum".into(), "sinc".into());
    if let Some(phi) = phi_ext {
        seq.metadata.insert("phi_ext_rad".into(), format!("{phi}"));
    }
    Ok(TomographyProtocol {
        alpha,
        gamma,
        m,
        k_mhz,
        phi_ext,
        flux_width,
        parity_interval: interval,
        sequence: seq,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolOutcome {
    /// State after the Kerr flux pulse.
    pub cat: FockState,
    /// Photon parity after the tomography displacement.
    pub parity: f64,
    /// Probability of reading the transmon excited (`(1 + parity)/2`).
    pub p_excited: f64,
    /// `2/pi * parity`, the Wigner function at `gamma`.
    pub wigner: f64,
}

/// Executes a protocol with ideal displacements and an ideal parity map.
pub fn run_protocol(protocol: &TomographyProtocol, n: usize) -> Result<ProtocolOutcome> {
    let vacuum = FockState::vacuum(n);
    let pump = displacement_operator(protocol.alpha, n)?;
    let coherent = FockState::new(pump * vacuum.amplitudes);
    let cat = kerr_phase(&coherent, protocol.k_mhz, protocol.flux_width);
    let probe = displacement_operator(-protocol.gamma, n)? * &cat.amplitudes;
    let parity: f64 = probe
        .iter()
        .enumerate()
        .map(|(k, c)| if k % 2 == 0 { c.norm_sqr() } else { -c.norm_sqr() })
        .sum();
    Ok(ProtocolOutcome {
        cat,
        parity,
        p_excited: 0.5 * (1.0 + parity),
        wigner: 2.0 / std::f64::consts::PI * parity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coherent_mean_photon_number() {
        let s = coherent_state(C64::new(2.0, 0.0), 30).unwrap();
        assert!((s.mean_photon_number() - 4.0).abs() < 1e-8);
        assert!((s.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn truncation_rule_enforced() {
        assert!(matches!(
            coherent_state(C64::new(2.0, 0.0), 10),
            Err(Error::Truncation { n: 10, .. })
        ));
        assert_eq!(minimum_truncation(C64::new(2.0, 0.0)), 18);
    }

    #[test]
    fn parity_interval_positive() {
        let t = parity_interval(&CircuitSpec::table1()).unwrap();
        assert!(t > 0.0 && t.is_finite());
    }

    #[test]
    fn protocol_widths() {
        let spec = CircuitSpec::table1();
        for (m, w) in [(2, 84.03), (3, 56.02), (4, 42.02)] {
            let p = tomography_sequence(&spec, C64::new(2.0, 0.0), KerrSetting::Given(-5.95), m, ZERO).unwrap();
            assert!((p.flux_width - w).abs() < 0.01, "m={m}: {}", p.flux_width);
            assert_eq!(p.sequence.pulses.len(), 6);
        }
    }

    #[test]
    fn unreachable_kerr_reports_range() {
        let spec = CircuitSpec::table1();
        let kerr = KerrSetting::Tuned {
            target_mhz: -5.95,
            fluxonium: spec.fluxonium,
        };
        let err = tomography_sequence(&spec, C64::new(2.0, 0.0), kerr, 2, ZERO).unwrap_err();
        assert!(matches!(err, Error::UnreachableKerr { .. }));
    }
}
