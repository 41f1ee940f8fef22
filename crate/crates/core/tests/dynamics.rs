use ftt_sim::circuit::{CoherenceSpec, CoherenceTimes};
use ftt_sim::dynamics::evolve::{real_trace, STEP_LIMIT};
use ftt_sim::dynamics::fidelity::{average_gate_fidelity, ket_fidelity};
use ftt_sim::dynamics::gates::{exchange_propagator, TwoQubitModel};
use ftt_sim::dynamics::noise::rates;
use ftt_sim::dynamics::{
    collapse_ops_from_t, evolve_lindblad, evolve_unitary, iswap, iswap_unitary, propagator, simulate_iswap,
    simulate_x_half_pi, state_fidelity, x_half_pi, Frame, GateResult, IswapOptions, PulseEnvelope, PulseSequence, Shape, State,
    Target, TimeGrid, X90Options,
};
use ftt_sim::hamiltonian::lowering;
use ftt_sim::linalg::{basis, expm_hermitian, max_distance, CMatrix, CVector, C64};
use ftt_sim::{CircuitSpec, Error};
use proptest::prelude::*;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;
const R: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn ket(v: &[C64]) -> CVector {
    CVector::from_column_slice(v)
}

fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
}

fn norm_error(traj: &ftt_sim::dynamics::Trajectory) -> f64 {
    traj.states
        .iter()
        .map(|s| match s {
            State::Ket(v) => (v.norm() - 1.0).abs(),
            State::Density(m) => (real_trace(m) - 1.0).abs(),
        })
        .fold(0.0, f64::max)
}

#[test]
fn envelope_examples() {
    let rect = PulseEnvelope::new(Shape::Rectangular, 12.0, 5.0, 10.0).unwrap();
    assert_eq!(rect.eval(9.0), 12.0);
    assert_eq!(rect.eval(4.9), 0.0);
    let gauss = PulseEnvelope::new(Shape::Gaussian { sigma: 2.5 }, 7.0, 0.0, 10.0).unwrap();
    assert!((gauss.eval(5.0) - 7.0).abs() < 1e-12);
    assert_eq!(gauss.eval(0.0), 0.0);
    let erf = PulseEnvelope::new(Shape::ErfSquare { edge: 1.0 }, 8.0, 10.0, 20.0).unwrap();
    assert!((erf.eval(10.0) - 4.0).abs() < 1e-12);
    assert!((erf.eval(30.0) - 4.0).abs() < 1e-12);
    assert!((erf.eval(20.0) - 8.0).abs() < 1e-12);
}

#[test]
fn envelopes_vanish_outside_their_support() {
    for shape in [Shape::Rectangular, Shape::Gaussian { sigma: 2.0 }, Shape::ErfSquare { edge: 1.5 }] {
        let p = PulseEnvelope::new(shape, 3.0, 4.0, 12.0).unwrap();
        let w = match shape {
            Shape::Gaussian { sigma } | Shape::ErfSquare { edge: sigma } => sigma,
            Shape::Rectangular => 0.0,
        };
        for t in [4.0 - 5.0 * w - 1e-9, -100.0, 16.0 + 5.0 * w + 1e-9, 400.0] {
            assert_eq!(p.eval(t), 0.0, "{shape:?} at {t}");
        }
    }
}

#[test]
fn envelope_rejects_bad_parameters() {
    assert!(PulseEnvelope::new(Shape::Rectangular, 1.0, 0.0, 0.0).is_err());
    assert!(PulseEnvelope::new(Shape::Gaussian { sigma: 0.0 }, 1.0, 0.0, 5.0).is_err());
}

#[test]
fn carrier_multiplies_the_envelope() {
    let p = PulseEnvelope::new(Shape::Rectangular, 2.0, 0.0, 10.0).unwrap().with_carrier(5.7, 0.3);
    let t = 1.234;
    assert!((p.eval(t) - 2.0 * (TWO_PI * 5.7 * t + 0.3).cos()).abs() < 1e-12);
}

#[test]
fn sequence_duration_is_latest_end() {
    let mut seq = PulseSequence::default();
    seq.push("a", Target::FluxoniumDrive, PulseEnvelope::new(Shape::Rectangular, 1.0, 0.0, 10.0).unwrap())
        .unwrap();
    seq.push("b", Target::CouplerFlux, PulseEnvelope::new(Shape::Rectangular, 1.0, 3.0, 30.0).unwrap())
        .unwrap();
    seq.push("c", Target::TransmonDrive, PulseEnvelope::new(Shape::Rectangular, 1.0, 12.0, 5.0).unwrap())
        .unwrap();
    assert_eq!(seq.duration(), 33.0);
    assert_eq!(seq.eval(Target::CouplerFlux, 5.0), 1.0);
    assert_eq!(seq.eval(Target::FluxoniumFlux, 5.0), 0.0);
}

#[test]
fn drive_phase_selects_the_axis() {
    let m = TwoQubitModel::new([2, 2]).unwrap();
    let x = ftt_sim::linalg::kron(&pauli_x(), &CMatrix::identity(2, 2));
    let y = ftt_sim::linalg::kron(&pauli_y(), &CMatrix::identity(2, 2));
    assert!(max_distance(&m.sigma(0, 0.0), &x) < 1e-15);
    assert!(max_distance(&m.sigma(0, std::f64::consts::FRAC_PI_2), &y) < 1e-15);
}

#[test]
fn zero_hamiltonian_leaves_state_unchanged() {
    let psi = ket(&[c(R, 0.0), c(0.0, R)]);
    let grid = TimeGrid::new(0.0, 10.0, 100).unwrap();
    let traj = evolve_unitary(|_| CMatrix::zeros(2, 2), &psi, &grid, 10).unwrap();
    assert_eq!(traj.last(), &State::Ket(psi));
}

#[test]
fn eigenstate_only_acquires_a_phase() {
    let h = CMatrix::from_diagonal(&ket(&[c(0.0, 0.0), c(5.7, 0.0)]));
    let grid = TimeGrid::new(0.0, 3.0, 6000).unwrap();
    let traj = evolve_unitary(|_| h.clone(), &basis(2, 1), &grid, 10).unwrap();
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let State::Ket(v) = s else { unreachable!() };
        assert!((v[1].norm_sqr() - 1.0).abs() < 1e-10);
        assert!((v[1] - C64::from_polar(1.0, -TWO_PI * 5.7 * t)).norm() < 1e-9);
    }
}

#[test]
fn rabi_transfer_follows_closed_form() {
    // H = -A sigma_x gives P1(t) = sin^2(2 pi A t): full transfer at 1/(4A).
    let a = 0.025;
    let h = pauli_x() * c(-a, 0.0);
    let t_full = 1.0 / (4.0 * a);
    let grid = TimeGrid::new(0.0, t_full, 400).unwrap();
    let traj = evolve_unitary(|_| h.clone(), &basis(2, 0), &grid, 40).unwrap();
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let p1 = s.populations()[1];
        assert!((p1 - (TWO_PI * a * t).sin().powi(2)).abs() < 1e-10);
    }
    assert!((traj.last().populations()[1] - 1.0).abs() < 1e-12);
}

#[test]
fn oversized_step_is_rejected_before_running() {
    let h = pauli_x() * c(5.0, 0.0);
    let grid = TimeGrid::new(0.0, 10.0, 10).unwrap();
    match evolve_unitary(|_| h.clone(), &basis(2, 0), &grid, 1) {
        Err(Error::StepSize { phase, limit }) => {
            assert!(phase > limit);
            assert_eq!(limit, STEP_LIMIT);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn area_theorem() {
    // Same pulse area, twice the amplitude in half the time: same rotation.
    let run = |amp: f64, dur: f64| {
        let p = PulseEnvelope::new(Shape::Gaussian { sigma: dur / 4.0 }, amp, 0.0, dur).unwrap();
        let sx = pauli_x();
        let grid = TimeGrid::new(0.0, dur, 4000).unwrap();
        let traj = evolve_unitary(|t| &sx * c(-1e-3 * p.eval(t), 0.0), &basis(2, 0), &grid, 4000).unwrap();
        let State::Ket(v) = traj.last().clone() else { unreachable!() };
        v
    };
    let a = run(15.0, 20.0);
    let b = run(30.0, 10.0);
    assert!(ket_fidelity(&a, &b) > 1.0 - 1e-10);
    // and the rotation actually happened
    assert!(a[1].norm_sqr() > 0.1);
}

#[test]
fn lindblad_without_collapse_matches_unitary() {
    let p = PulseEnvelope::new(Shape::Gaussian { sigma: 3.0 }, 20.0, 0.0, 12.0).unwrap();
    let h = |t: f64| {
        let mut m = pauli_x() * c(-1e-3 * p.eval(t), 0.0);
        m[(1, 1)] += c(0.3, 0.0);
        m
    };
    let grid = TimeGrid::new(0.0, 12.0, 600).unwrap();
    let psi0 = ket(&[c(0.8, 0.0), c(0.0, 0.6)]);
    let u = evolve_unitary(h, &psi0, &grid, 50).unwrap();
    let l = evolve_lindblad(h, &(&psi0 * psi0.adjoint()), &[], &grid, 50).unwrap();
    assert_eq!(u.times, l.trajectory.times);
    for (a, b) in u.states.iter().zip(&l.trajectory.states) {
        assert!(state_fidelity(a, b).unwrap() > 1.0 - 1e-9);
    }
    assert!(!l.positivity_warning);
}

#[test]
fn amplitude_damping_decay_law() {
    let gamma: f64 = 0.01;
    let l = lowering(2) * c(gamma.sqrt(), 0.0);
    let h = CMatrix::from_diagonal(&ket(&[c(0.0, 0.0), c(0.4, 0.0)]));
    let grid = TimeGrid::new(0.0, 150.0, 7500).unwrap();
    let rho0 = basis(2, 1) * basis(2, 1).adjoint();
    let run = evolve_lindblad(|_| h.clone(), &rho0, &[l], &grid, 500).unwrap();
    for (t, s) in run.trajectory.times.iter().zip(&run.trajectory.states) {
        assert!((s.populations()[1] - (-gamma * t).exp()).abs() < 1e-6);
    }
}

#[test]
fn lindblad_preserves_trace_and_hermiticity() {
    let coh = CoherenceTimes { t1_ms: 1e-5, t2_ms: 1.5e-5 };
    let ops = collapse_ops_from_t(&coh, &lowering(3)).unwrap();
    let mut h = CMatrix::zeros(3, 3);
    h[(0, 1)] = c(0.02, 0.0);
    h[(1, 0)] = c(0.02, 0.0);
    h[(2, 2)] = c(0.5, 0.0);
    let grid = TimeGrid::new(0.0, 50.0, 2000).unwrap();
    let psi = ket(&[c(0.6, 0.0), c(0.0, 0.0), c(0.0, 0.8)]);
    let run = evolve_lindblad(|_| h.clone(), &(&psi * psi.adjoint()), &ops, &grid, 20).unwrap();
    assert!(norm_error(&run.trajectory) < 1e-9);
    for s in &run.trajectory.states {
        let State::Density(m) = s else { unreachable!() };
        assert!(max_distance(m, &m.adjoint()) < 1e-10);
    }
    assert!(!run.positivity_warning);
}

#[test]
fn collapse_operator_rates() {
    let t = CoherenceTimes { t1_ms: 1.0, t2_ms: 2.0 };
    assert_eq!(collapse_ops_from_t(&t, &lowering(2)).unwrap().len(), 1);
    let fl = CoherenceSpec::default().fluxonium;
    let r = rates(&fl).unwrap();
    let want = 1.0 / 56.7 - 1.0 / 618.84;
    assert!((r.dephasing * 1e6 - want).abs() < 1e-12);
    assert!((r.relaxation * 1e6 - 1.0 / 309.42).abs() < 1e-12);
    let inf = CoherenceTimes { t1_ms: f64::INFINITY, t2_ms: 0.1 };
    let ops = collapse_ops_from_t(&inf, &lowering(2)).unwrap();
    assert_eq!(ops.len(), 1);
    assert_eq!(ops[0][(0, 1)], c(0.0, 0.0));
    assert!(matches!(
        collapse_ops_from_t(&CoherenceTimes { t1_ms: 1.0, t2_ms: 2.5 }, &lowering(2)),
        Err(Error::Physicality(_))
    ));
}

#[test]
fn table2_decoherence_over_a_long_gate_is_negligible() {
    let m = TwoQubitModel::new([2, 2]).unwrap();
    let coh = CoherenceSpec::default();
    let mut ops = collapse_ops_from_t(&coh.fluxonium, &m.a1).unwrap();
    ops.extend(collapse_ops_from_t(&coh.transmon, &m.a2).unwrap());
    let h = CMatrix::from_diagonal(&ket(&m.diagonal(0.05, -0.03, 0.0, -0.32).iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>()));
    let grid = TimeGrid::with_max_step(0.0, 103.0, 0.01).unwrap();
    let u = propagator(|_| h.clone(), 4, &grid).unwrap();
    let inputs = [
        basis(4, 3),
        (basis(4, 1) + basis(4, 2)) * c(R, 0.0),
        (basis(4, 0) + basis(4, 3)) * c(R, 0.0),
    ];
    for psi in inputs {
        let run = evolve_lindblad(|_| h.clone(), &(&psi * psi.adjoint()), &ops, &grid, grid.steps).unwrap();
        let ideal = State::Ket(&u * &psi);
        let f = state_fidelity(&ideal, run.trajectory.last()).unwrap();
        assert!(1.0 - f < 1e-6, "{}", 1.0 - f);
        assert!(1.0 - f > 0.0);
    }
}

#[test]
fn iswap_closed_form() {
    assert!(max_distance(&iswap_unitary(78.3, 0.0), &CMatrix::identity(4, 4)) < 1e-15);
    let g = 78.3;
    let u = iswap_unitary(g, 1e3 / (4.0 * g));
    let i = c(0.0, 1.0);
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let want = CMatrix::from_row_slice(4, 4, &[one, z, z, z, z, z, -i, z, z, -i, z, z, z, z, z, one]);
    assert!(max_distance(&u, &want) < 1e-12);
    assert_eq!(iswap(), want);
}

#[test]
fn x_half_pi_maps_basis_states() {
    let u = x_half_pi();
    let zero = &u * basis(2, 0);
    let one = &u * basis(2, 1);
    assert!((zero - ket(&[c(R, 0.0), c(0.0, -R)])).norm() < 1e-15);
    assert!((one - ket(&[c(0.0, -R), c(R, 0.0)])).norm() < 1e-15);
}

#[test]
fn fidelity_examples() {
    let zero = State::Ket(basis(2, 0));
    let one = State::Ket(basis(2, 1));
    let plus = State::Ket((basis(2, 0) + basis(2, 1)) * c(R, 0.0));
    assert_eq!(state_fidelity(&zero, &one).unwrap(), 0.0);
    assert!((state_fidelity(&zero, &plus).unwrap() - R).abs() < 1e-12);
    let mixed = State::Density(CMatrix::identity(2, 2) * c(0.5, 0.0));
    assert!((state_fidelity(&mixed, &mixed).unwrap() - 1.0).abs() < 1e-12);
    let bad = State::Density(CMatrix::identity(2, 2));
    assert!(state_fidelity(&bad, &zero).is_err());
}

#[test]
fn resonant_exchange_reproduces_iswap() {
    let g = 78.3;
    let t = 1e3 / (4.0 * g);
    let u = exchange_propagator(g, t, 64).unwrap();
    assert!(max_distance(&u, &iswap()) < 1e-9);
}

#[test]
fn bell_populations_are_constant_under_exchange() {
    let m = TwoQubitModel::new([2, 2]).unwrap();
    let g = 78.3e-3;
    let w = 5.741;
    let mut h = m.exchange() * c(g, 0.0);
    for (k, d) in m.diagonal(w, w, 0.0, 0.0).into_iter().enumerate() {
        h[(k, k)] += c(d, 0.0);
    }
    let grid = TimeGrid::with_max_step(0.0, 20.0, 1e-3).unwrap();
    let (i00, i01, i10, i11) = (m.index(0, 0), m.index(0, 1), m.index(1, 0), m.index(1, 1));
    let e = |i: usize| basis(4, i);
    for (psi, support) in [
        ((e(i01) + e(i10)) * c(R, 0.0), [i01, i10]),
        ((e(i01) - e(i10)) * c(R, 0.0), [i01, i10]),
        ((e(i00) + e(i11)) * c(R, 0.0), [i00, i11]),
    ] {
        let traj = evolve_unitary(|_| h.clone(), &psi, &grid, 100).unwrap();
        for s in &traj.states {
            let p = s.populations();
            for &k in &support {
                assert!((p[k] - 0.5).abs() < 1e-6, "{p:?}");
            }
        }
    }
}

fn x90_opts() -> X90Options {
    X90Options::default()
}

#[test]
fn x_half_pi_gate_meets_targets() {
    let spec = CircuitSpec::table1();
    let r = simulate_x_half_pi(&spec, &x90_opts()).unwrap();
    assert!(r.calibrated);
    assert!(r.fidelity >= 0.9999, "{}", r.fidelity);
    for (label, f) in &r.per_state {
        assert!(*f >= 0.9999, "{label}: {f}");
    }
    assert!(r.spectator_deviation.unwrap() < 1e-4);
    assert!(r.norm_error < 1e-9);
    assert!(r.leakage <= 1.0 - r.fidelity + 1e-6);
    assert_eq!(r.per_state.len(), 4);
}

#[test]
fn lab_and_rotating_frames_agree() {
    let spec = CircuitSpec::table1();
    let lab = simulate_x_half_pi(&spec, &x90_opts()).unwrap();
    let rot = simulate_x_half_pi(
        &spec,
        &X90Options {
            frame: Frame::Rotating,
            ..x90_opts()
        },
    )
    .unwrap();
    assert!((lab.fidelity - rot.fidelity).abs() < 1e-4);
    let (a, b) = (lab.amplitude_mhz.unwrap(), rot.amplitude_mhz.unwrap());
    assert!((a - b).abs() < 1e-2 * b.abs(), "{a} vs {b}");
}

#[test]
fn y_phase_drive_is_a_different_gate() {
    // Same calibrated amplitude at phase pi/2 rotates about y, not x.
    let spec = CircuitSpec::table1();
    let x = simulate_x_half_pi(
        &spec,
        &X90Options {
            frame: Frame::Rotating,
            ..x90_opts()
        },
    )
    .unwrap();
    let y = simulate_x_half_pi(
        &spec,
        &X90Options {
            frame: Frame::Rotating,
            phase: std::f64::consts::FRAC_PI_2,
            amplitude: x.amplitude_mhz,
            ..x90_opts()
        },
    )
    .unwrap();
    assert!(!y.calibrated);
    assert!(y.fidelity < 0.95);
}

#[test]
fn x_half_pi_step_convergence() {
    let spec = CircuitSpec::table1();
    let coarse = simulate_x_half_pi(&spec, &x90_opts()).unwrap();
    let fine = simulate_x_half_pi(
        &spec,
        &X90Options {
            max_dt: Some(0.5 * coarse.dt),
            amplitude: coarse.amplitude_mhz,
            ..x90_opts()
        },
    )
    .unwrap();
    assert!((coarse.fidelity - fine.fidelity).abs() < 1e-8);
}

/// Per input, a pure target and leaked weight L give F^2 <= 1 - L.
fn assert_leakage_consistent(r: &GateResult) {
    for ((label, f), tr) in r.per_state.iter().zip(&r.traces) {
        assert_eq!(label, &tr.label);
        let leak = tr.rows.last().unwrap()[4];
        assert!(leak <= 1.0 - f * f + 1e-6, "{label}: leakage {leak}, fidelity {f}");
    }
}

#[test]
fn x_half_pi_leakage_is_bounded_by_infidelity() {
    let spec = CircuitSpec::table1();
    let r = simulate_x_half_pi(
        &spec,
        &X90Options {
            levels: [3, 3],
            frame: Frame::Rotating,
            ..x90_opts()
        },
    )
    .unwrap();
    assert!(r.leakage <= 1.0 - r.fidelity + 1e-6, "{} vs {}", r.leakage, r.fidelity);
    assert_leakage_consistent(&r);
}

#[test]
fn iswap_gate_meets_targets() {
    let spec = CircuitSpec::table1();
    let r = simulate_iswap(&spec, &IswapOptions::default()).unwrap();
    assert!(r.fidelity >= 0.999, "{}", r.fidelity);
    assert!(r.process_fidelity.unwrap() >= 0.999);
    assert!(r.norm_error < 1e-9);
    let labels: Vec<&str> = r.per_state.iter().map(|(l, _)| l.as_str()).collect();
    for l in ["00", "01", "10", "11", "01+10", "01-10"] {
        assert!(labels.contains(&l), "{labels:?}");
    }
    // 1/(4 g~) at the operating point
    let g = r.sequence.metadata["g_eff_mhz"].parse::<f64>().unwrap();
    assert!((r.gate_time_ns - 1e3 / (4.0 * g)).abs() < 1e-9);
}

#[test]
fn iswap_flat_traces_for_00_and_11() {
    let r = simulate_iswap(&CircuitSpec::table1(), &IswapOptions::default()).unwrap();
    for label in ["00", "11"] {
        let tr = r.traces.iter().find(|t| t.label == label).unwrap();
        let k = if label == "00" { 0 } else { 3 };
        for row in &tr.rows {
            assert!((row[k] - 1.0).abs() < 1e-9, "{label}: {row:?}");
        }
    }
}

#[test]
fn iswap_step_convergence() {
    let spec = CircuitSpec::table1();
    let coarse = simulate_iswap(&spec, &IswapOptions::default()).unwrap();
    let fine = simulate_iswap(
        &spec,
        &IswapOptions {
            max_dt: Some(0.5 * coarse.dt),
            ..Default::default()
        },
    )
    .unwrap();
    assert!((coarse.fidelity - fine.fidelity).abs() < 1e-8);
}

#[test]
fn iswap_leakage_is_consistent_with_fidelity() {
    let r = simulate_iswap(
        &CircuitSpec::table1(),
        &IswapOptions {
            levels: [3, 3],
            ..Default::default()
        },
    )
    .unwrap();
    assert_leakage_consistent(&r);
    let final_leak = |l: &str| r.traces.iter().find(|t| t.label == l).unwrap().rows.last().unwrap()[4];
    // single excitations cannot leave the computational subspace under exchange
    assert!(final_leak("01") < 1e-6 && final_leak("10") < 1e-6);
    let worst = r.traces.iter().map(|t| t.rows.last().unwrap()[4]).fold(0.0, f64::max);
    assert!((r.leakage - worst).abs() < 1e-12);
}

#[test]
fn iswap_with_table2_noise() {
    let spec = CircuitSpec::table1();
    let clean = simulate_iswap(&spec, &IswapOptions::default()).unwrap();
    let noisy = simulate_iswap(
        &spec,
        &IswapOptions {
            noise: Some(CoherenceSpec::default()),
            ..Default::default()
        },
    )
    .unwrap();
    assert!(noisy.fidelity < clean.fidelity);
    assert!(clean.fidelity - noisy.fidelity < 1e-6);
    assert!(noisy.norm_error < 1e-9);
}

fn complex_entries(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n)
}

fn density(entries: &[(f64, f64)], dim: usize) -> CMatrix {
    let a = CMatrix::from_iterator(dim, dim, entries.iter().map(|&(r, i)| c(r, i)));
    let rho = &a * a.adjoint() + CMatrix::identity(dim, dim) * c(1e-3, 0.0);
    let tr = rho.trace();
    rho / tr
}

fn random_ket(entries: &[(f64, f64)]) -> CVector {
    let v = CVector::from_iterator(entries.len(), entries.iter().map(|&(r, i)| c(r, i)));
    let n = v.norm();
    v / c(n.max(1e-3), 0.0)
}

fn random_unitary(entries: &[(f64, f64)], dim: usize) -> CMatrix {
    let a = CMatrix::from_iterator(dim, dim, entries.iter().map(|&(r, i)| c(r, i)));
    expm_hermitian(&((&a + a.adjoint()) * c(0.5, 0.0)), 1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fidelity_is_symmetric_and_bounded(a in complex_entries(9), b in complex_entries(9)) {
        let (r, s) = (State::Density(density(&a, 3)), State::Density(density(&b, 3)));
        let f = state_fidelity(&r, &s).unwrap();
        let g = state_fidelity(&s, &r).unwrap();
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert!((f - g).abs() < 1e-8, "{} vs {}", f, g);
        prop_assert!((state_fidelity(&r, &r).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn fidelity_is_unitarily_invariant(a in complex_entries(9), b in complex_entries(9), u in complex_entries(9)) {
        let (r, s) = (density(&a, 3), density(&b, 3));
        let u = random_unitary(&u, 3);
        let f = state_fidelity(&State::Density(r.clone()), &State::Density(s.clone())).unwrap();
        let rot = |m: &CMatrix| State::Density(&u * m * u.adjoint());
        let g = state_fidelity(&rot(&r), &rot(&s)).unwrap();
        prop_assert!((f - g).abs() < 1e-8, "{} vs {}", f, g);
    }

    #[test]
    fn pure_fidelity_is_one_only_for_equal_rays(a in complex_entries(3), b in complex_entries(3), phase in 0.0..std::f64::consts::TAU) {
        let x = random_ket(&a);
        prop_assume!((x.norm() - 1.0).abs() < 1e-12);
        let y = random_ket(&b);
        prop_assume!((y.norm() - 1.0).abs() < 1e-12);
        let same = state_fidelity(&State::Ket(x.clone()), &State::Ket(&x * C64::from_polar(1.0, phase))).unwrap();
        prop_assert!((same - 1.0).abs() < 1e-12);
        let ket_vs_density = state_fidelity(&State::Ket(x.clone()), &State::Density(&y * y.adjoint())).unwrap();
        let kets = state_fidelity(&State::Ket(x.clone()), &State::Ket(y.clone())).unwrap();
        prop_assert!((ket_vs_density - kets).abs() < 1e-9);
        let dist = (&x * x.adjoint() - &y * y.adjoint()).norm();
        if dist > 1e-3 {
            prop_assert!(kets < 1.0 - 1e-8);
        }
    }

    #[test]
    fn exchange_unitary_is_unitary(g in -300.0..300.0f64, t in 0.0..200.0f64) {
        let u = iswap_unitary(g, t);
        prop_assert!(max_distance(&(&u * u.adjoint()), &CMatrix::identity(4, 4)) < 1e-12);
    }

    #[test]
    fn integrated_exchange_matches_closed_form(g in 1.0..300.0f64, t in 0.1..20.0f64) {
        let steps = (TWO_PI * g * 1e-3 * t / 0.05).ceil() as usize + 1;
        let u = exchange_propagator(g, t, steps).unwrap();
        prop_assert!(max_distance(&u, &iswap_unitary(g, t)) < 1e-9);
    }

    #[test]
    fn average_gate_fidelity_is_phase_blind(u in complex_entries(16), phase in 0.0..std::f64::consts::TAU) {
        let u = random_unitary(&u, 4);
        let f = average_gate_fidelity(&(&u * C64::from_polar(1.0, phase)), &u);
        prop_assert!((f - 1.0).abs() < 1e-12);
    }
}
