use ftt_sim::circuit::{CouplingSet, FluxoniumParams};
use ftt_sim::effective::{
    effective_coupling, effective_coupling_curve, effective_parameters, find_zero_coupling, kerr_at, kerr_pipeline,
    kerr_pipeline_with, kerr_scan, off_pole_grid, potential_derivatives, potential_minimum, swt_verify,
    taylor_coefficients, EffectiveOptions, KerrEcSource, SwtOptions,
};
use ftt_sim::{CircuitSpec, Error};
use proptest::prelude::*;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

fn fluxonium() -> FluxoniumParams {
    CircuitSpec::table1().fluxonium
}

fn no_couplers(g_12: f64) -> CircuitSpec {
    CircuitSpec::table1().with_couplings(CouplingSet {
        g_1c: 0.0,
        g_2c: 0.0,
        g_12,
    })
}

/// Brute-force global minimum on a fine grid, independent of the library.
fn grid_minimum(p: &FluxoniumParams) -> f64 {
    let u = |x: f64| -p.beta * p.e_j * x.cos() - p.e_j * (p.phi_ext() - x).cos() + 0.5 * p.e_l * x * x;
    let n = 2_000_001;
    let (lo, hi) = (-8.0, 8.0);
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .min_by(|a, b| u(*a).total_cmp(&u(*b)))
        .unwrap()
}

#[test]
fn symmetric_potential_has_minimum_at_zero() {
    assert_eq!(potential_minimum(&fluxonium()), 0.0);
}

#[test]
fn half_flux_minimum_matches_grid_search() {
    let p = fluxonium().with_phi_ext(std::f64::consts::PI);
    let phi = potential_minimum(&p);
    assert!(phi.abs() > 0.1);
    assert!((phi - grid_minimum(&p)).abs() < 1e-5, "{phi}");
    let d = potential_derivatives(&p, phi);
    assert!(d[1].abs() < 1e-12 && d[2] > 0.0);
}

#[test]
fn taylor_coefficients_at_zero_flux() {
    let p = fluxonium();
    let (c2, c3, c4) = taylor_coefficients(&p, 0.0);
    assert!((c2 - (1.0 + 0.1 + 1.0 / 4.5)).abs() < 1e-12);
    assert!((c2 - 1.3222).abs() < 1e-4);
    assert_eq!(c3, 0.0);
    assert!((c4 + 1.1).abs() < 1e-12);
}

#[test]
fn kerr_at_zero_flux_by_hand() {
    let r = kerr_pipeline(&fluxonium(), 5.7).unwrap();
    let g4 = 1e3 * (-1.1 / (1.1 + 1.0 / 4.5)) * 0.9 / 12.0;
    assert!((r.g4 - g4).abs() < 1e-9);
    assert!((r.g4 + 62.4).abs() < 0.1);
    assert_eq!(r.g3, 0.0);
    assert!((r.k - 12.0 * g4).abs() < 1e-9);
    assert!((r.k + 749.0).abs() < 1.0, "{}", r.k);
}

#[test]
fn transmon_charging_reading_scales_g4() {
    let a = kerr_pipeline(&fluxonium(), 5.7).unwrap();
    let b = kerr_pipeline_with(&fluxonium(), 5.7, KerrEcSource::Transmon(0.32)).unwrap();
    assert!((b.g4 / a.g4 - 0.32 / 0.9).abs() < 1e-12);
}

#[test]
fn kerr_rejects_nonpositive_frequency() {
    assert!(kerr_pipeline(&fluxonium(), 0.0).is_err());
}

#[test]
fn quoted_kerr_is_outside_the_flux_scan() {
    let scan = kerr_scan(&fluxonium(), KerrEcSource::Fluxonium, 401).unwrap();
    let (lo, hi) = scan.range();
    assert!(hi < -700.0 && lo > -1300.0, "[{lo}, {hi}]");
    match scan.locate(-5.95) {
        Err(Error::UnreachableKerr { min_mhz, max_mhz, .. }) => {
            assert_eq!((min_mhz, max_mhz), (lo, hi));
        }
        other => panic!("expected unreachable, got {other:?}"),
    }
    // A value inside the range is located and reproduced.
    let target = 0.5 * (lo + hi);
    let phi = scan.locate(target).unwrap();
    let k = kerr_at(&fluxonium().with_phi_ext(phi), KerrEcSource::Fluxonium).unwrap().k;
    assert!((k - target).abs() < 1e-3 * target.abs(), "{k} vs {target}");
}

#[test]
fn kerr_is_even_and_continuous_in_flux() {
    let scan = kerr_scan(&fluxonium(), KerrEcSource::Fluxonium, 721).unwrap();
    let n = scan.k.len();
    let step = TWO_PI / n as f64;
    assert!((scan.phi_ext[1] - scan.phi_ext[0] - step).abs() < 1e-12);
    // k[i] at i*step and k[n-i] at 2pi - i*step
    for i in 1..n {
        assert!((scan.k[i] - scan.k[n - i]).abs() < 1e-6 * scan.k[i].abs(), "{i}");
    }
    let spread = scan.range().1 - scan.range().0;
    for w in scan.k.windows(2) {
        assert!((w[1] - w[0]).abs() < 0.05 * spread);
    }
}

#[test]
fn uncoupled_effective_model_is_trivial() {
    let m = effective_parameters(&no_couplers(34.7), 4.27).unwrap();
    assert_eq!(m.omega_1_t, 5.7);
    assert_eq!(m.omega_2_t, 6.4);
    assert!((m.g_t - 34.7).abs() < 1e-12);
}

#[test]
fn operating_point_by_hand() {
    let m = effective_parameters(&CircuitSpec::table1(), 4.27).unwrap();
    assert!((m.delta_1 - 1.43).abs() < 1e-12 && (m.delta_2 - 2.13).abs() < 1e-12);
    let shift = 242.9f64.powi(2) / 1.43 * 1e-3;
    assert!((shift - 41.3).abs() < 0.1);
    assert!((m.omega_1_t - 5.741).abs() < 1e-3);
    let g = 0.5 * 242.9 * 307.11 * 1e-3 * (1.0 / 1.43 + 1.0 / 2.13) + 34.7;
    assert!((m.g_t - g).abs() < 1e-9);
    assert!((m.g_t - 78.0).abs() < 1.0);
}

#[test]
fn resonance_is_an_error() {
    assert!(matches!(
        effective_parameters(&CircuitSpec::table1(), 5.7),
        Err(Error::Resonance { mode: 1, .. })
    ));
}

#[test]
fn curve_changes_sign_near_six_gigahertz() {
    let spec = CircuitSpec::table1();
    let grid = off_pole_grid(&spec, 4.0, 8.0, 401);
    let curve = effective_coupling_curve(&spec, &grid, &EffectiveOptions::default()).unwrap();
    assert!(curve.brackets.iter().any(|&(a, b)| a >= 5.9 && b <= 6.1), "{:?}", curve.brackets);
}

#[test]
fn zero_coupling_point() {
    let z = find_zero_coupling(&CircuitSpec::table1(), 4.0, 8.0, &EffectiveOptions::default()).unwrap();
    // 1/D1 + 1/D2 = -2 g12/(g1 g2) is a quadratic in omega_c; take the root
    // between the qubits.
    let (w1, w2): (f64, f64) = (5.7, 6.4);
    let r = -2.0 * 34.7 / (242.9 * 307.11 * 1e-3);
    // (w1 - x) + (w2 - x) = r (w1 - x)(w2 - x)
    let (a, b, c) = (r, -(r * (w1 + w2) - 2.0), r * w1 * w2 - (w1 + w2));
    let disc = (b * b - 4.0 * a * c).sqrt();
    let roots = [(-b + disc) / (2.0 * a), (-b - disc) / (2.0 * a)];
    let root = roots.into_iter().find(|x| *x > w1 && *x < w2).unwrap();
    assert!((z.omega_c_star - root).abs() < 1e-6, "{} vs {root}", z.omega_c_star);
    assert!((z.omega_c_star - 5.97).abs() < 0.05);
    assert!(z.residual.abs() < 1e-3);
}

#[test]
fn without_direct_coupling_zero_is_the_midpoint() {
    let spec = CircuitSpec::table1().with_couplings(CouplingSet {
        g_12: 0.0,
        ..CircuitSpec::table1().couplings
    });
    let z = find_zero_coupling(&spec, 5.8, 6.3, &EffectiveOptions::default()).unwrap();
    assert!((z.omega_c_star - 6.05).abs() < 1e-6);
}

#[test]
fn missing_sign_change_is_reported() {
    let err = find_zero_coupling(&CircuitSpec::table1(), 4.0, 5.0, &EffectiveOptions::default()).unwrap_err();
    assert!(matches!(err, Error::ZeroNotFound { .. }), "{err}");
}

#[test]
fn far_detuned_limit_is_direct_coupling() {
    let g = CircuitSpec::table1().couplings;
    let far = effective_coupling(5.7, 6.4, 1e7, &g, false);
    assert!((far - g.g_12).abs() < 1e-3);
}

#[test]
fn sign_structure_of_the_coupling() {
    let g = CircuitSpec::table1().couplings;
    for wc in [3.0, 4.27, 5.0, 5.6] {
        assert!(effective_coupling(5.7, 6.4, wc, &g, false) > g.g_12);
    }
    // Negative between the lower qubit and the midpoint, where 1/D1 dominates.
    for wc in [5.8, 5.9] {
        assert!(effective_coupling(5.7, 6.4, wc, &g, false) < 0.0);
    }
    assert!(effective_coupling(5.7, 6.4, 6.2, &g, false) > 0.0);
    for wc in [6.5, 7.0, 9.0] {
        assert!(effective_coupling(5.7, 6.4, wc, &g, false) < g.g_12);
    }
}

#[test]
fn swt_is_identity_without_coupler_couplings() {
    let r = swt_verify(&no_couplers(34.7), 4.27, &SwtOptions::default()).unwrap();
    assert_eq!(r.off_block_before, 0.0);
    assert_eq!(r.off_block_after, 0.0);
    assert!(r.mismatch < 1e-9, "{}", r.mismatch);
}

#[test]
fn swt_reduces_off_block_coupling() {
    let r = swt_verify(&CircuitSpec::table1(), 4.27, &SwtOptions::default()).unwrap();
    assert!(r.off_block_after < r.off_block_before, "{r:?}");
}

#[test]
fn swt_mismatch_shrinks_with_detuning() {
    let spec = CircuitSpec::table1();
    let m: Vec<f64> = [4.27, 3.5, 2.5]
        .iter()
        .map(|&w| swt_verify(&spec, w, &SwtOptions::default()).unwrap().mismatch)
        .collect();
    assert!(m[0] > m[1] && m[1] > m[2], "{m:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coupling_formula_is_swap_symmetric(
        w1 in 3.0..8.0f64, w2 in 3.0..8.0f64, wc in 3.0..8.0f64,
        g1 in 0.0..400.0f64, g2 in 0.0..400.0f64, g12 in 0.0..60.0f64,
        cr: bool,
    ) {
        prop_assume!((w1 - wc).abs() > 1e-3 && (w2 - wc).abs() > 1e-3);
        let a = effective_coupling(w1, w2, wc, &CouplingSet { g_1c: g1, g_2c: g2, g_12: g12 }, cr);
        let b = effective_coupling(w2, w1, wc, &CouplingSet { g_1c: g2, g_2c: g1, g_12: g12 }, cr);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn zero_point_depends_only_on_the_coupling_ratio(s in 0.05..20.0f64) {
        // The exchange term is quadratic in the qubit-coupler couplings and
        // the direct term linear, so the zero is fixed by g12/(g1c g2c).
        let spec = CircuitSpec::table1();
        let g = spec.couplings;
        let scaled = spec.with_couplings(CouplingSet { g_1c: s * g.g_1c, g_2c: s * g.g_2c, g_12: s * s * g.g_12 });
        let opts = EffectiveOptions::default();
        let a = find_zero_coupling(&spec, 4.0, 8.0, &opts).unwrap().omega_c_star;
        let b = find_zero_coupling(&scaled, 4.0, 8.0, &opts).unwrap().omega_c_star;
        prop_assert!((a - b).abs() < 1e-7, "{} vs {}", a, b);
    }

    #[test]
    fn uniform_coupling_scale_moves_the_zero(s in 1.5..4.0f64) {
        let spec = CircuitSpec::table1();
        let scaled = spec.with_couplings(spec.couplings.scaled(s));
        let opts = EffectiveOptions::default();
        let a = find_zero_coupling(&spec, 4.0, 8.0, &opts).unwrap().omega_c_star;
        let b = find_zero_coupling(&scaled, 4.0, 8.0, &opts).unwrap().omega_c_star;
        // Larger couplings weaken the direct term relative to the exchange
        // term, pushing the zero towards the midpoint 6.05 GHz.
        prop_assert!(b > a && b < 6.05, "{} vs {}", a, b);
    }

    #[test]
    fn minimum_is_odd_in_flux(flux in 0.01..0.99f64) {
        let p = fluxonium();
        let a = potential_minimum(&p.with_phi_ext(TWO_PI * flux));
        let b = potential_minimum(&p.with_phi_ext(TWO_PI * (1.0 - flux)));
        // Exactly at half flux the two mirror minima are degenerate.
        prop_assume!((flux - 0.5).abs() > 1e-3);
        prop_assert!((a + b).abs() < 1e-9, "{} vs {}", a, b);
    }
}
