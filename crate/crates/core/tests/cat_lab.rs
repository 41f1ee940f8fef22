use std::f64::consts::PI;

use ftt_sim::cat::{
    cat_correlation, coherent_state, displacement_operator, ideal_cat, kerr_cat, kerr_evolve, kerr_phase,
    minimum_truncation, revival_time, run_protocol, tomography_sequence, wigner, wigner_density, CorrelationMap,
    FockState, Grid, KerrSetting,
};
use ftt_sim::dynamics::Target;
use ftt_sim::linalg::{max_distance, CMatrix, CVector, C64};
use ftt_sim::{CircuitSpec, Error};
use proptest::prelude::*;

const K: f64 = -5.95;

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Coherent amplitudes from the Poisson form, independent of the library.
fn poisson_ket(alpha: C64, n: usize) -> CVector {
    let mut log_fact = 0.0;
    CVector::from_iterator(
        n,
        (0..n).map(|k| {
            if k > 0 {
                log_fact += (k as f64).ln();
            }
            let mag = (-0.5 * alpha.norm_sqr() + k as f64 * alpha.norm().ln() - 0.5 * log_fact).exp();
            C64::from_polar(if alpha.norm() == 0.0 { (k == 0) as u8 as f64 } else { mag }, k as f64 * alpha.arg())
        }),
    )
}

fn overlap(a: &CVector, b: &CVector) -> f64 {
    a.dotc(b).norm()
}

/// Closed-form Wigner function of N(|a> + |-a>) with real `a`.
fn even_cat_wigner(a: f64, g: C64) -> f64 {
    let n2 = 1.0 / (2.0 * (1.0 + (-2.0 * a * a).exp()));
    let gauss = |c: f64| (-2.0 * ((g.re - c).powi(2) + g.im * g.im)).exp();
    2.0 / PI * n2 * (gauss(a) + gauss(-a) + 2.0 * (-2.0 * g.norm_sqr()).exp() * (4.0 * a * g.im).cos())
}

fn value_at(map: &ftt_sim::cat::WignerMap, i: usize, j: usize) -> (C64, f64) {
    (C64::new(map.grid.re[j], map.grid.im[i]), map.values[i][j])
}

#[test]
fn coherent_state_matches_poisson_amplitudes() {
    for alpha in [C64::new(2.0, 0.0), C64::new(-1.0, 1.5), C64::new(0.0, 0.3)] {
        let s = coherent_state(alpha, 40).unwrap();
        assert!((s.amplitudes.clone() - poisson_ket(alpha, 40)).norm() < 1e-12);
    }
    assert_eq!(coherent_state(re(0.0), 10).unwrap(), FockState::vacuum(10));
}

#[test]
fn opposite_coherent_states_overlap() {
    let a = coherent_state(re(2.0), 40).unwrap();
    let b = coherent_state(re(-2.0), 40).unwrap();
    assert!((a.overlap(&b) - (-8.0f64).exp()).abs() < 1e-12);
}

#[test]
fn truncated_coherent_state_is_normalized() {
    for alpha in [re(0.5), C64::new(2.3, 0.4), re(5.0)] {
        let s = coherent_state(alpha, minimum_truncation(alpha)).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn large_coherent_state_stays_finite() {
    let alpha = C64::new(14.0, 0.0);
    let n = minimum_truncation(alpha);
    assert!(n > 171);
    let s = coherent_state(alpha, n).unwrap();
    assert!(s.amplitudes.iter().all(|z| z.is_finite()));
    assert!((s.norm() - 1.0).abs() < 1e-12);
    assert!((s.mean_photon_number() - 196.0).abs() < 1e-6, "{}", s.mean_photon_number());
}

#[test]
fn truncation_below_rule_is_an_error() {
    let err = coherent_state(C64::new(3.0, 0.0), 12).unwrap_err();
    assert!(matches!(err, Error::Truncation { n: 12, suggested } if suggested >= 40));
    assert!(displacement_operator(C64::new(3.0, 0.0), 12).is_err());
}

#[test]
fn displacement_examples() {
    let n = 40;
    assert!(max_distance(&displacement_operator(C64::new(0.0, 0.0), n).unwrap(), &CMatrix::identity(n, n)) < 1e-12);
    let alpha = C64::new(1.2, -0.7);
    let d = displacement_operator(alpha, n).unwrap();
    let mut vac = CVector::zeros(n);
    vac[0] = re(1.0);
    let displaced = &d * &vac;
    assert!((displaced - coherent_state(alpha, n).unwrap().amplitudes).norm() < 1e-8);
    // Undo on the low subspace, away from the truncation edge.
    let back = displacement_operator(-alpha, n).unwrap() * &d;
    let low = back.view((0, 0), (10, 10)).into_owned();
    assert!(max_distance(&low, &CMatrix::identity(10, 10)) < 1e-8);
}

#[test]
fn kerr_evolution_examples() {
    let alpha = re(2.0);
    let n = 40;
    let tau = revival_time(K);
    assert!((tau - 168.067).abs() < 1e-3);
    let start = poisson_ket(alpha, n);
    assert!(overlap(&kerr_evolve(alpha, K, 0.0, n).unwrap().amplitudes, &start) > 1.0 - 1e-12);
    assert!(overlap(&kerr_evolve(alpha, K, tau, n).unwrap().amplitudes, &poisson_ket(-alpha, n)) > 1.0 - 1e-9);
    // Half a revival: (1 + i s)|a> + (1 - i s)|-a>, s the sign of K.
    for k in [K, 5.95] {
        let s = k.signum();
        let want = (poisson_ket(alpha, n) * C64::new(1.0, s) + poisson_ket(-alpha, n) * C64::new(1.0, -s)) * re(0.5);
        let got = kerr_evolve(alpha, k, revival_time(k) / 2.0, n).unwrap();
        assert!(overlap(&got.amplitudes, &want) / want.norm() > 1.0 - 1e-9);
    }
}

#[test]
fn full_revival_after_two_periods() {
    let alpha = C64::new(1.5, 0.8);
    let n = minimum_truncation(alpha).max(40);
    let start = coherent_state(alpha, n).unwrap();
    let back = kerr_evolve(alpha, K, 2.0 * revival_time(K), n).unwrap();
    assert!(start.overlap(&back) > 1.0 - 1e-9);
}

#[test]
fn kerr_cats_match_the_analytic_superpositions() {
    let alpha = re(2.0);
    for m in 2..=4 {
        let cat = kerr_cat(alpha, m, K, 40).unwrap();
        let ideal = ideal_cat(alpha, m, K, 40).unwrap();
        assert!(cat.overlap(&ideal) > 1.0 - 1e-9, "m={m}");
        let coherent = coherent_state(alpha, 40).unwrap().populations();
        for (a, b) in cat.populations().iter().zip(&coherent) {
            assert!((a - b).abs() < 1e-14);
        }
    }
    assert!((revival_time(K) / 4.0 - 42.0).abs() < 0.05);
    assert!(ideal_cat(alpha, 5, K, 40).is_err());
    assert!(kerr_cat(alpha, 1, K, 40).is_err());
}

#[test]
fn vacuum_wigner() {
    let grid = Grid::square(4.0, 81);
    let w = wigner(&FockState::vacuum(10), &grid);
    for i in 0..81 {
        for j in 0..81 {
            let (g, v) = value_at(&w, i, j);
            assert!((v - 2.0 / PI * (-2.0 * g.norm_sqr()).exp()).abs() < 1e-12);
        }
    }
    assert!((w.values[40][40] - 2.0 / PI).abs() < 1e-12);
}

#[test]
fn coherent_wigner_peaks_at_alpha() {
    let grid = Grid::square(4.0, 81);
    let w = wigner(&coherent_state(re(2.0), 40).unwrap(), &grid);
    let j = grid.re.iter().position(|&x| (x - 2.0).abs() < 1e-12).unwrap();
    assert!((w.values[40][j] - 2.0 / PI).abs() < 1e-9);
    assert!((w.max() - 2.0 / PI).abs() < 1e-9);
}

#[test]
fn even_cat_wigner_matches_closed_form() {
    let a = 2.0;
    let cat = ideal_cat(re(a), 2, K, 40).unwrap();
    // the two-component Kerr cat is a rotated even/odd mixture; build the even cat directly
    let even = poisson_ket(re(a), 40) + poisson_ket(re(-a), 40);
    let even = FockState::new(even.clone() / re(even.norm()));
    assert!(cat.overlap(&even) < 0.99);
    let grid = Grid::square(4.0, 101);
    let w = wigner(&even, &grid);
    let mut worst: f64 = 0.0;
    for i in 0..101 {
        for j in 0..101 {
            let (g, v) = value_at(&w, i, j);
            worst = worst.max((v - even_cat_wigner(a, g)).abs());
        }
    }
    assert!(worst < 1e-9, "{worst}");
}

#[test]
fn wigner_matches_displaced_parity() {
    let state = kerr_cat(C64::new(1.3, 0.4), 3, K, 40).unwrap();
    let parity = |v: &CVector| -> f64 {
        v.iter().enumerate().map(|(k, c)| if k % 2 == 0 { c.norm_sqr() } else { -c.norm_sqr() }).sum()
    };
    let grid = Grid {
        re: vec![-1.1, 0.0, 0.7],
        im: vec![-0.5, 0.25, 1.3],
    };
    let w = wigner(&state, &grid);
    for (i, &y) in grid.im.iter().enumerate() {
        for (j, &x) in grid.re.iter().enumerate() {
            // pad so the displacement does not feel the truncation edge
            let mut big = CVector::zeros(80);
            big.rows_mut(0, 40).copy_from(&state.amplitudes);
            let probe = displacement_operator(-C64::new(x, y), 80).unwrap() * big;
            assert!((w.values[i][j] - 2.0 / PI * parity(&probe)).abs() < 1e-9);
        }
    }
}

#[test]
fn cat_wigner_is_normalized_on_default_grid() {
    for m in 2..=4 {
        let alpha = re(2.0);
        let w = wigner(&kerr_cat(alpha, m, K, 40).unwrap(), &Grid::for_alpha(alpha));
        assert!((w.integral() - 1.0).abs() < 1e-3, "m={m}: {}", w.integral());
        assert!(w.warning().is_none());
    }
}

#[test]
fn truncated_state_carries_a_warning() {
    let mut v = CVector::zeros(5);
    v[0] = re(0.6);
    v[4] = re(0.8);
    let w = wigner(&FockState::new(v), &Grid::square(2.0, 5));
    assert!(w.warning().unwrap().contains("truncation"));
}

#[test]
fn large_fock_numbers_stay_stable() {
    // |200> would need 200! in a factorial sum.
    let mut v = CVector::zeros(201);
    v[200] = re(1.0);
    let w = wigner(&FockState::new(v), &Grid { re: vec![0.0], im: vec![0.0] });
    assert!((w.values[0][0] - 2.0 / PI).abs() < 1e-9);
    assert!(w.values.iter().flatten().all(|x| x.is_finite()));
}

#[test]
fn correlation_examples() {
    let grid = Grid::square(8.0, 33);
    let w = wigner(&kerr_cat(re(2.0), 2, K, 40).unwrap(), &grid);
    assert_eq!(CorrelationMap::difference(&w, &w).unwrap().max_abs(), 0.0);
    let c = cat_correlation(2, 2, K, &grid, 40).unwrap();
    assert!(c.max_abs() > 0.05);
    for (i, &y) in grid.im.iter().enumerate() {
        for (j, &x) in grid.re.iter().enumerate() {
            if x.hypot(y) > 6.0 {
                assert!(c.values[i][j].abs() < 1e-6);
            }
        }
    }
    assert!(cat_correlation(0, 2, K, &grid, 40).is_err());
    let other = Grid::square(4.0, 33);
    assert!(CorrelationMap::difference(&w, &wigner(&FockState::vacuum(4), &other)).is_err());
}

#[test]
fn protocol_reproduces_the_wigner_value() {
    let spec = CircuitSpec::table1();
    let alpha = re(2.0);
    for (m, gamma) in [(2, C64::new(0.0, 0.3)), (3, C64::new(1.0, -0.5)), (4, C64::new(-2.0, 0.1))] {
        let p = tomography_sequence(&spec, alpha, KerrSetting::Given(K), m, gamma).unwrap();
        let targets: Vec<Target> = p.sequence.pulses.iter().map(|p| p.target).collect();
        assert_eq!(
            targets,
            [
                Target::FluxoniumDrive,
                Target::FluxoniumFlux,
                Target::FluxoniumDrive,
                Target::TransmonDrive,
                Target::TransmonDrive,
                Target::Readout
            ]
        );
        let out = run_protocol(&p, 60).unwrap();
        assert!(out.cat.overlap(&ideal_cat(alpha, m, K, 60).unwrap()) > 1.0 - 1e-9);
        let direct = wigner(&out.cat, &Grid { re: vec![gamma.re], im: vec![gamma.im] });
        assert!((out.wigner - direct.values[0][0]).abs() < 1e-8, "m={m}");
        assert!((0.0..=1.0).contains(&out.p_excited));
    }
}

#[test]
fn pulses_follow_in_order() {
    let p = tomography_sequence(&CircuitSpec::table1(), re(2.0), KerrSetting::Given(K), 2, re(0.0)).unwrap();
    for pair in p.sequence.pulses.windows(2) {
        assert!(pair[0].envelope.start + pair[0].envelope.duration <= pair[1].envelope.start + 1e-9);
    }
    let gap = p.sequence.pulses[4].envelope.start - (p.sequence.pulses[3].envelope.start + p.sequence.pulses[3].envelope.duration);
    assert!((gap - p.parity_interval).abs() < 1e-9);
}

fn amplitude() -> impl Strategy<Value = C64> {
    (-2.5..2.5f64, -2.5..2.5f64).prop_map(|(x, y)| C64::new(x, y))
}

fn pure_state(n: usize) -> impl Strategy<Value = FockState> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n).prop_filter_map("nonzero", |v| {
        let a = CVector::from_iterator(v.len(), v.into_iter().map(|(x, y)| C64::new(x, y)));
        let norm = a.norm();
        (norm > 1e-3).then(|| FockState::new(a / re(norm)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kerr_preserves_fock_populations(alpha in amplitude(), k in -20.0..20.0f64, t in 0.0..500.0f64) {
        let s = coherent_state(alpha, 40).unwrap();
        let e = kerr_phase(&s, k, t);
        for (a, b) in s.amplitudes.iter().zip(e.amplitudes.iter()) {
            prop_assert!((a.norm() - b.norm()).abs() < 1e-14);
        }
    }

    #[test]
    fn revival_is_exact(alpha in amplitude(), k in prop_oneof![-20.0..-0.5f64, 0.5..20.0f64]) {
        let n = minimum_truncation(alpha).max(20);
        let s = coherent_state(alpha, n).unwrap();
        prop_assert!(s.overlap(&kerr_evolve(alpha, k, 2.0 * revival_time(k), n).unwrap()) > 1.0 - 1e-9);
    }

    #[test]
    fn pure_state_wigner_is_bounded(state in pure_state(12)) {
        let w = wigner(&state, &Grid::square(3.0, 25));
        prop_assert!(w.max() <= 2.0 / PI + 1e-9);
        prop_assert!(w.min() >= -2.0 / PI - 1e-9);
    }

    #[test]
    fn wigner_is_linear(a in pure_state(10), b in pure_state(10)) {
        let grid = Grid::square(3.0, 21);
        let mix = (a.density() + b.density()) * re(0.5);
        let w = wigner_density(&mix, &grid);
        let (wa, wb) = (wigner(&a, &grid), wigner(&b, &grid));
        for i in 0..21 {
            for j in 0..21 {
                prop_assert!((w.values[i][j] - 0.5 * (wa.values[i][j] + wb.values[i][j])).abs() < 1e-10);
            }
        }
    }
}
