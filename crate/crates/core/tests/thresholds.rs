use approx::assert_abs_diff_eq;
use steering_core::jointmeas::{
    bisect_boundary, exact_eta_of_chi, mub_jm_holds, mub_jm_residual, mub_jm_threshold_symmetric,
    qubit_exact_threshold, qubit_renyi_threshold, renyi_eta_of_chi, renyi_mub_threshold_symmetric,
};
use steering_core::scenarios::{
    alpha_optimality_check, d3_family_scan, fig1_scan, mub_threshold, qubit_angle_scan, qubit_random_pair,
    qubit_random_povm_check, tightness_scan, Setup,
};
use steering_core::{RenyiOrder, Visibility};

fn order(a: f64) -> RenyiOrder {
    RenyiOrder::new(a).unwrap()
}

fn vis(v: f64) -> Visibility {
    Visibility::new(v).unwrap()
}

fn literal_residual(d: usize, va: f64, vx: f64) -> f64 {
    let m = (d - 1) as f64;
    let a = 1.0 + m * (va - (1.0 - vx));
    let s = (d as f64 - m * (va - vx).powi(2)).sqrt();
    (a - s) / (d - 2) as f64
}

#[test]
fn symmetric_thresholds_match_oracle() {
    assert_abs_diff_eq!(mub_jm_threshold_symmetric(2).unwrap().value(), std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
    assert_abs_diff_eq!(mub_jm_threshold_symmetric(3).unwrap().value(), 0.683_012_701_892_219_3, epsilon = 1e-15);
    assert_abs_diff_eq!(mub_jm_threshold_symmetric(5).unwrap().value(), 0.654_508_497_187_473_7, epsilon = 1e-15);
    assert_abs_diff_eq!(mub_jm_threshold_symmetric(10).unwrap().value(), 0.620_126_536_676_021_1, epsilon = 1e-15);
    for d in 2..=12 {
        let exact = mub_jm_threshold_symmetric(d).unwrap().value();
        let detected = renyi_mub_threshold_symmetric(d, 1e-10).unwrap().value();
        assert!((detected - exact).abs() <= 1e-6, "d = {d}: {detected} vs {exact}");
        assert!(mub_jm_residual(d, exact, exact).abs() < 1e-12);
    }
    assert!(mub_jm_threshold_symmetric(1).is_err());
}

#[test]
fn stable_residual_agrees_with_literal_formula() {
    for d in [3, 4, 7, 16] {
        for i in 0..=20 {
            for j in 0..=20 {
                let (va, vx) = (i as f64 / 20.0, j as f64 / 20.0);
                let r = mub_jm_residual(d, va, vx);
                assert!((r - literal_residual(d, va, vx)).abs() < 1e-12, "d = {d}, va = {va}, vx = {vx}");
            }
        }
    }
}

#[test]
fn qubit_boundary_is_a_circle() {
    for k in 0..=16 {
        let t = std::f64::consts::FRAC_PI_2 * k as f64 / 16.0;
        let (va, vx) = (t.cos(), t.sin());
        assert!(mub_jm_residual(2, va, vx).abs() < 1e-12);
        assert!(mub_jm_holds(2, vis(0.999 * va), vis(0.999 * vx)).unwrap());
    }
}

#[test]
fn criterion_never_detects_compatible_pairs() {
    for d in [2, 3, 5, 8] {
        for k in 0..=10 {
            let vx = vis(k as f64 / 10.0);
            let crit = renyi_eta_of_chi(d, vx, 1e-10).unwrap().visibility.value();
            let exact = exact_eta_of_chi(d, vx, 1e-10).unwrap().visibility.value();
            assert!(crit >= exact - 1e-8, "d = {d}, vx = {}: {crit} < {exact}", vx.value());
        }
    }
    let rows = tightness_scan(&[2, 3, 4], 11, 1e-9).unwrap();
    assert_eq!(rows.len(), 33);
    for r in rows.iter().filter(|r| r.d == 2 || r.chi == 0.0 || r.chi == 1.0) {
        assert!(r.difference() <= 5e-9, "d = {}, chi = {}", r.d, r.chi);
    }
}

#[test]
fn qubit_closed_forms() {
    assert_abs_diff_eq!(
        qubit_exact_threshold([0.0, 0.0, 1.0], [1.0, 0.0, 0.0]).unwrap().value(),
        std::f64::consts::FRAC_1_SQRT_2,
        epsilon = 1e-15
    );
    assert_abs_diff_eq!(qubit_exact_threshold([0.0, 0.0, 1.0], [0.0, 0.0, 1.0]).unwrap().value(), 1.0);
    assert!(qubit_exact_threshold([0.0, 0.0, 0.9], [1.0, 0.0, 0.0]).is_err());
    assert_abs_diff_eq!(qubit_renyi_threshold(0.0).unwrap().value(), std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
    assert_abs_diff_eq!(qubit_renyi_threshold(std::f64::consts::FRAC_PI_4).unwrap().value(), 1.0, epsilon = 1e-12);
    assert!(qubit_renyi_threshold(1.0).is_err());
}

#[test]
fn bisection_is_stable_under_tolerance_halving() {
    let truth = 0.618_033_988_749_894_8;
    let mut previous = None;
    for k in 10..=30 {
        let tol = 2f64.powi(-k);
        let b = bisect_boundary(|v| v >= truth, tol).unwrap();
        assert!(b.value >= truth && b.value - truth <= tol);
        assert!(b.evaluations <= (1.0 / tol).log2().ceil() as usize);
        if let Some(p) = previous {
            assert!((b.value - p) <= 2.0 * tol + tol);
        }
        previous = Some(b.value);
    }
}

#[test]
fn pipeline_matches_formula_in_small_dimensions() {
    for d in 2..=5 {
        let pipeline = Setup::mub(d).unwrap().threshold(RenyiOrder::MAX_ENTROPY, 1e-9).unwrap();
        let formula = mub_jm_threshold_symmetric(d).unwrap();
        assert!((pipeline.value() - formula.value()).abs() < 3e-9, "d = {d}");
    }
    let big = mub_threshold(64, RenyiOrder::MAX_ENTROPY, 1e-9).unwrap();
    assert!((big.value() - mub_jm_threshold_symmetric(64).unwrap().value()).abs() <= 3e-9);
}

#[test]
fn dimension_scan_orders_and_gaps() {
    let alphas = [order(0.5), order(0.7), RenyiOrder::SHANNON, order(2.0)];
    let scan = fig1_scan(&[2, 3, 4, 5, 6], &alphas, 1e-9).unwrap();
    assert_eq!(scan.records.len(), 20);
    assert!(scan.min_gap().unwrap() >= -1e-9);
    for d in 2..=6 {
        let at = |a: RenyiOrder| {
            scan.records
                .iter()
                .find(|r| r.parameter == d as f64 && r.alpha == Some(a))
                .unwrap()
                .detected
                .value()
        };
        assert!(at(order(0.5)) <= at(order(0.7)) + 2e-9);
        assert!(at(order(0.7)) <= at(RenyiOrder::SHANNON) + 2e-9);
        assert!(at(order(2.0)) <= at(RenyiOrder::SHANNON) + 2e-9);
    }
    let half = scan.series(order(0.5));
    assert!(half.iter().all(|r| r.gap.unwrap().abs() <= 1e-6));
    assert!(half.windows(2).all(|w| w[1].detected.value() < w[0].detected.value()));
}

#[test]
fn half_is_the_best_order_and_swap_maps_to_dual() {
    let grid = [
        RenyiOrder::MAX_ENTROPY,
        order(0.6),
        order(0.8),
        RenyiOrder::SHANNON,
        order(1.5),
        order(3.0),
        RenyiOrder::MIN_ENTROPY,
    ];
    let scan = alpha_optimality_check(3, &grid, 1e-9).unwrap();
    let best = scan.records.iter().map(|r| r.detected.value()).fold(f64::INFINITY, f64::min);
    let half = scan.records.iter().find(|r| r.alpha == Some(RenyiOrder::MAX_ENTROPY)).unwrap();
    assert!(half.detected.value() <= best + 1e-12);
    assert!(alpha_optimality_check(3, &[RenyiOrder::SHANNON], 1e-9).is_err());
}

#[test]
fn angle_scan_tracks_closed_form() {
    let grid: Vec<f64> = (0..=10).map(|k| 0.07 * k as f64).collect();
    let scan = qubit_angle_scan(&grid, 1e-9).unwrap();
    for r in &scan.records {
        let expected = qubit_renyi_threshold(r.parameter).unwrap().value();
        assert!((r.detected.value() - expected).abs() <= 1e-6, "theta = {}", r.parameter);
        assert!(r.gap.unwrap() >= -1e-9);
    }
    assert!(scan.is_non_decreasing(1e-9));
}

#[test]
fn random_qubit_check_is_sound_and_reproducible() {
    let a = qubit_random_povm_check(8, 7, 1e-7).unwrap();
    let b = qubit_random_povm_check(8, 7, 1e-7).unwrap();
    assert_eq!(a.records, b.records);
    for r in &a.records {
        let pair = qubit_random_pair(7, r.parameter as usize);
        match r.exact {
            Some(exact) => {
                assert!(r.detected.value() >= exact.value() - 1e-6, "case {}", r.parameter);
                if pair.is_unbiased_sharp() {
                    assert!(r.gap.unwrap() <= 1e-5, "case {} gap {:?}", r.parameter, r.gap);
                }
            }
            None => assert!(!pair.is_unbiased()),
        }
    }
    assert!(qubit_random_povm_check(0, 7, 1e-7).is_err());
}

#[test]
fn qutrit_family_endpoints() {
    let scan = d3_family_scan(&[0.0, 0.1, 0.25, 0.5], 1e-9, false).unwrap();
    let first = &scan.records[0];
    assert!((first.detected.value() - (1.0 + 3f64.sqrt()) / 4.0).abs() <= 1e-5);
    assert_eq!(scan.records.last().unwrap().detected.value(), 1.0);
    assert!(scan.is_non_decreasing(1e-9));
}
