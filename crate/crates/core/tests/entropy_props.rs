use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use steering_core::entropy::{
    conditional_renyi, conditional_tsallis, dual_order, renyi_entropy, shannon_entropy, shannon_entropy_nats,
    tsallis_entropy,
};
use steering_core::{Distribution, JointDistribution, RenyiOrder, TsallisOrder};

fn order(a: f64) -> RenyiOrder {
    RenyiOrder::new(a).unwrap()
}

fn normalized(w: Vec<f64>) -> Vec<f64> {
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

fn distribution() -> impl Strategy<Value = Distribution> {
    prop::collection::vec(0.001f64..1.0, 2..7).prop_map(|w| Distribution::new(normalized(w)).unwrap())
}

fn joint() -> impl Strategy<Value = JointDistribution> {
    (2usize..5, 2usize..5)
        .prop_flat_map(|(r, c)| (Just(r), Just(c), prop::collection::vec(0.0f64..1.0, r * c)))
        .prop_filter("nonzero mass", |(_, _, w)| w.iter().sum::<f64>() > 1e-3)
        .prop_map(|(r, c, w)| JointDistribution::new(r, c, normalized(w)).unwrap())
}

fn any_order() -> impl Strategy<Value = RenyiOrder> {
    prop_oneof![
        Just(RenyiOrder::MAX_ENTROPY),
        Just(RenyiOrder::SHANNON),
        Just(RenyiOrder::MIN_ENTROPY),
        (0.05f64..20.0).prop_map(order),
    ]
}

#[test]
fn oracle_values() {
    let p = Distribution::new(vec![0.7, 0.2, 0.1]).unwrap();
    assert_abs_diff_eq!(renyi_entropy(&p, order(2.0)), 0.888_968_687_611_256_2, epsilon = 1e-13);
    assert_abs_diff_eq!(renyi_entropy(&p, order(0.5)), 1.356_326_644_480_205_7, epsilon = 1e-13);
    assert_abs_diff_eq!(renyi_entropy(&p, order(3.0)), 0.753_176_333_012_395, epsilon = 1e-13);
    assert_abs_diff_eq!(shannon_entropy(&p), 1.156_779_649_447_039_5, epsilon = 1e-13);
    assert_abs_diff_eq!(tsallis_entropy(&p, TsallisOrder::new(2.0).unwrap()), 0.46, epsilon = 1e-14);

    let dyadic = Distribution::new(vec![0.5, 0.25, 0.125, 0.125]).unwrap();
    assert_abs_diff_eq!(shannon_entropy(&dyadic), 1.75, epsilon = 1e-15);

    let j = JointDistribution::from_rows(&[vec![0.1, 0.2, 0.05], vec![0.3, 0.05, 0.3]]).unwrap();
    assert_abs_diff_eq!(conditional_renyi(&j, RenyiOrder::MIN_ENTROPY), 0.321_928_094_887_362_3, epsilon = 1e-13);
    assert_abs_diff_eq!(conditional_renyi(&j, order(0.7)), 0.785_324_257_779_614_4, epsilon = 1e-13);
    assert_abs_diff_eq!(conditional_renyi(&j, order(3.0)), 0.468_985_782_730_791_1, epsilon = 1e-13);
}

#[test]
fn shannon_dispatch_is_continuous() {
    let p = Distribution::new(vec![0.6, 0.3, 0.1]).unwrap();
    let h = shannon_entropy(&p);
    for a in [1.0 - 1e-6, 1.0 - 1e-9, 1.0 - 1e-12, 1.0 + 1e-12, 1.0 + 1e-9, 1.0 + 1e-6] {
        assert!((renyi_entropy(&p, order(a)) - h).abs() < 1e-5, "alpha = {a}");
    }
    let j = JointDistribution::from_rows(&[vec![0.3, 0.1], vec![0.2, 0.4]]).unwrap();
    let hc = conditional_renyi(&j, RenyiOrder::SHANNON);
    for a in [1.0 - 1e-9, 1.0 + 1e-9] {
        assert!((conditional_renyi(&j, order(a)) - hc).abs() < 1e-7);
    }
}

#[test]
fn large_orders_approach_min_entropy() {
    let p = Distribution::new(vec![0.5, 0.3, 0.2]).unwrap();
    let hmin = renyi_entropy(&p, RenyiOrder::MIN_ENTROPY);
    assert!((renyi_entropy(&p, order(1e6)) - hmin).abs() < 1e-5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn entropy_lies_between_zero_and_log_n(p in distribution(), a in any_order()) {
        let h = renyi_entropy(&p, a);
        prop_assert!(h >= -1e-12);
        prop_assert!(h <= (p.len() as f64).log2() + 1e-12);
    }

    #[test]
    fn renyi_is_non_increasing_in_order(p in distribution(), a in 0.05f64..10.0, b in 0.05f64..10.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(renyi_entropy(&p, order(lo)) >= renyi_entropy(&p, order(hi)) - 1e-10);
        prop_assert!(renyi_entropy(&p, order(hi)) >= renyi_entropy(&p, RenyiOrder::MIN_ENTROPY) - 1e-10);
    }

    #[test]
    fn conditioning_reduces_entropy(j in joint(), a in any_order()) {
        let h = conditional_renyi(&j, a);
        prop_assert!(h >= -1e-12);
        prop_assert!(h <= renyi_entropy(&j.marginal_rows(), a) + 1e-10);
    }

    #[test]
    fn independent_side_information_is_useless(px in distribution(), py in distribution(), a in any_order()) {
        let j = JointDistribution::product(&px, &py);
        prop_assert!((conditional_renyi(&j, a) - renyi_entropy(&px, a)).abs() < 1e-10);
    }

    #[test]
    fn coarse_graining_side_information_cannot_help(j in joint(), a in any_order()) {
        let merged = j.merge_cols(&vec![0; j.cols()], 1).unwrap();
        prop_assert!(conditional_renyi(&merged, a) >= conditional_renyi(&j, a) - 1e-10);
    }

    #[test]
    fn dual_orders_satisfy_reciprocal_sum(a in 0.5f64..50.0) {
        let b = dual_order(order(a)).unwrap();
        if !b.is_infinite() {
            prop_assert!((1.0 / a + 1.0 / b.value() - 2.0).abs() < 1e-9);
        }
        let back = dual_order(b).unwrap();
        prop_assert!((back.value() - a).abs() < 1e-9 * a.max(1.0));
    }

    #[test]
    fn tsallis_tends_to_shannon_in_nats(p in distribution()) {
        let s = tsallis_entropy(&p, TsallisOrder::new(1.0 + 1e-7).unwrap());
        prop_assert!((s - shannon_entropy_nats(&p)).abs() < 1e-5);
    }

    #[test]
    fn tsallis_is_pseudo_additive_on_products(px in distribution(), py in distribution(), q in 0.2f64..4.0) {
        prop_assume!((q - 1.0).abs() > 1e-3);
        let q = TsallisOrder::new(q).unwrap();
        let joint = JointDistribution::product(&px, &py).flatten();
        let (sx, sy) = (tsallis_entropy(&px, q), tsallis_entropy(&py, q));
        let expected = sx + sy + (1.0 - q.value()) * sx * sy;
        prop_assert!((tsallis_entropy(&joint, q) - expected).abs() < 1e-10);
    }

    #[test]
    fn conditional_tsallis_is_non_negative(j in joint(), q in 0.2f64..4.0) {
        prop_assume!((q - 1.0).abs() > 1e-3);
        prop_assert!(conditional_tsallis(&j, TsallisOrder::new(q).unwrap()) >= -1e-12);
    }
}
