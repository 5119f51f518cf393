use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use steering_core::qobj::{
    basis_from_unitary, depolarize, fourier_basis, computational_basis, joint_distribution, max_entangled_state,
    mub_pair, qubit_povm, random_density_matrix, random_unitary, rotated_d3_kets,
};
use steering_core::steering::{basis_overlap_bound, overlap_bound};
use steering_core::{Povm, Visibility};

fn assert_valid_povm(p: &Povm) {
    let d = p.dim();
    let mut sum = nalgebra::DMatrix::<nalgebra::Complex<f64>>::zeros(d, d);
    for e in p.effects() {
        assert!(e.is_psd(1e-12));
        sum += e.matrix();
    }
    let id = nalgebra::DMatrix::<nalgebra::Complex<f64>>::identity(d, d);
    assert!((sum - id).norm() < 1e-10);
}

#[test]
fn mub_pairs_are_unbiased() {
    for d in 2..=7 {
        let z = computational_basis(d).unwrap();
        let x = fourier_basis(d).unwrap();
        for a in &z {
            for b in &x {
                assert!((a.inner(b).norm_sqr() - 1.0 / d as f64).abs() < 1e-12);
            }
        }
        let (pz, px) = mub_pair(d).unwrap();
        assert!((overlap_bound(&pz, &px).unwrap() - (d as f64).log2()).abs() < 1e-10);
    }
}

#[test]
fn rotated_qutrit_family_interpolates_bound() {
    let bound = |t: f64| {
        let (z, x) = rotated_d3_kets(t).unwrap();
        basis_overlap_bound(&z, &x)
    };
    assert!((bound(0.0) - 3f64.log2()).abs() < 1e-10);
    assert!(bound(0.5).abs() < 1e-10);
    let values: Vec<f64> = (0..=20).map(|k| bound(0.025 * k as f64)).collect();
    assert!(values.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    assert!(rotated_d3_kets(0.6).is_err());
}

#[test]
fn invalid_qubit_effects_are_rejected() {
    assert!(qubit_povm(0.5, [0.0, 0.0, 0.6]).is_err());
    assert!(qubit_povm(0.2, [0.0, 0.0, 0.8]).is_ok());
    assert!(Visibility::new(1.2).is_err());
    assert!(Visibility::new(-0.1).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn depolarized_povms_stay_valid(d in 2usize..6, v in 0.0f64..=1.0, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let basis = basis_from_unitary(&random_unitary(&mut rng, d)).unwrap();
        let noisy = depolarize(&Povm::from_basis(&basis).unwrap(), Visibility::new(v).unwrap());
        assert_valid_povm(&noisy);
    }

    #[test]
    fn born_statistics_are_normalized(d in 2usize..5, n in 1usize..4, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_density_matrix(&mut rng, d * d, n);
        let (z, x) = mub_pair(d).unwrap();
        let j = joint_distribution(&rho, &z, &x).unwrap();
        let total: f64 = j.as_slice().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
        prop_assert!(j.as_slice().iter().all(|&p| p >= 0.0));
    }

    #[test]
    fn qubit_effects_valid_iff_inside_cone(b in -1.0f64..1.0, m in 0.0f64..1.0, th in 0.0f64..std::f64::consts::PI) {
        let bloch = [m * th.sin(), 0.0, m * th.cos()];
        let ok = qubit_povm(b, bloch).is_ok();
        if b.abs() + m <= 1.0 - 1e-9 {
            prop_assert!(ok);
        } else if b.abs() + m > 1.0 + 1e-9 {
            prop_assert!(!ok);
        }
    }
}

#[test]
fn maximally_entangled_marginals_are_mixed() {
    for d in 2..=4 {
        let rho = max_entangled_state(d).unwrap();
        let a = rho.reduced_first(d, d).unwrap();
        assert!((a.purity() - 1.0 / d as f64).abs() < 1e-12);
        assert!((rho.purity() - 1.0).abs() < 1e-12);
    }
}
