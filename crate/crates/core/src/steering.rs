//! Entropic steering inequalities.
//!
//! For dual Rényi orders `1/α + 1/β = 2` every local-hidden-state model obeys
//!
//! ```text
//! H_α(X_B | X_A) + H_β(Z_B | Z_A) >= q(X_B, Z_B) = -log₂ c²,
//! ```
//!
//! where `c` is the largest overlap between Bob's two measurement bases.
//! A violation certifies steering. The bound only looks at Bob's
//! measurements; Alice's devices are untrusted.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::entropy::{conditional_renyi, dual_order, Distribution, JointDistribution, RenyiOrder};
use crate::qobj::{self, DensityMatrix, Ket, Povm};
use crate::{Error, Result, Tolerances};

const TOL: Tolerances = Tolerances::DEFAULT;

/// Both sides of an evaluated steering inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteeringCertificate {
    /// `H_α(X_B|X_A) + H_β(Z_B|Z_A)` in bits.
    pub lhs: f64,
    /// `q(X_B, Z_B)` in bits.
    pub bound: f64,
    /// `bound - lhs`; positive means steering is detected.
    pub violation: f64,
    pub alpha: RenyiOrder,
    pub beta: RenyiOrder,
}

impl SteeringCertificate {
    pub fn new(lhs: f64, bound: f64, alpha: RenyiOrder) -> Result<Self> {
        Ok(SteeringCertificate {
            lhs,
            bound,
            violation: bound - lhs,
            alpha,
            beta: dual_order(alpha)?,
        })
    }

    /// Violation above [`Tolerances::detection`].
    pub fn detects_steering(&self) -> bool {
        self.violation > TOL.detection
    }
}

/// `q = -log₂ c²` with `c = max_ij |<x_i|z_j>|`.
///
/// Only rank-1 projective measurements are supported; for anything else the
/// eigenvector overlap is undefined and an error is returned.
pub fn overlap_bound(x: &Povm, z: &Povm) -> Result<f64> {
    if x.dim() != z.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: z.dim(),
        });
    }
    let bx = x
        .basis_vectors(TOL.projector)
        .ok_or_else(|| Error::UnsupportedBound("first measurement is not rank-1 projective".into()))?;
    let bz = z
        .basis_vectors(TOL.projector)
        .ok_or_else(|| Error::UnsupportedBound("second measurement is not rank-1 projective".into()))?;
    Ok(basis_overlap_bound(&bx, &bz))
}

/// `-log₂ c²` for two orthonormal bases given as kets.
pub fn basis_overlap_bound(bx: &[Ket], bz: &[Ket]) -> f64 {
    let c = bx
        .iter()
        .flat_map(|a| bz.iter().map(move |b| a.inner(b).norm()))
        .fold(0.0, f64::max)
        .min(1.0);
    (-(c * c).log2()).max(0.0)
}

/// `H_α(X_B|X_A) + H_β(Z_B|Z_A)` with `β` dual to `α`.
///
/// Both tables have Bob's outcome as row and Alice's outcome as column.
pub fn steering_lhs(jx: &JointDistribution, jz: &JointDistribution, alpha: RenyiOrder) -> Result<f64> {
    let beta = dual_order(alpha)?;
    Ok(conditional_renyi(jx, alpha) + conditional_renyi(jz, beta))
}

/// Certificate from precomputed statistics and bound.
pub fn certify(
    jx: &JointDistribution,
    jz: &JointDistribution,
    bound: f64,
    alpha: RenyiOrder,
) -> Result<SteeringCertificate> {
    SteeringCertificate::new(steering_lhs(jx, jz, alpha)?, bound, alpha)
}

/// Full pipeline: Born-rule statistics of the shared state, then the inequality.
///
/// Alice measures `alice_x` when Bob measures `bob_x`, and likewise for `z`.
pub fn evaluate(
    rho: &DensityMatrix,
    alice_x: &Povm,
    alice_z: &Povm,
    bob_x: &Povm,
    bob_z: &Povm,
    alpha: RenyiOrder,
) -> Result<SteeringCertificate> {
    let bound = overlap_bound(bob_x, bob_z)?;
    let jx = qobj::joint_distribution(rho, alice_x, bob_x)?;
    let jz = qobj::joint_distribution(rho, alice_z, bob_z)?;
    certify(&jx, &jz, bound, alpha)
}

/// How Alice's response function is drawn when sampling a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResponseKind {
    /// Each hidden variable fixes Alice's answer.
    Deterministic,
    /// Each hidden variable fixes a random answer distribution.
    Stochastic,
}

/// A local-hidden-state model: weights `p(λ)`, Bob's states `σ_λ`, and for each
/// of the two settings Alice's response `p(a | λ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LhsModel {
    weights: Distribution,
    hidden_states: Vec<DensityMatrix>,
    responses: [Vec<Vec<f64>>; 2],
    outcomes: usize,
}

impl LhsModel {
    /// `responses_x[λ][a]` and `responses_z[λ][a]` must be row-stochastic.
    pub fn new(
        weights: Distribution,
        hidden_states: Vec<DensityMatrix>,
        responses_x: Vec<Vec<f64>>,
        responses_z: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let n = weights.len();
        if hidden_states.len() != n || responses_x.len() != n || responses_z.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: hidden_states.len().min(responses_x.len()).min(responses_z.len()),
            });
        }
        let dim = hidden_states[0].dim();
        if hidden_states.iter().any(|s| s.dim() != dim) {
            return Err(Error::InvalidState("hidden states differ in dimension".into()));
        }
        let outcomes = responses_x[0].len();
        for row in responses_x.iter().chain(&responses_z) {
            let sum: f64 = row.iter().sum();
            if row.len() != outcomes
                || row.iter().any(|&p| p < -TOL.negative_probability)
                || (sum - 1.0).abs() > TOL.normalization
            {
                return Err(Error::InvalidDistribution("response is not row-stochastic".into()));
            }
        }
        Ok(LhsModel {
            weights,
            hidden_states,
            responses: [responses_x, responses_z],
            outcomes,
        })
    }

    pub fn weights(&self) -> &Distribution {
        &self.weights
    }

    pub fn hidden_states(&self) -> &[DensityMatrix] {
        &self.hidden_states
    }

    /// Alice's response for setting 0 (`X`) or 1 (`Z`).
    pub fn responses(&self, setting: usize) -> &[Vec<f64>] {
        &self.responses[setting]
    }

    pub fn outcomes(&self) -> usize {
        self.outcomes
    }

    pub fn dim(&self) -> usize {
        self.hidden_states[0].dim()
    }
}

fn dirichlet_row<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

/// Seeded model with stochastic responses; identical seeds give identical models.
pub fn sample_lhs_model(rng_seed: u64, d: usize, n_lambda: usize) -> LhsModel {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    sample_lhs_model_with(&mut rng, d, n_lambda, ResponseKind::Stochastic)
}

/// Random model: flat-Dirichlet weights, hidden states that are random
/// mixtures of `2d` Haar-random pure states, and `d`-outcome responses.
pub fn sample_lhs_model_with<R: Rng + ?Sized>(
    rng: &mut R,
    d: usize,
    n_lambda: usize,
    kind: ResponseKind,
) -> LhsModel {
    let n = n_lambda.max(1);
    let weights = Distribution::new(dirichlet_row(rng, n)).expect("normalised weights");
    let hidden_states = (0..n).map(|_| qobj::random_density_matrix(rng, d, 2 * d)).collect();
    let response = |rng: &mut R| -> Vec<Vec<f64>> {
        (0..n)
            .map(|_| match kind {
                ResponseKind::Stochastic => dirichlet_row(rng, d),
                ResponseKind::Deterministic => {
                    let mut row = vec![0.0; d];
                    row[rng.random_range(0..d)] = 1.0;
                    row
                }
            })
            .collect()
    };
    let rx = response(rng);
    let rz = response(rng);
    LhsModel {
        weights,
        hidden_states,
        responses: [rx, rz],
        outcomes: d,
    }
}

/// Observable data of a model: `p(b, a) = Σ_λ p(λ) p(a|λ) Tr[F_b σ_λ]` for
/// each of Bob's settings, returned as `(X table, Z table)`.
pub fn lhs_statistics(m: &LhsModel, bob_x: &Povm, bob_z: &Povm) -> Result<(JointDistribution, JointDistribution)> {
    let table = |setting: usize, bob: &Povm| -> Result<JointDistribution> {
        if bob.dim() != m.dim() {
            return Err(Error::DimensionMismatch {
                expected: m.dim(),
                found: bob.dim(),
            });
        }
        let (nb, na) = (bob.outcomes(), m.outcomes);
        let mut data = vec![0.0; nb * na];
        for (lam, sigma) in m.hidden_states.iter().enumerate() {
            let w = m.weights.probs()[lam];
            let resp = &m.responses[setting][lam];
            for (b, f) in bob.effects().iter().enumerate() {
                let pb = f.mul(&sigma.as_operator()).trace().re;
                for (a, &ra) in resp.iter().enumerate() {
                    data[b * na + a] += w * ra * pb;
                }
            }
        }
        JointDistribution::new(nb, na, data)
    };
    Ok((table(0, bob_x)?, table(1, bob_z)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qobj::{depolarize, max_entangled_state, mub_pair, Visibility};
    use approx::assert_abs_diff_eq;

    #[test]
    fn overlap_bound_cases() {
        for d in [2, 3, 5] {
            let (z, x) = mub_pair(d).unwrap();
            assert_abs_diff_eq!(overlap_bound(&x, &z).unwrap(), (d as f64).log2(), epsilon = 1e-12);
        }
        let (z, _) = mub_pair(3).unwrap();
        assert_abs_diff_eq!(overlap_bound(&z, &z).unwrap(), 0.0);

        // Qubit bases whose Bloch vectors are 60° apart.
        let t = std::f64::consts::PI / 3.0;
        let tilted = crate::qobj::qubit_povm(0.0, [t.sin(), 0.0, t.cos()]).unwrap();
        let (z2, _) = mub_pair(2).unwrap();
        assert_abs_diff_eq!(overlap_bound(&tilted, &z2).unwrap(), 0.415_037_499_278_843_8, epsilon = 1e-12);
        assert_eq!(overlap_bound(&tilted, &z2).unwrap(), overlap_bound(&z2, &tilted).unwrap());
    }

    #[test]
    fn overlap_bound_rejects_noisy_measurements() {
        let (z, x) = mub_pair(2).unwrap();
        let noisy = depolarize(&x, Visibility::new(0.5).unwrap());
        assert!(matches!(overlap_bound(&noisy, &z), Err(Error::UnsupportedBound(_))));
    }

    #[test]
    fn lhs_examples() {
        let u = JointDistribution::product(&Distribution::uniform(2), &Distribution::uniform(2));
        assert_abs_diff_eq!(steering_lhs(&u, &u, RenyiOrder::SHANNON).unwrap(), 2.0, epsilon = 1e-15);
        let corr = JointDistribution::from_rows(&[vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
        assert_abs_diff_eq!(steering_lhs(&corr, &corr, RenyiOrder::MAX_ENTROPY).unwrap(), 0.0, epsilon = 1e-15);
        assert!(matches!(
            steering_lhs(&corr, &corr, RenyiOrder::new(0.3).unwrap()),
            Err(Error::NoDual(_))
        ));
    }

    #[test]
    fn qubit_visibility_point_eight() {
        // p(b|a) = v δ + (1 - v)/2 at v = 0.8, max-entropy on X, min-entropy on Z.
        let rho = max_entangled_state(2).unwrap();
        let (z, x) = mub_pair(2).unwrap();
        let v = Visibility::new(0.8).unwrap();
        let jx = qobj::joint_distribution(&rho, &depolarize(&x, v), &x).unwrap();
        let jz = qobj::joint_distribution(&rho, &depolarize(&z, v), &z).unwrap();
        let hmax = conditional_renyi(&jx, RenyiOrder::MAX_ENTROPY);
        let hmin = conditional_renyi(&jz, RenyiOrder::MIN_ENTROPY);
        assert_abs_diff_eq!(hmax, 0.678_071_905_112_637_7, epsilon = 1e-12);
        assert_abs_diff_eq!(hmin, 0.152_003_093_445_049_98, epsilon = 1e-12);
        let lhs = steering_lhs(&jx, &jz, RenyiOrder::MAX_ENTROPY).unwrap();
        assert_abs_diff_eq!(lhs, 0.830_074_998_557_687_6, epsilon = 1e-12);
    }

    #[test]
    fn evaluate_examples() {
        let rho = max_entangled_state(2).unwrap();
        let (z, x) = mub_pair(2).unwrap();
        let cert = evaluate(&rho, &x, &z, &x, &z, RenyiOrder::MAX_ENTROPY).unwrap();
        assert_abs_diff_eq!(cert.violation, 1.0, epsilon = 1e-12);
        assert!(cert.detects_steering());
        assert_eq!(cert.beta, RenyiOrder::MIN_ENTROPY);
        assert_eq!(cert.violation, cert.bound - cert.lhs);

        let flat_x = depolarize(&x, Visibility::ZERO);
        let flat_z = depolarize(&z, Visibility::ZERO);
        let cert = evaluate(&rho, &flat_x, &flat_z, &x, &z, RenyiOrder::MAX_ENTROPY).unwrap();
        assert_abs_diff_eq!(cert.violation, 1.0 - 2.0, epsilon = 1e-12);

        let sep = DensityMatrix::maximally_mixed(4);
        for a in [0.5, 0.8, 1.0, 3.0, f64::INFINITY] {
            let cert = evaluate(&sep, &x, &z, &x, &z, RenyiOrder::new(a).unwrap()).unwrap();
            assert!(cert.violation <= 1e-12);
        }
    }

    #[test]
    fn sampled_models_are_reproducible_and_valid() {
        let a = sample_lhs_model(9, 3, 4);
        let b = sample_lhs_model(9, 3, 4);
        assert_eq!(a, b);
        assert_ne!(a, sample_lhs_model(10, 3, 4));
        LhsModel::new(
            a.weights().clone(),
            a.hidden_states().to_vec(),
            a.responses(0).to_vec(),
            a.responses(1).to_vec(),
        )
        .unwrap();
        for s in a.hidden_states() {
            DensityMatrix::new(s.matrix().clone()).unwrap();
        }
    }

    #[test]
    fn single_lambda_model_gives_product_statistics() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = sample_lhs_model_with(&mut rng, 2, 1, ResponseKind::Deterministic);
        let (z, x) = mub_pair(2).unwrap();
        let (jx, _) = lhs_statistics(&m, &x, &z).unwrap();
        let (pb, pa) = (jx.marginal_rows(), jx.marginal_cols());
        for b in 0..2 {
            for a in 0..2 {
                assert_abs_diff_eq!(jx.get(b, a), pb.probs()[b] * pa.probs()[a], epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn lambda_independent_responses_decouple_alice() {
        let psi = Ket::basis(2, 0).unwrap();
        let plus = Ket::normalized(vec![1.0.into(), 1.0.into()]).unwrap();
        let m = LhsModel::new(
            Distribution::new(vec![0.3, 0.7]).unwrap(),
            vec![DensityMatrix::from_ket(&psi), DensityMatrix::from_ket(&plus)],
            vec![vec![0.2, 0.8]; 2],
            vec![vec![0.6, 0.4]; 2],
        )
        .unwrap();
        let (z, x) = mub_pair(2).unwrap();
        let (_, jz) = lhs_statistics(&m, &x, &z).unwrap();
        let (pb, pa) = (jz.marginal_rows(), jz.marginal_cols());
        for b in 0..2 {
            for a in 0..2 {
                assert_abs_diff_eq!(jz.get(b, a), pb.probs()[b] * pa.probs()[a], epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn invalid_model_rejected() {
        let s = DensityMatrix::maximally_mixed(2);
        let err = LhsModel::new(Distribution::uniform(1), vec![s], vec![vec![0.5, 0.6]], vec![vec![1.0, 0.0]]);
        assert!(err.is_err());
    }
}
