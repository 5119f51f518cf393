//! End-to-end scans: shared state, noisy measurements for Alice, Born-rule
//! statistics, the entropic criterion, and the visibility at which it first
//! detects steering.
//!
//! Grid points are independent and run on the rayon pool; results are
//! collected in grid order, so output does not depend on scheduling.

use std::cell::RefCell;
use std::f64::consts::FRAC_1_SQRT_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::entropy::{dual_order, JointDistribution, RenyiOrder};
use crate::jointmeas::{self, bisect_boundary, bisect_threshold, ThresholdRecord};
use crate::optimize::{self, SearchOptions};
use crate::qobj::{self, norm3, DensityMatrix, Ket, Povm, Visibility};
use crate::steering::{self, basis_overlap_bound, ResponseKind, SteeringCertificate};
use crate::{Error, Result, Tolerances};

const TOL: Tolerances = Tolerances::DEFAULT;

/// Largest local dimension the Born-rule pipeline accepts; the joint state
/// has `d² × d²` entries.
pub const PIPELINE_MAX_DIM: usize = 32;

/// Everything needed to reproduce a scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanMetadata {
    pub name: String,
    /// Column name of [`ThresholdRecord::parameter`]: `d`, `theta`, `t` or `case`.
    pub parameter: String,
    pub alphas: Vec<RenyiOrder>,
    pub betas: Vec<RenyiOrder>,
    pub grid: Vec<f64>,
    pub tol: f64,
    pub seed: Option<u64>,
}

/// Threshold records sorted by parameter (then by `α`).
#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub records: Vec<ThresholdRecord>,
    pub metadata: ScanMetadata,
}

impl ScanResult {
    fn new(mut records: Vec<ThresholdRecord>, metadata: ScanMetadata) -> Self {
        records.sort_by(|a, b| {
            a.parameter.total_cmp(&b.parameter).then_with(|| {
                let key = |r: &ThresholdRecord| r.alpha.map_or(f64::NEG_INFINITY, |a| a.value());
                key(a).total_cmp(&key(b))
            })
        });
        ScanResult { records, metadata }
    }

    /// Records of one `α` series.
    pub fn series(&self, alpha: RenyiOrder) -> Vec<ThresholdRecord> {
        self.records.iter().filter(|r| r.alpha == Some(alpha)).copied().collect()
    }

    /// Distinct `α` values in record order of first appearance, sorted.
    pub fn alphas(&self) -> Vec<Option<RenyiOrder>> {
        let mut out: Vec<Option<RenyiOrder>> = Vec::new();
        for r in &self.records {
            if !out.contains(&r.alpha) {
                out.push(r.alpha);
            }
        }
        out.sort_by(|a, b| {
            let key = |x: &Option<RenyiOrder>| x.map_or(f64::NEG_INFINITY, |a| a.value());
            key(a).total_cmp(&key(b))
        });
        out
    }

    /// Detected thresholds never decrease along the parameter, up to `slack`.
    pub fn is_non_decreasing(&self, slack: f64) -> bool {
        self.records
            .windows(2)
            .all(|w| w[1].detected.value() >= w[0].detected.value() - slack)
    }

    /// Smallest `detected - exact` over records that carry an exact value.
    pub fn min_gap(&self) -> Option<f64> {
        self.records.iter().filter_map(|r| r.gap).reduce(f64::min)
    }
}

/// Shared state, Alice's ideal measurements and Bob's measurements.
///
/// Alice's measurements are depolarised to the scanned visibility; Bob's are
/// fixed projective bases.
#[derive(Debug, Clone)]
pub struct Setup {
    rho: DensityMatrix,
    alice_x: Povm,
    alice_z: Povm,
    bob_x: Vec<Ket>,
    bob_z: Vec<Ket>,
    bob_x_povm: Povm,
    bob_z_povm: Povm,
    bound: f64,
}

impl Setup {
    pub fn new(rho: DensityMatrix, alice_x: Povm, alice_z: Povm, bob_x: Vec<Ket>, bob_z: Vec<Ket>) -> Result<Self> {
        let bob_x_povm = Povm::from_basis(&bob_x)?;
        let bob_z_povm = Povm::from_basis(&bob_z)?;
        if alice_x.dim() * bob_x_povm.dim() != rho.dim() || alice_z.dim() * bob_z_povm.dim() != rho.dim() {
            return Err(Error::DimensionMismatch {
                expected: rho.dim(),
                found: alice_x.dim() * bob_x_povm.dim(),
            });
        }
        let bound = basis_overlap_bound(&bob_x, &bob_z);
        Ok(Setup {
            rho,
            alice_x,
            alice_z,
            bob_x,
            bob_z,
            bob_x_povm,
            bob_z_povm,
            bound,
        })
    }

    /// Maximally entangled state, Alice measuring `(ax, az)`, Bob the
    /// conjugate bases, which makes outcomes perfectly correlated at `v = 1`.
    pub fn max_entangled(ax: &[Ket], az: &[Ket]) -> Result<Self> {
        let d = ax.len();
        Setup::new(
            qobj::max_entangled_state(d)?,
            Povm::from_basis(ax)?,
            Povm::from_basis(az)?,
            ax.iter().map(Ket::conj).collect(),
            az.iter().map(Ket::conj).collect(),
        )
    }

    /// Computational (`Z`) and Fourier (`X`) bases on the maximally entangled state.
    pub fn mub(d: usize) -> Result<Self> {
        check_pipeline_dim(d)?;
        Setup::max_entangled(&qobj::fourier_basis(d)?, &qobj::computational_basis(d)?)
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn bob_bases(&self) -> (&[Ket], &[Ket]) {
        (&self.bob_x, &self.bob_z)
    }

    /// Same state and Alice, different Bob bases.
    pub fn with_bob(&self, bob_x: Vec<Ket>, bob_z: Vec<Ket>) -> Result<Self> {
        Setup::new(self.rho.clone(), self.alice_x.clone(), self.alice_z.clone(), bob_x, bob_z)
    }

    /// `X` and `Z` exchanged.
    pub fn swapped(&self) -> Self {
        Setup {
            rho: self.rho.clone(),
            alice_x: self.alice_z.clone(),
            alice_z: self.alice_x.clone(),
            bob_x: self.bob_z.clone(),
            bob_z: self.bob_x.clone(),
            bob_x_povm: self.bob_z_povm.clone(),
            bob_z_povm: self.bob_x_povm.clone(),
            bound: self.bound,
        }
    }

    /// `(X table, Z table)` at Alice's visibility `v`.
    pub fn statistics(&self, v: Visibility) -> Result<(JointDistribution, JointDistribution)> {
        let ax = qobj::depolarize(&self.alice_x, v);
        let az = qobj::depolarize(&self.alice_z, v);
        Ok((
            qobj::joint_distribution(&self.rho, &ax, &self.bob_x_povm)?,
            qobj::joint_distribution(&self.rho, &az, &self.bob_z_povm)?,
        ))
    }

    /// `α` scores the `X` pair, its dual the `Z` pair.
    pub fn certificate(&self, v: Visibility, alpha: RenyiOrder) -> Result<SteeringCertificate> {
        let (jx, jz) = self.statistics(v)?;
        steering::certify(&jx, &jz, self.bound, alpha)
    }

    /// Larger violation of the two assignments of `(α, β)` to `(X, Z)`.
    pub fn best_ordering_violation(&self, v: Visibility, alpha: RenyiOrder) -> Result<f64> {
        let (jx, jz) = self.statistics(v)?;
        let a = steering::certify(&jx, &jz, self.bound, alpha)?.violation;
        let b = steering::certify(&jx, &jz, self.bound, dual_order(alpha)?)?.violation;
        Ok(a.max(b))
    }

    /// Smallest visibility at which the criterion detects steering, or 1.
    pub fn threshold(&self, alpha: RenyiOrder, tol: f64) -> Result<Visibility> {
        detection_threshold(|v| Ok(self.certificate(v, alpha)?.violation), tol)
    }
}

fn check_pipeline_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    if d > PIPELINE_MAX_DIM {
        return Err(Error::OutOfRange {
            name: "d",
            value: d as f64,
            range: "[2, 32] for the full pipeline",
        });
    }
    Ok(())
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol < 0.5) {
        return Err(Error::OutOfRange {
            name: "tol",
            value: tol,
            range: "(0, 0.5)",
        });
    }
    Ok(())
}

/// Bisection on `violation(v) > detection margin`, returning 1 when even
/// `v = 1` is not detected.
fn detection_threshold<F>(violation: F, tol: f64) -> Result<Visibility>
where
    F: Fn(Visibility) -> Result<f64>,
{
    let err = RefCell::new(None);
    let pred = |v: f64| match Visibility::new(v).and_then(&violation) {
        Ok(x) => x > TOL.detection,
        Err(e) => {
            err.borrow_mut().get_or_insert(e);
            false
        }
    };
    if !pred(1.0) {
        return match err.into_inner() {
            Some(e) => Err(e),
            None => Ok(Visibility::ONE),
        };
    }
    let out = bisect_threshold(pred, tol);
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    out
}

/// Symmetric-noise thresholds for computational/Fourier bases, per `(d, α)`.
pub fn fig1_scan(d_values: &[usize], alphas: &[RenyiOrder], tol: f64) -> Result<ScanResult> {
    check_tol(tol)?;
    let betas = alphas.iter().map(|&a| dual_order(a)).collect::<Result<Vec<_>>>()?;
    for &d in d_values {
        check_pipeline_dim(d)?;
    }
    let points: Vec<(usize, RenyiOrder)> = d_values
        .iter()
        .flat_map(|&d| alphas.iter().map(move |&a| (d, a)))
        .collect();
    let records = points
        .par_iter()
        .map(|&(d, alpha)| {
            let detected = Setup::mub(d)?.threshold(alpha, tol)?;
            if alpha == RenyiOrder::MAX_ENTROPY {
                let formula = jointmeas::renyi_mub_threshold_symmetric(d, tol)?;
                if (formula.value() - detected.value()).abs() > 2.0 * tol + 1e-9 {
                    return Err(Error::Internal(format!(
                        "pipeline threshold {} disagrees with closed form {} at d = {d}",
                        detected.value(),
                        formula.value()
                    )));
                }
            }
            let exact = jointmeas::mub_jm_threshold_symmetric(d)?;
            Ok(ThresholdRecord::new(d as f64, Some(alpha), detected, Some(exact)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanResult::new(
        records,
        ScanMetadata {
            name: "mub-dimension".into(),
            parameter: "d".into(),
            alphas: alphas.to_vec(),
            betas,
            grid: d_values.iter().map(|&d| d as f64).collect(),
            tol,
            seed: None,
        },
    ))
}

/// Thresholds across `α` at fixed `d`, with checks that `α = 1` is the worst
/// order, `α = 1/2` the best, and that exchanging `X` and `Z` maps `α` to its dual.
pub fn alpha_optimality_check(d: usize, alpha_grid: &[RenyiOrder], tol: f64) -> Result<ScanResult> {
    check_tol(tol)?;
    for required in [RenyiOrder::MAX_ENTROPY, RenyiOrder::SHANNON, RenyiOrder::MIN_ENTROPY] {
        if !alpha_grid.contains(&required) {
            return Err(Error::InvalidOrder(required.value()));
        }
    }
    let betas = alpha_grid.iter().map(|&a| dual_order(a)).collect::<Result<Vec<_>>>()?;
    let setup = Setup::mub(d)?;
    let swapped = setup.swapped();
    let exact = jointmeas::mub_jm_threshold_symmetric(d)?;
    let rows = alpha_grid
        .par_iter()
        .zip(betas.par_iter())
        .map(|(&alpha, &beta)| {
            let t = setup.threshold(alpha, tol)?;
            let s = swapped.threshold(beta, tol)?;
            if (t.value() - s.value()).abs() > 2.0 * tol {
                return Err(Error::Internal(format!(
                    "swap symmetry broken at alpha = {alpha}: {} vs {}",
                    t.value(),
                    s.value()
                )));
            }
            Ok(ThresholdRecord::new(alpha.value(), Some(alpha), t, Some(exact)))
        })
        .collect::<Result<Vec<_>>>()?;
    let at = |a: RenyiOrder| rows.iter().find(|r| r.alpha == Some(a)).map(|r| r.detected.value());
    let shannon = at(RenyiOrder::SHANNON).unwrap_or(1.0);
    let best = at(RenyiOrder::MAX_ENTROPY).unwrap_or(0.0);
    for r in &rows {
        let v = r.detected.value();
        if v > shannon + 2.0 * tol || v < best - 2.0 * tol {
            return Err(Error::Internal(format!(
                "threshold {v} at alpha = {} lies outside [{best}, {shannon}]",
                r.parameter
            )));
        }
    }
    let mut result = ScanResult::new(
        rows,
        ScanMetadata {
            name: "alpha-optimality".into(),
            parameter: "alpha".into(),
            alphas: alpha_grid.to_vec(),
            betas,
            grid: alpha_grid.iter().map(|a| a.value()).collect(),
            tol,
            seed: None,
        },
    );
    result.metadata.grid.sort_by(f64::total_cmp);
    Ok(result)
}

/// Alice's unit Bloch vectors for angle `θ`: `(sin θ, 0, cos θ)` and
/// `(cos θ, 0, sin θ)`, which are `90° - 2θ` apart and each `θ` away from
/// Bob's `z` and `x` axes respectively.
pub fn qubit_angle_vectors(theta: f64) -> ([f64; 3], [f64; 3]) {
    let (s, c) = theta.sin_cos();
    ([s, 0.0, c], [c, 0.0, s])
}

fn qubit_basis(bloch: [f64; 3]) -> Result<Vec<Ket>> {
    qobj::qubit_povm(0.0, bloch)?
        .basis_vectors(TOL.projector)
        .ok_or_else(|| Error::Internal("sharp qubit measurement is not projective".into()))
}

/// Bob's axes for two Alice Bloch vectors: orthogonal, in the plane of `a`
/// and `b`, placed symmetrically around them. Returns `(z-partner, x-partner)`.
fn symmetric_bob_axes(a: [f64; 3], b: [f64; 3]) -> Result<([f64; 3], [f64; 3])> {
    let unit = |v: [f64; 3]| -> Result<[f64; 3]> {
        let n = norm3(v);
        if n < 1e-12 {
            return Err(Error::NotUnit(n));
        }
        Ok([v[0] / n, v[1] / n, v[2] / n])
    };
    let (a, b) = (unit(a)?, unit(b)?);
    let s = unit([a[0] + b[0], a[1] + b[1], a[2] + b[2]])?;
    let diff = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    let t = if norm3(diff) < 1e-12 {
        // Coincident vectors: any orthogonal direction will do.
        let helper = if s[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let dot = helper[0] * s[0] + helper[1] * s[1] + helper[2] * s[2];
        unit([helper[0] - dot * s[0], helper[1] - dot * s[1], helper[2] - dot * s[2]])?
    } else {
        unit(diff)?
    };
    let r = FRAC_1_SQRT_2;
    Ok((
        [r * (s[0] + t[0]), r * (s[1] + t[1]), r * (s[2] + t[2])],
        [r * (s[0] - t[0]), r * (s[1] - t[1]), r * (s[2] - t[2])],
    ))
}

/// Unbiased qubit measurements at angle `θ`, with Bob along `σ_z` and `σ_x`.
pub fn qubit_angle_setup(theta: f64) -> Result<Setup> {
    let (za, xa) = qubit_angle_vectors(theta);
    Setup::new(
        qobj::max_entangled_state(2)?,
        qobj::qubit_povm(0.0, xa)?,
        qobj::qubit_povm(0.0, za)?,
        qubit_basis([1.0, 0.0, 0.0])?,
        qubit_basis([0.0, 0.0, 1.0])?,
    )
}

/// Checks `p(b | a) = ½(1 ± v cos θ)` on both settings.
fn check_angle_probabilities(setup: &Setup, theta: f64) -> Result<()> {
    let v = Visibility::new(0.8)?;
    let (jx, jz) = setup.statistics(v)?;
    let high = 0.5 * (1.0 + v.value() * theta.cos());
    for j in [&jx, &jz] {
        for (pa, cond) in j.conditionals() {
            let mut c = cond.clone();
            c.sort_by(f64::total_cmp);
            if pa <= 0.0 || (c[1] - high).abs() > 1e-12 || (c[0] - (1.0 - high)).abs() > 1e-12 {
                return Err(Error::Internal(format!(
                    "conditional probabilities {cond:?} differ from ½(1 ± v cos θ) at θ = {theta}"
                )));
            }
        }
    }
    Ok(())
}

/// Thresholds for unbiased qubit pairs at angle `θ`, max-entropy on `X`.
pub fn qubit_angle_scan(theta_grid: &[f64], tol: f64) -> Result<ScanResult> {
    check_tol(tol)?;
    let records = theta_grid
        .par_iter()
        .map(|&theta| {
            if !(0.0..std::f64::consts::FRAC_PI_4).contains(&theta) {
                return Err(Error::OutOfRange {
                    name: "theta",
                    value: theta,
                    range: "[0, pi/4)",
                });
            }
            let setup = qubit_angle_setup(theta)?;
            check_angle_probabilities(&setup, theta)?;
            let detected = setup.threshold(RenyiOrder::MAX_ENTROPY, tol)?;
            let (za, xa) = qubit_angle_vectors(theta);
            let exact = jointmeas::qubit_exact_threshold(za, xa)?;
            Ok(ThresholdRecord::new(theta, Some(RenyiOrder::MAX_ENTROPY), detected, Some(exact)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanResult::new(
        records,
        ScanMetadata {
            name: "qubit-angle".into(),
            parameter: "theta".into(),
            alphas: vec![RenyiOrder::MAX_ENTROPY],
            betas: vec![RenyiOrder::MIN_ENTROPY],
            grid: theta_grid.to_vec(),
            tol,
            seed: None,
        },
    ))
}

/// One randomly drawn pair of sharp two-outcome qubit measurements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitPair {
    pub bias_x: f64,
    pub bloch_x: [f64; 3],
    pub bias_z: f64,
    pub bloch_z: [f64; 3],
}

impl QubitPair {
    /// `2 / (‖a + b‖ + ‖a − b‖)` for the two Bloch vectors, capped at 1.
    pub fn baseline(&self) -> f64 {
        let (a, b) = (self.bloch_x, self.bloch_z);
        let s = norm3([a[0] + b[0], a[1] + b[1], a[2] + b[2]]);
        let d = norm3([a[0] - b[0], a[1] - b[1], a[2] - b[2]]);
        (2.0 / (s + d)).min(1.0)
    }

    pub fn is_unbiased(&self) -> bool {
        self.bias_x == 0.0 && self.bias_z == 0.0
    }

    /// Unbiased with unit Bloch vectors.
    pub fn is_unbiased_sharp(&self) -> bool {
        self.is_unbiased() && (norm3(self.bloch_x) - 1.0).abs() < 1e-12 && (norm3(self.bloch_z) - 1.0).abs() < 1e-12
    }

    /// Compatibility boundary, known in closed form only for unbiased pairs.
    pub fn exact_threshold(&self) -> Option<f64> {
        self.is_unbiased().then(|| self.baseline())
    }
}

fn random_direction<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let v = [
            2.0 * rng.random::<f64>() - 1.0,
            2.0 * rng.random::<f64>() - 1.0,
            2.0 * rng.random::<f64>() - 1.0,
        ];
        let n = norm3(v);
        if n > 1e-3 && n <= 1.0 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

/// Cases `0 mod 4` are unbiased with unit Bloch vectors in the `xz` plane,
/// cases `2 mod 4` unbiased with random lengths `|m| ∈ [1/2, 1]`; the rest
/// also carry a bias with `|b| + |m| <= 1`.
fn draw_qubit_pair<R: Rng + ?Sized>(rng: &mut R, case: usize) -> QubitPair {
    if case % 4 == 0 {
        let theta = rng.random::<f64>() * 0.75;
        let (z, x) = qubit_angle_vectors(theta);
        return QubitPair {
            bias_x: 0.0,
            bloch_x: x,
            bias_z: 0.0,
            bloch_z: z,
        };
    }
    let biased = case % 4 != 2;
    let mut one = || {
        let len = 0.5 + 0.5 * rng.random::<f64>();
        let dir = random_direction(rng);
        let bias = if biased { (1.0 - len) * (2.0 * rng.random::<f64>() - 1.0) } else { 0.0 };
        (bias, [len * dir[0], len * dir[1], len * dir[2]])
    };
    let (bias_x, bloch_x) = one();
    let (bias_z, bloch_z) = one();
    QubitPair {
        bias_x,
        bloch_x,
        bias_z,
        bloch_z,
    }
}

/// Detection threshold with Bob's two bases optimised at every visibility.
///
/// The search starts from `setup`'s own Bob bases and from the best bases of
/// the previous bisection step.
pub fn optimized_threshold(setup: &Setup, alpha: RenyiOrder, tol: f64, opts: &SearchOptions) -> Result<Visibility> {
    let (ref_x, ref_z) = (setup.bob_x.clone(), setup.bob_z.clone());
    let warm: RefCell<Option<Vec<f64>>> = RefCell::new(None);
    let err = RefCell::new(None);
    let best = |v: f64| -> Result<f64> {
        let v = Visibility::new(v)?;
        let objective = |bx: &[Ket], bz: &[Ket]| setup.with_bob(bx.to_vec(), bz.to_vec())?.best_ordering_violation(v, alpha);
        let w = warm.borrow().clone();
        let r = optimize::maximize_over_bases(&ref_x, &ref_z, objective, opts, w.as_deref())?;
        *warm.borrow_mut() = Some(r.params);
        Ok(r.value)
    };
    let pred = |v: f64| match best(v) {
        Ok(x) => x > TOL.detection,
        Err(e) => {
            err.borrow_mut().get_or_insert(e);
            false
        }
    };
    let detected = if !pred(1.0) {
        Visibility::ONE
    } else {
        let b = bisect_boundary(pred, tol);
        if let Some(e) = err.borrow_mut().take() {
            return Err(e);
        }
        Visibility::new(b?.value)?
    };
    match err.into_inner() {
        Some(e) => Err(e),
        None => Ok(detected),
    }
}

/// Random pairs of binary qubit measurements: threshold with optimised Bob
/// bases. Unbiased pairs carry the exact boundary `2 / (‖a + b‖ + ‖a − b‖)`;
/// biased pairs carry none. Reports only; use [`qubit_random_pair`] to
/// recover the drawn measurements and their baseline.
pub fn qubit_random_povm_check(n_cases: usize, seed: u64, tol: f64) -> Result<ScanResult> {
    check_tol(tol)?;
    if n_cases == 0 {
        return Err(Error::OutOfRange {
            name: "n_cases",
            value: 0.0,
            range: "[1, inf)",
        });
    }
    let opts = SearchOptions::default();
    let records = (0..n_cases)
        .into_par_iter()
        .map(|case| {
            let pair = qubit_random_pair(seed, case);
            let setup = qubit_pair_setup(&pair)?;
            let detected = optimized_threshold(&setup, RenyiOrder::MAX_ENTROPY, tol, &opts)?;
            let exact = pair.exact_threshold().map(Visibility::new).transpose()?;
            Ok(ThresholdRecord::new(case as f64, Some(RenyiOrder::MAX_ENTROPY), detected, exact))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanResult::new(
        records,
        ScanMetadata {
            name: "qubit-random".into(),
            parameter: "case".into(),
            alphas: vec![RenyiOrder::MAX_ENTROPY],
            betas: vec![RenyiOrder::MIN_ENTROPY],
            grid: (0..n_cases).map(|c| c as f64).collect(),
            tol,
            seed: Some(seed),
        },
    ))
}

/// The pair drawn for `case` under `seed`.
pub fn qubit_random_pair(seed: u64, case: usize) -> QubitPair {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case as u64);
    draw_qubit_pair(&mut rng, case)
}

/// Maximally entangled qubits, Alice's pair as given, Bob starting from the
/// symmetric geometry around the transposed Bloch vectors.
pub fn qubit_pair_setup(pair: &QubitPair) -> Result<Setup> {
    let flip = |v: [f64; 3]| [v[0], -v[1], v[2]];
    let (bz, bx) = symmetric_bob_axes(flip(pair.bloch_z), flip(pair.bloch_x))?;
    Setup::new(
        qobj::max_entangled_state(2)?,
        qobj::qubit_povm(pair.bias_x, pair.bloch_x)?,
        qobj::qubit_povm(pair.bias_z, pair.bloch_z)?,
        qubit_basis(bx)?,
        qubit_basis(bz)?,
    )
}

/// The qutrit family at parameter `t`, Bob measuring the conjugate ideal bases.
pub fn d3_setup(t: f64) -> Result<Setup> {
    let (z, x) = qobj::rotated_d3_kets(t)?;
    Setup::max_entangled(&x, &z)
}

/// Thresholds along the qutrit family `t ∈ [0, 1/2]`, optionally with Bob's
/// bases optimised. Endpoints are checked: `t = 0` must reproduce the MUB
/// value and `t = 1/2` must never detect.
pub fn d3_family_scan(t_grid: &[f64], tol: f64, refine: bool) -> Result<ScanResult> {
    check_tol(tol)?;
    let opts = SearchOptions::default();
    let alpha = RenyiOrder::MAX_ENTROPY;
    let records = t_grid
        .par_iter()
        .map(|&t| {
            let setup = d3_setup(t)?;
            let detected = if refine {
                optimized_threshold(&setup, alpha, tol, &opts)?
            } else {
                detection_threshold(|v| setup.best_ordering_violation(v, alpha), tol)?
            };
            let exact = if t == 0.0 {
                Some(jointmeas::mub_jm_threshold_symmetric(3)?)
            } else if t == 0.5 {
                Some(Visibility::ONE)
            } else {
                None
            };
            if let Some(e) = exact {
                let slack = if t == 0.0 { 1e-5 } else { 0.0 };
                if (detected.value() - e.value()).abs() > slack {
                    return Err(Error::Internal(format!(
                        "endpoint t = {t}: detected {} but expected {}",
                        detected.value(),
                        e.value()
                    )));
                }
            }
            Ok(ThresholdRecord::new(t, Some(alpha), detected, exact))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanResult::new(
        records,
        ScanMetadata {
            name: if refine { "qutrit-family-optimized" } else { "qutrit-family" }.into(),
            parameter: "t".into(),
            alphas: vec![alpha],
            betas: vec![RenyiOrder::MIN_ENTROPY],
            grid: t_grid.to_vec(),
            tol,
            seed: None,
        },
    ))
}

/// One row of the asymmetric comparison between the two boundary curves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TightnessRow {
    pub d: usize,
    pub chi: f64,
    pub criterion: jointmeas::EtaSolution,
    pub exact: jointmeas::EtaSolution,
}

impl TightnessRow {
    pub fn difference(&self) -> f64 {
        (self.criterion.visibility.value() - self.exact.visibility.value()).abs()
    }
}

/// `va` boundaries from the criterion and from exact compatibility, on an
/// `n_chi`-point grid of `vx ∈ [0, 1]`, for each `d`.
pub fn tightness_scan(d_values: &[usize], n_chi: usize, tol: f64) -> Result<Vec<TightnessRow>> {
    check_tol(tol)?;
    if n_chi < 2 {
        return Err(Error::OutOfRange {
            name: "n_chi",
            value: n_chi as f64,
            range: "[2, inf)",
        });
    }
    let points: Vec<(usize, f64)> = d_values
        .iter()
        .flat_map(|&d| (0..n_chi).map(move |k| (d, k as f64 / (n_chi - 1) as f64)))
        .collect();
    points
        .par_iter()
        .map(|&(d, chi)| {
            let vx = Visibility::new(chi)?;
            Ok(TightnessRow {
                d,
                chi,
                criterion: jointmeas::renyi_eta_of_chi(d, vx, tol)?,
                exact: jointmeas::exact_eta_of_chi(d, vx, tol)?,
            })
        })
        .collect()
}

/// Largest violation seen over sampled local-hidden-state models.
#[derive(Debug, Clone, PartialEq)]
pub struct LhsReport {
    pub seed: u64,
    pub n_models: usize,
    pub max_violation: f64,
    /// Model index, dimension and `α` of the largest violation.
    pub worst_model: usize,
    pub worst_dim: usize,
    pub worst_alpha: RenyiOrder,
    /// Largest violation per order, in the order of [`LHS_ALPHAS`].
    pub per_alpha: Vec<(RenyiOrder, f64)>,
}

impl LhsReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_violation <= tol
    }
}

/// Orders tested by [`lhs_falsification_suite`].
pub const LHS_ALPHAS: [f64; 5] = [0.5, 0.7, 1.0, 2.0, f64::INFINITY];

/// Parameters of model `index`: dimension, hidden-variable count, response kind.
pub fn lhs_model_shape(index: usize) -> (usize, usize, ResponseKind) {
    let d = 2 + (index / 2) % 2;
    let n_lambda = [1, 2, 4, 8][(index / 4) % 4];
    let kind = if index % 2 == 0 {
        ResponseKind::Deterministic
    } else {
        ResponseKind::Stochastic
    };
    (d, n_lambda, kind)
}

/// Samples `n_models` local-hidden-state models and evaluates every
/// criterion on their statistics, with Bob measuring the
/// computational/Fourier pair and a Haar-random pair of bases.
pub fn lhs_falsification_suite(seed: u64, n_models: usize) -> Result<LhsReport> {
    if n_models == 0 {
        return Err(Error::OutOfRange {
            name: "n_models",
            value: 0.0,
            range: "[1, inf)",
        });
    }
    let alphas = LHS_ALPHAS.iter().map(|&a| RenyiOrder::new(a)).collect::<Result<Vec<_>>>()?;
    let per_model = (0..n_models)
        .into_par_iter()
        .map(|index| -> Result<Vec<f64>> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(index as u64);
            let (d, n_lambda, kind) = lhs_model_shape(index);
            let model = steering::sample_lhs_model_with(&mut rng, d, n_lambda, kind);
            let rx = qobj::basis_from_unitary(&qobj::random_unitary(&mut rng, d))?;
            let rz = qobj::basis_from_unitary(&qobj::random_unitary(&mut rng, d))?;
            let mut out = vec![f64::NEG_INFINITY; alphas.len()];
            for (bx, bz) in [(qobj::fourier_basis(d)?, qobj::computational_basis(d)?), (rx, rz)] {
                let bound = basis_overlap_bound(&bx, &bz);
                let (jx, jz) = steering::lhs_statistics(&model, &Povm::from_basis(&bx)?, &Povm::from_basis(&bz)?)?;
                for (slot, &alpha) in out.iter_mut().zip(&alphas) {
                    let v = steering::certify(&jx, &jz, bound, alpha)?.violation;
                    *slot = slot.max(v);
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut per_alpha: Vec<(RenyiOrder, f64)> = alphas.iter().map(|&a| (a, f64::NEG_INFINITY)).collect();
    let (mut worst_model, mut worst_k, mut max_violation) = (0, 0, f64::NEG_INFINITY);
    for (index, row) in per_model.iter().enumerate() {
        for (k, &v) in row.iter().enumerate() {
            per_alpha[k].1 = per_alpha[k].1.max(v);
            if v > max_violation {
                (worst_model, worst_k, max_violation) = (index, k, v);
            }
        }
    }
    Ok(LhsReport {
        seed,
        n_models,
        max_violation,
        worst_model,
        worst_dim: lhs_model_shape(worst_model).0,
        worst_alpha: alphas[worst_k],
        per_alpha,
    })
}

/// Certificate for the computational/Fourier scenario at one visibility.
pub fn mub_certificate(d: usize, v: Visibility, alpha: RenyiOrder) -> Result<SteeringCertificate> {
    Setup::mub(d)?.certificate(v, alpha)
}

/// Threshold of the computational/Fourier scenario: full pipeline up to
/// [`PIPELINE_MAX_DIM`], closed form beyond it (only for `α = 1/2`).
pub fn mub_threshold(d: usize, alpha: RenyiOrder, tol: f64) -> Result<Visibility> {
    check_tol(tol)?;
    if d > PIPELINE_MAX_DIM && alpha == RenyiOrder::MAX_ENTROPY {
        return jointmeas::renyi_mub_threshold_symmetric(d, tol);
    }
    Setup::mub(d)?.threshold(alpha, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn mub_statistics_match_closed_form() {
        for d in [2, 3, 5] {
            let s = Setup::mub(d).unwrap();
            for v in [0.0, 0.3, 0.7, 1.0] {
                let (jx, jz) = s.statistics(Visibility::new(v).unwrap()).unwrap();
                for j in [jx, jz] {
                    for b in 0..d {
                        for a in 0..d {
                            let want = (v * if a == b { 1.0 } else { 0.0 } + (1.0 - v) / d as f64) / d as f64;
                            assert_abs_diff_eq!(j.get(b, a), want, epsilon = 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn qubit_pipeline_threshold() {
        let v = mub_threshold(2, RenyiOrder::MAX_ENTROPY, 1e-9).unwrap();
        assert_abs_diff_eq!(v.value(), FRAC_1_SQRT_2, epsilon = 1e-8);
        assert!(mub_threshold(400, RenyiOrder::SHANNON, 1e-9).is_err());
        assert!((mub_threshold(400, RenyiOrder::MAX_ENTROPY, 1e-9).unwrap().value() - 0.5).abs() < 0.03);
    }

    #[test]
    fn fig1_small() {
        let r = fig1_scan(&[3, 2], &[RenyiOrder::SHANNON, RenyiOrder::MAX_ENTROPY], 1e-8).unwrap();
        assert_eq!(r.records.len(), 4);
        assert_eq!(r.records[0].parameter, 2.0);
        assert_eq!(r.records[0].alpha, Some(RenyiOrder::MAX_ENTROPY));
        assert!(r.records[0].gap.unwrap().abs() < 1e-6);
        assert!(r.records[1].gap.unwrap() > 1e-4);
        assert!(r.min_gap().unwrap() > -1e-9);
        assert!(fig1_scan(&[2], &[RenyiOrder::new(0.3).unwrap()], 1e-8).is_err());
    }

    #[test]
    fn angle_scan_and_vectors() {
        let (z, x) = qubit_angle_vectors(0.3);
        assert_abs_diff_eq!(z[0] * x[0] + z[2] * x[2], (0.6f64).sin(), epsilon = 1e-15);
        let r = qubit_angle_scan(&[0.0, std::f64::consts::FRAC_PI_6], 1e-9).unwrap();
        for rec in &r.records {
            assert!(rec.gap.unwrap().abs() < 1e-6);
        }
        assert!(qubit_angle_scan(&[0.8], 1e-9).is_err());
    }

    #[test]
    fn symmetric_axes_reproduce_angle_geometry() {
        let (z, x) = qubit_angle_vectors(0.2);
        let (bz, bx) = symmetric_bob_axes(z, x).unwrap();
        for (got, want) in bz.iter().zip([0.0, 0.0, 1.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
        for (got, want) in bx.iter().zip([1.0, 0.0, 0.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn d3_endpoints() {
        let r = d3_family_scan(&[0.0, 0.5], 1e-8, false).unwrap();
        assert_abs_diff_eq!(r.records[0].detected.value(), 0.683_012_701_892_219_3, epsilon = 1e-5);
        assert_eq!(r.records[1].detected, Visibility::ONE);
    }

    #[test]
    fn lhs_suite_small() {
        let a = lhs_falsification_suite(5, 40).unwrap();
        assert!(a.passes(1e-9), "{a:?}");
        assert_eq!(a, lhs_falsification_suite(5, 40).unwrap());
        let one = lhs_falsification_suite(5, 1).unwrap();
        assert_eq!(lhs_model_shape(0), (2, 1, ResponseKind::Deterministic));
        assert!(one.max_violation < -1e-6, "{one:?}");
    }

    #[test]
    fn tightness_rows_agree() {
        let tol = 1e-9;
        let rows = tightness_scan(&[2, 3, 6], 11, tol).unwrap();
        assert_eq!(rows.len(), 33);
        for r in rows {
            assert!(r.difference() <= 5.0 * tol, "{r:?}");
        }
    }
}
