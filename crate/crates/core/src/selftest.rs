//! The acceptance checks, runnable from the library, the CLI and the test suite.
//!
//! Each check returns a [`CriterionOutcome`] with a one-line summary. Numerical
//! tolerances and time budgets are fixed here.

use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::entropy::{
    arimoto_formula, conditional_renyi, conditional_tsallis, renyi_entropy, tsallis_entropy, Distribution,
    JointDistribution, RenyiOrder, TsallisOrder,
};
use crate::jointmeas;
use crate::qobj::{self, Visibility};
use crate::scenarios::{self, Setup};
use crate::{Error, Result, Tolerances};

/// Outcome of one acceptance check.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}. {}: {} ({:.2} s of {} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs()
        )
    }
}

/// Identifier, title and time budget in seconds of every check.
pub const CRITERIA: [(u8, &str, u64); 8] = [
    (1, "MUB tightness", 5),
    (2, "qubit threshold", 1),
    (3, "large-d limit", 5),
    (4, "Shannon suboptimality", 30),
    (5, "qubit angle equivalence", 10),
    (6, "qutrit family endpoints", 60),
    (7, "LHS soundness", 120),
    (8, "entropy properties", 60),
];

/// Runs check `id` (1 to 8).
pub fn run_criterion(id: u8) -> Result<CriterionOutcome> {
    let &(_, title, budget) = CRITERIA.iter().find(|c| c.0 == id).ok_or(Error::OutOfRange {
        name: "criterion",
        value: id as f64,
        range: "1..=8",
    })?;
    let start = Instant::now();
    let result = match id {
        1 => mub_tightness(),
        2 => qubit_threshold(),
        3 => large_d_limit(),
        4 => shannon_suboptimality(),
        5 => qubit_angle_equivalence(),
        6 => qutrit_family(),
        7 => lhs_soundness(),
        _ => entropy_properties(),
    };
    let elapsed = start.elapsed();
    let budget = Duration::from_secs(budget);
    let (mut passed, mut detail) = match result {
        Ok((passed, detail)) => (passed, detail),
        Err(e) => (false, format!("error: {e}")),
    };
    if elapsed > budget {
        passed = false;
        detail.push_str("; over time budget");
    }
    Ok(CriterionOutcome {
        id,
        title,
        passed,
        detail,
        elapsed,
        budget,
    })
}

/// Runs every check in order.
pub fn run_all() -> Vec<CriterionOutcome> {
    CRITERIA
        .iter()
        .map(|c| run_criterion(c.0).expect("listed criterion"))
        .collect()
}

type Check = Result<(bool, String)>;

const BISECTION_TOL: f64 = 1e-9;

fn mub_tightness() -> Check {
    const SYMMETRIC_TOL: f64 = 1e-6;
    const CURVE_TOL: f64 = 2e-6;
    let mut worst = 0.0f64;
    for d in 2..=10 {
        let closed = (d as f64).sqrt();
        let closed = (closed + 2.0) / (2.0 * (closed + 1.0));
        let v = jointmeas::renyi_mub_threshold_symmetric(d, BISECTION_TOL)?.value();
        worst = worst.max((v - closed).abs());
    }
    let d_values: Vec<usize> = (2..=10).collect();
    let rows = scenarios::tightness_scan(&d_values, 21, BISECTION_TOL)?;
    let curve = rows.iter().map(|r| r.difference()).fold(0.0, f64::max);
    Ok((
        worst <= SYMMETRIC_TOL && curve <= CURVE_TOL,
        format!("symmetric max deviation {worst:.2e}, asymmetric curves max deviation {curve:.2e} over {} points", rows.len()),
    ))
}

// Six-digit values as printed, not approximations of a constant.
#[allow(clippy::approx_constant)]
fn qubit_threshold() -> Check {
    const TOL: f64 = 1e-5;
    let v = Setup::mub(2)?.threshold(RenyiOrder::MAX_ENTROPY, BISECTION_TOL)?;
    let ok = (v.value() - 0.707107).abs() <= TOL && (v.noise() - 0.292893).abs() <= TOL;
    Ok((ok, format!("visibility {:.6}, noise {:.6}", v.value(), v.noise())))
}

fn large_d_limit() -> Check {
    const LIMIT_TOL: f64 = 0.03;
    let ds = [2usize, 10, 50, 400];
    let vs = ds
        .iter()
        .map(|&d| Ok(jointmeas::renyi_mub_threshold_symmetric(d, BISECTION_TOL)?.value()))
        .collect::<Result<Vec<f64>>>()?;
    let decreasing = vs.windows(2).all(|w| w[1] < w[0]);
    let last = vs[vs.len() - 1];
    Ok((
        decreasing && (last - 0.5).abs() <= LIMIT_TOL,
        format!(
            "thresholds {} at d = 2, 10, 50, 400",
            vs.iter().map(|v| format!("{v:.6}")).collect::<Vec<_>>().join(", ")
        ),
    ))
}

fn shannon_suboptimality() -> Check {
    const MARGIN: f64 = 1e-4;
    let orders = [0.5, 0.7, 1.0, 2.0].map(|a| RenyiOrder::new(a).expect("valid order"));
    let d_values: Vec<usize> = (2..=8).collect();
    let scan = scenarios::fig1_scan(&d_values, &orders, BISECTION_TOL)?;
    let mut ok = true;
    let mut smallest = f64::INFINITY;
    for &d in &d_values {
        let at = |a: RenyiOrder| {
            scan.records
                .iter()
                .find(|r| r.parameter == d as f64 && r.alpha == Some(a))
                .map(|r| r.detected.value())
                .unwrap_or(f64::NAN)
        };
        let [half, seven, one, two] = orders.map(at);
        smallest = smallest.min(one - half);
        ok &= one - half > MARGIN;
        ok &= half < seven && seven < one && half < two && two < one;
    }
    Ok((ok, format!("smallest Shannon excess {smallest:.4} over d = 2..8; intermediate orders in between")))
}

fn qubit_angle_equivalence() -> Check {
    const PIPELINE_TOL: f64 = 1e-5;
    const FORMULA_TOL: f64 = 1e-12;
    let grid: Vec<f64> = (0..20).map(|k| 0.76 * k as f64 / 19.0).collect();
    let scan = scenarios::qubit_angle_scan(&grid, BISECTION_TOL)?;
    let (mut pipe, mut formula) = (0.0f64, 0.0f64);
    for r in &scan.records {
        let theta = r.parameter;
        let closed = 1.0 / (std::f64::consts::SQRT_2 * theta.cos());
        pipe = pipe.max((r.detected.value() - closed).abs());
        let (z, x) = scenarios::qubit_angle_vectors(theta);
        formula = formula.max((closed - jointmeas::qubit_exact_threshold(z, x)?.value()).abs());
    }
    Ok((
        pipe <= PIPELINE_TOL && formula <= FORMULA_TOL,
        format!("pipeline deviation {pipe:.2e}, formula deviation {formula:.2e} over {} angles", grid.len()),
    ))
}

fn qutrit_family() -> Check {
    const ENDPOINT_TOL: f64 = 1e-5;
    let grid: Vec<f64> = (0..=10).map(|k| k as f64 / 20.0).collect();
    let scan = scenarios::d3_family_scan(&grid, BISECTION_TOL, false)?;
    let first = scan.records[0].detected.value();
    let expected = (1.0 + 3f64.sqrt()) / 4.0;
    let end = d3_never_detects()?;
    let monotone = scan.is_non_decreasing(0.0);
    let ok = (first - expected).abs() <= ENDPOINT_TOL && end && monotone;
    Ok((
        ok,
        format!(
            "t = 0 threshold {first:.6}, t = 1/2 {}, {} on 11 points",
            if end { "never detects" } else { "detects" },
            if monotone { "non-decreasing" } else { "not monotone" }
        ),
    ))
}

/// At `t = 1/2` no visibility on a fine grid gives any violation.
fn d3_never_detects() -> Result<bool> {
    let setup = scenarios::d3_setup(0.5)?;
    for k in 0..=200 {
        let v = Visibility::new(k as f64 / 200.0)?;
        if setup.best_ordering_violation(v, RenyiOrder::MAX_ENTROPY)? > Tolerances::DEFAULT.detection {
            return Ok(false);
        }
    }
    Ok(true)
}

fn lhs_soundness() -> Check {
    const MAX_VIOLATION: f64 = 1e-9;
    let report = scenarios::lhs_falsification_suite(42, 10_000)?;
    Ok((
        report.passes(MAX_VIOLATION),
        format!(
            "{} models, largest violation {:.3e} (model {}, d = {}, alpha = {})",
            report.n_models, report.max_violation, report.worst_model, report.worst_dim, report.worst_alpha
        ),
    ))
}

fn random_probs<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    // Exponential weights with occasional zeros.
    let w: Vec<f64> = (0..n)
        .map(|_| {
            if rng.random::<f64>() < 0.1 {
                0.0
            } else {
                -rng.random::<f64>().max(1e-300).ln()
            }
        })
        .collect();
    let total: f64 = w.iter().sum();
    if total == 0.0 {
        return Distribution::deterministic(n, 0).probs().to_vec();
    }
    w.into_iter().map(|x| x / total).collect()
}

/// Random `p(x, y)` table.
pub fn random_joint<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> JointDistribution {
    JointDistribution::new(rows, cols, random_probs(rng, rows * cols)).expect("normalised table")
}

/// Random distribution with occasional zero entries.
pub fn random_distribution<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Distribution {
    Distribution::new(random_probs(rng, n)).expect("normalised")
}

const ENTROPY_SEED: u64 = 2718;
const PROPERTY_TOL: f64 = 1e-10;

/// Failures of the entropy property checks, one message per failed property.
pub fn entropy_property_failures() -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(ENTROPY_SEED);
    let mut failures = Vec::new();
    let mut check = |ok: bool, what: String| {
        if !ok {
            failures.push(what);
        }
    };
    let orders = [0.5, 0.7, 1.0, 2.0, f64::INFINITY].map(|a| RenyiOrder::new(a).expect("valid order"));

    // Dispatched closed forms against the generic formula next to α = 1 and α = ∞.
    for _ in 0..50 {
        let j = random_joint(&mut rng, 4, 3);
        for eps in [1e-11, 1e-12, -1e-11, -1e-12] {
            let diff = (arimoto_formula(&j, 1.0 + eps) - conditional_renyi(&j, RenyiOrder::SHANNON)).abs();
            check(diff <= PROPERTY_TOL, format!("dispatch near 1: deviation {diff:.2e}"));
        }
        for big in [1e11, 1e13] {
            let diff = (arimoto_formula(&j, big) - conditional_renyi(&j, RenyiOrder::MIN_ENTROPY)).abs();
            check(diff <= PROPERTY_TOL, format!("dispatch near inf: deviation {diff:.2e}"));
        }
        let diff = (arimoto_formula(&j, 0.5) - conditional_renyi(&j, RenyiOrder::MAX_ENTROPY)).abs();
        check(diff <= PROPERTY_TOL, format!("dispatch at 1/2: deviation {diff:.2e}"));
    }

    // Conditioning on more data never increases entropy.
    for _ in 0..500 {
        let (nx, n1, n2) = (rng.random_range(2..=5), rng.random_range(2..=5), rng.random_range(2..=5));
        let fine = random_joint(&mut rng, nx, n1 * n2);
        let map: Vec<usize> = (0..n1 * n2).map(|c| c / n2).collect();
        let coarse = fine.merge_cols(&map, n1).expect("valid map");
        for &a in &orders {
            let (h1, h12) = (conditional_renyi(&coarse, a), conditional_renyi(&fine, a));
            check(h1 >= h12 - PROPERTY_TOL, format!("conditioning at alpha = {a}: {h1} < {h12}"));
        }
    }

    // Independent side information changes nothing.
    for _ in 0..200 {
        let nx = rng.random_range(2..=5);
        let px = random_distribution(&mut rng, nx);
        let ny = rng.random_range(2..=5);
        let py = random_distribution(&mut rng, ny);
        let j = JointDistribution::product(&px, &py);
        for &a in &orders {
            let diff = (conditional_renyi(&j, a) - renyi_entropy(&px, a)).abs();
            check(diff <= PROPERTY_TOL, format!("uncorrelated limit at alpha = {a}: {diff:.2e}"));
        }
    }

    // Conditional Shannon entropy is concave.
    for _ in 0..300 {
        let (nx, ny, k) = (rng.random_range(2..=5), rng.random_range(2..=5), rng.random_range(2..=4));
        let parts: Vec<JointDistribution> = (0..k).map(|_| random_joint(&mut rng, nx, ny)).collect();
        let w = random_distribution(&mut rng, k);
        let mix = JointDistribution::mixture(
            &w.probs().iter().copied().zip(parts.iter()).collect::<Vec<_>>(),
        )
        .expect("same shape");
        let avg: f64 = w
            .probs()
            .iter()
            .zip(&parts)
            .map(|(p, j)| p * conditional_renyi(j, RenyiOrder::SHANNON))
            .sum();
        let h = conditional_renyi(&mix, RenyiOrder::SHANNON);
        check(h >= avg - PROPERTY_TOL, format!("concavity: {h} < {avg}"));
    }

    // Uncertainty relation for qubit MUBs.
    let (z, x) = qobj::mub_pair(2).expect("d = 2");
    let pairs = [(0.5, f64::INFINITY), (1.0, 1.0), (2.0, 2.0 / 3.0)]
        .map(|(a, b)| (RenyiOrder::new(a).expect("order"), RenyiOrder::new(b).expect("order")));
    for _ in 0..1000 {
        let psi = qobj::random_ket(&mut rng, 2);
        let born = |p: &qobj::Povm| {
            let probs = p
                .effects()
                .iter()
                .map(|e| {
                    let v = e.matrix() * psi.amplitudes();
                    psi.amplitudes().dotc(&v).re
                })
                .collect();
            Distribution::new(probs).expect("Born rule")
        };
        let (pz, px) = (born(&z), born(&x));
        for (a, b) in pairs {
            let s = renyi_entropy(&px, a) + renyi_entropy(&pz, b);
            check(s >= 1.0 - PROPERTY_TOL, format!("uncertainty relation ({a}, {b}): {s}"));
        }
    }

    // Tsallis identities.
    for _ in 0..200 {
        let nx = rng.random_range(2..=5);
        let px = random_distribution(&mut rng, nx);
        let ny = rng.random_range(2..=5);
        let py = random_distribution(&mut rng, ny);
        let prod = JointDistribution::product(&px, &py);
        let (r, c) = (rng.random_range(2..=5), rng.random_range(2..=5));
        let j = random_joint(&mut rng, r, c);
        for qv in [0.5, 1.2, 1.5, 2.0, 3.0] {
            let q = TsallisOrder::new(qv).expect("order");
            let (sx, sy) = (tsallis_entropy(&px, q), tsallis_entropy(&py, q));
            let sxy = tsallis_entropy(&prod.flatten(), q);
            let pseudo = (sxy - (sx + sy + (1.0 - qv) * sx * sy)).abs();
            check(pseudo <= 1e-12, format!("pseudo-additivity q = {qv}: {pseudo:.2e}"));

            let chain = (tsallis_entropy(&j.flatten(), q)
                - conditional_tsallis(&j, q)
                - tsallis_entropy(&j.marginal_cols(), q))
            .abs();
            check(chain <= 1e-12, format!("chain rule q = {qv}: {chain:.2e}"));

            if qv > 1.0 {
                let joint = tsallis_entropy(&j.flatten(), q);
                let sum = tsallis_entropy(&j.marginal_rows(), q) + tsallis_entropy(&j.marginal_cols(), q);
                check(joint <= sum + 1e-12, format!("subadditivity q = {qv}: {joint} > {sum}"));
            }
        }
    }

    // The uncorrelated limit does not carry over to Tsallis entropies.
    let bit = Distribution::uniform(2);
    let prod = JointDistribution::product(&bit, &bit);
    let q = TsallisOrder::new(2.0).expect("order");
    let drop = tsallis_entropy(&bit, q) - conditional_tsallis(&prod, q);
    check(drop > 1e-6, format!("Tsallis uncorrelated limit unexpectedly holds ({drop:.2e})"));

    // Rényi entropy is non-increasing in α.
    let ladder = [0.0, 0.2, 0.5, 0.7, 1.0, 1.5, 2.0, 5.0, 50.0, f64::INFINITY]
        .map(|a| RenyiOrder::new(a).expect("order"));
    for _ in 0..200 {
        let n = rng.random_range(2..=6);
        let p = random_distribution(&mut rng, n);
        let h: Vec<f64> = ladder.iter().map(|&a| renyi_entropy(&p, a)).collect();
        check(
            h.windows(2).all(|w| w[1] <= w[0] + 1e-12),
            format!("monotonicity in alpha: {h:?}"),
        );
    }

    failures
}

fn entropy_properties() -> Check {
    let failures = entropy_property_failures();
    Ok(match failures.first() {
        None => (true, "dispatch, conditioning, uncorrelated limit, concavity, uncertainty relation, Tsallis identities and failure of the Tsallis uncorrelated limit".into()),
        Some(first) => (false, format!("{} failures, first: {first}", failures.len())),
    })
}
