//! Classical entropies: Rényi (with Shannon, max- and min-entropy as special
//! orders), the Arimoto conditional Rényi entropy, and Tsallis entropies.
//!
//! Rényi quantities are returned in bits, Tsallis quantities in nats.
//! `0 log 0 = 0` throughout and conditioning values with zero weight are
//! skipped.
//!
//! The generic Rényi evaluation is written in terms of `expm1`/`ln_1p` so that
//! it stays accurate arbitrarily close to `α = 1`, and rescales by the largest
//! probability so that it does not underflow for very large `α`.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use crate::{Error, Result, Tolerances};

const TOL: Tolerances = Tolerances::DEFAULT;

/// Orders with `|α - 1|` below this are evaluated as Shannon entropy.
pub const SHANNON_WINDOW: f64 = 1e-9;

fn clean_probabilities(mut probs: Vec<f64>) -> Result<Vec<f64>> {
    let mut total = 0.0;
    for p in probs.iter_mut() {
        if !p.is_finite() || *p < -TOL.negative_probability {
            return Err(Error::InvalidDistribution(format!("entry {p} is not a probability")));
        }
        if *p < 0.0 {
            *p = 0.0;
        }
        total += *p;
    }
    if (total - 1.0).abs() > TOL.normalization {
        return Err(Error::InvalidDistribution(format!("total mass {total} != 1")));
    }
    Ok(probs)
}

/// A probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution(Vec<f64>);

impl Distribution {
    /// Validates the entries; tiny negative values are clamped to zero.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty".into()));
        }
        clean_probabilities(probs).map(Distribution)
    }

    pub fn uniform(n: usize) -> Self {
        Distribution(vec![1.0 / n as f64; n])
    }

    pub fn deterministic(n: usize, k: usize) -> Self {
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        Distribution(v)
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A joint distribution `p(x, y)` stored as a `rows x cols` table.
///
/// Rows index `X`, the variable whose entropy is taken; columns index `Y`,
/// the variable conditioned on.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl JointDistribution {
    /// `data` is row-major: entry `(x, y)` lives at `x * cols + y`.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::InvalidDistribution(format!(
                "table of {} entries does not have shape {rows}x{cols}",
                data.len()
            )));
        }
        Ok(JointDistribution {
            rows,
            cols,
            data: clean_probabilities(data)?,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidDistribution("ragged table".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    /// Independent pair: `p(x, y) = px(x) py(y)`.
    pub fn product(px: &Distribution, py: &Distribution) -> Self {
        let data = px
            .probs()
            .iter()
            .flat_map(|&a| py.probs().iter().map(move |&b| a * b))
            .collect();
        JointDistribution {
            rows: px.len(),
            cols: py.len(),
            data,
        }
    }

    /// Convex combination of tables of equal shape.
    pub fn mixture(parts: &[(f64, &JointDistribution)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidDistribution("empty mixture".into()))?
            .1;
        let mut data = vec![0.0; first.data.len()];
        for (w, j) in parts {
            if j.rows != first.rows || j.cols != first.cols {
                return Err(Error::InvalidDistribution("mixture of different shapes".into()));
            }
            for (acc, p) in data.iter_mut().zip(&j.data) {
                *acc += w * p;
            }
        }
        Self::new(first.rows, first.cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[x * self.cols + y]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Distribution of `X`.
    pub fn marginal_rows(&self) -> Distribution {
        Distribution(
            (0..self.rows)
                .map(|x| (0..self.cols).map(|y| self.get(x, y)).sum())
                .collect(),
        )
    }

    /// Distribution of `Y`.
    pub fn marginal_cols(&self) -> Distribution {
        Distribution(
            (0..self.cols)
                .map(|y| (0..self.rows).map(|x| self.get(x, y)).sum())
                .collect(),
        )
    }

    /// The pair `(X, Y)` as a single distribution.
    pub fn flatten(&self) -> Distribution {
        Distribution(self.data.clone())
    }

    pub fn transpose(&self) -> Self {
        let mut data = vec![0.0; self.data.len()];
        for x in 0..self.rows {
            for y in 0..self.cols {
                data[y * self.rows + x] = self.get(x, y);
            }
        }
        JointDistribution {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// Coarse-grains the conditioning variable: column `y` is added into column `map[y]`.
    pub fn merge_cols(&self, map: &[usize], n_out: usize) -> Result<Self> {
        if map.len() != self.cols || map.iter().any(|&m| m >= n_out) {
            return Err(Error::InvalidDistribution("invalid column map".into()));
        }
        let mut data = vec![0.0; self.rows * n_out];
        for x in 0..self.rows {
            for (y, &m) in map.iter().enumerate() {
                data[x * n_out + m] += self.get(x, y);
            }
        }
        Self::new(self.rows, n_out, data)
    }

    /// `(p(y), p(·|y))` for every `y` with positive weight.
    pub fn conditionals(&self) -> impl Iterator<Item = (f64, Vec<f64>)> + '_ {
        (0..self.cols).filter_map(move |y| {
            let py: f64 = (0..self.rows).map(|x| self.get(x, y)).sum();
            (py > 0.0).then(|| (py, (0..self.rows).map(|x| self.get(x, y) / py).collect()))
        })
    }
}

/// Rényi order `α ∈ [0, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RenyiOrder(f64);

impl RenyiOrder {
    pub const HARTLEY: RenyiOrder = RenyiOrder(0.0);
    pub const MAX_ENTROPY: RenyiOrder = RenyiOrder(0.5);
    pub const SHANNON: RenyiOrder = RenyiOrder(1.0);
    pub const MIN_ENTROPY: RenyiOrder = RenyiOrder(f64::INFINITY);

    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_nan() || alpha < 0.0 {
            return Err(Error::InvalidOrder(alpha));
        }
        Ok(RenyiOrder(alpha))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    pub fn is_shannon(self) -> bool {
        (self.0 - 1.0).abs() < SHANNON_WINDOW
    }
}

impl fmt::Display for RenyiOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for RenyiOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(RenyiOrder::MIN_ENTROPY),
            other => other
                .parse::<f64>()
                .map_err(|_| Error::InvalidOrder(f64::NAN))
                .and_then(RenyiOrder::new),
        }
    }
}

/// The partner order `β` with `1/α + 1/β = 2`.
pub fn dual_order(a: RenyiOrder) -> Result<RenyiOrder> {
    let alpha = a.value();
    if alpha < 0.5 {
        return Err(Error::NoDual(alpha));
    }
    if alpha.is_infinite() {
        return Ok(RenyiOrder::MAX_ENTROPY);
    }
    if alpha == 0.5 {
        return Ok(RenyiOrder::MIN_ENTROPY);
    }
    Ok(RenyiOrder(alpha / (2.0 * alpha - 1.0)))
}

/// Shannon entropy in bits.
pub fn shannon_entropy(p: &Distribution) -> f64 {
    shannon_bits(p.probs())
}

/// Shannon entropy in nats.
pub fn shannon_entropy_nats(p: &Distribution) -> f64 {
    shannon_bits(p.probs()) * LN_2
}

fn shannon_bits(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.log2()).sum::<f64>()
}

fn support(p: &[f64]) -> usize {
    p.iter().filter(|&&x| x > 0.0).count()
}

fn max_of(p: &[f64]) -> f64 {
    p.iter().copied().fold(0.0, f64::max)
}

/// `ln ‖c‖_α` for a normalised vector `c` and finite `α > 0`, `α ≠ 1`.
fn ln_alpha_norm(c: &[f64], alpha: f64) -> f64 {
    if (alpha - 1.0).abs() < 0.5 {
        // Σ c^α = 1 + Σ c (c^{α-1} - 1), exact for normalised c.
        let eps = alpha - 1.0;
        let s: f64 = c
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * (eps * p.ln()).exp_m1())
            .sum();
        s.ln_1p() / alpha
    } else {
        let m = max_of(c);
        let r: f64 = c
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| (p / m).powf(alpha))
            .sum();
        m.ln() + r.ln() / alpha
    }
}

/// Rényi entropy `H_α(X) = log₂(Σ p^α) / (1 - α)` in bits.
///
/// `α = 0` gives `log₂ |support|`, `α = 1` Shannon entropy and `α = ∞`
/// `-log₂ max p`.
pub fn renyi_entropy(p: &Distribution, a: RenyiOrder) -> f64 {
    let alpha = a.value();
    let probs = p.probs();
    if alpha == 0.0 {
        (support(probs) as f64).log2()
    } else if a.is_shannon() {
        shannon_bits(probs)
    } else if alpha.is_infinite() {
        -max_of(probs).log2()
    } else if alpha == 0.5 {
        2.0 * probs.iter().map(|x| x.sqrt()).sum::<f64>().log2()
    } else {
        alpha / (1.0 - alpha) * ln_alpha_norm(probs, alpha) / LN_2
    }
}

/// Arimoto conditional Rényi entropy `H_α(X|Y)` in bits.
///
/// `H_α(X|Y) = α/(1-α) · log₂ Σ_y p(y) ‖p(·|y)‖_α`, dispatched to closed forms
/// at `α ∈ {0, 1/2, 1, ∞}`:
///
/// - `α = 1/2`: `log₂ Σ_y (Σ_x √p(x,y))²` (max-entropy)
/// - `α = 1`: `Σ_y p(y) H(X|Y=y)` (Shannon)
/// - `α = ∞`: `-log₂ Σ_y max_x p(x,y)` (min-entropy)
/// - `α = 0`: `log₂ max_y |support p(·|y)|`
pub fn conditional_renyi(j: &JointDistribution, a: RenyiOrder) -> f64 {
    let alpha = a.value();
    if alpha == 0.0 {
        let widest = j.conditionals().map(|(_, c)| support(&c)).max().unwrap_or(1);
        (widest as f64).log2()
    } else if a.is_shannon() {
        j.conditionals().map(|(py, c)| py * shannon_bits(&c)).sum()
    } else if alpha.is_infinite() {
        let guess: f64 = (0..j.cols())
            .map(|y| (0..j.rows()).map(|x| j.get(x, y)).fold(0.0, f64::max))
            .sum();
        -guess.log2()
    } else if alpha == 0.5 {
        let s: f64 = (0..j.cols())
            .map(|y| {
                let r: f64 = (0..j.rows()).map(|x| j.get(x, y).sqrt()).sum();
                r * r
            })
            .sum();
        s.log2()
    } else {
        arimoto_formula(j, alpha)
    }
}

/// The defining formula of [`conditional_renyi`] for any finite `α > 0`,
/// `α ≠ 1`, without special-case dispatch.
///
/// Exposed so the closed-form dispatches can be checked against it.
pub fn arimoto_formula(j: &JointDistribution, alpha: f64) -> f64 {
    let t: f64 = j
        .conditionals()
        .map(|(py, c)| py * ln_alpha_norm(&c, alpha).exp_m1())
        .sum();
    alpha / (1.0 - alpha) * t.ln_1p() / LN_2
}

/// Tsallis order `q > 0`, `q ≠ 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct TsallisOrder(f64);

impl TsallisOrder {
    pub fn new(q: f64) -> Result<Self> {
        if !q.is_finite() || q <= 0.0 || q == 1.0 {
            return Err(Error::InvalidOrder(q));
        }
        Ok(TsallisOrder(q))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

fn tsallis_of(p: &[f64], q: f64) -> f64 {
    // (1 - Σ p^q)/(q - 1) with Σ p^q - 1 = Σ p (p^{q-1} - 1).
    let eps = q - 1.0;
    let s: f64 = p
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| x * (eps * x.ln()).exp_m1())
        .sum();
    -s / eps
}

/// Tsallis entropy `S_q(X) = -Σ p^q ln_q p = (1 - Σ p^q)/(q - 1)`, in nats.
pub fn tsallis_entropy(p: &Distribution, q: TsallisOrder) -> f64 {
    tsallis_of(p.probs(), q.value())
}

/// `S_q(X|Y) = Σ_y p(y)^q S_q(X|Y=y)`, in nats.
pub fn conditional_tsallis(j: &JointDistribution, q: TsallisOrder) -> f64 {
    let q = q.value();
    j.conditionals().map(|(py, c)| py.powf(q) * tsallis_of(&c, q)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn order(a: f64) -> RenyiOrder {
        RenyiOrder::new(a).unwrap()
    }

    #[test]
    fn uniform_is_log_d_for_every_order() {
        for d in [2usize, 3, 7] {
            let u = Distribution::uniform(d);
            for a in [0.0, 0.3, 0.5, 1.0, 2.0, 7.5, f64::INFINITY] {
                assert_abs_diff_eq!(renyi_entropy(&u, order(a)), (d as f64).log2(), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn min_entropy_of_skewed_bit() {
        let p = Distribution::new(vec![0.9, 0.1]).unwrap();
        assert_abs_diff_eq!(
            renyi_entropy(&p, RenyiOrder::MIN_ENTROPY),
            0.152_003_093_445_049_98,
            epsilon = 1e-15
        );
    }

    #[test]
    fn deterministic_has_zero_entropy() {
        let p = Distribution::deterministic(4, 2);
        for a in [0.0, 0.5, 1.0, 3.0, f64::INFINITY] {
            assert_abs_diff_eq!(renyi_entropy(&p, order(a)), 0.0, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(tsallis_entropy(&p, TsallisOrder::new(2.0).unwrap()), 0.0);
    }

    #[test]
    fn distribution_validation() {
        assert!(Distribution::new(vec![0.5, 0.6]).is_err());
        assert!(Distribution::new(vec![1.1, -0.1]).is_err());
        assert!(Distribution::new(vec![]).is_err());
        let p = Distribution::new(vec![1.0 + 1e-13, -1e-13]).unwrap();
        assert_eq!(p.probs()[1], 0.0);
        assert!(JointDistribution::new(2, 2, vec![0.25; 3]).is_err());
        assert!(JointDistribution::from_rows(&[vec![0.5], vec![0.25, 0.25]]).is_err());
    }

    #[test]
    fn conditional_examples() {
        let corr = JointDistribution::from_rows(&[vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
        assert_abs_diff_eq!(conditional_renyi(&corr, RenyiOrder::MIN_ENTROPY), 0.0, epsilon = 1e-15);
        let indep = JointDistribution::product(&Distribution::uniform(2), &Distribution::uniform(2));
        assert_abs_diff_eq!(conditional_renyi(&indep, RenyiOrder::MAX_ENTROPY), 1.0, epsilon = 1e-15);

        // Frozen from a 50-digit evaluation of the defining sum.
        let j = JointDistribution::from_rows(&[vec![0.4, 0.1], vec![0.1, 0.4]]).unwrap();
        assert_abs_diff_eq!(
            conditional_renyi(&j, order(2.0)),
            0.556_393_348_524_385_3,
            epsilon = 1e-14
        );
        let j = JointDistribution::from_rows(&[vec![0.1, 0.2, 0.05], vec![0.3, 0.05, 0.3]]).unwrap();
        assert_abs_diff_eq!(conditional_renyi(&j, order(0.7)), 0.785_324_257_779_614_4, epsilon = 1e-14);
        assert_abs_diff_eq!(conditional_renyi(&j, order(3.0)), 0.468_985_782_730_791_1, epsilon = 1e-14);
    }

    #[test]
    fn zero_weight_columns_are_skipped() {
        let j = JointDistribution::from_rows(&[vec![0.3, 0.0], vec![0.7, 0.0]]).unwrap();
        let p = Distribution::new(vec![0.3, 0.7]).unwrap();
        for a in [0.0, 0.5, 0.8, 1.0, 2.0, f64::INFINITY] {
            assert_abs_diff_eq!(conditional_renyi(&j, order(a)), renyi_entropy(&p, order(a)), epsilon = 1e-13);
        }
    }

    #[test]
    fn dual_orders() {
        assert_eq!(dual_order(RenyiOrder::MAX_ENTROPY).unwrap(), RenyiOrder::MIN_ENTROPY);
        assert_eq!(dual_order(RenyiOrder::MIN_ENTROPY).unwrap(), RenyiOrder::MAX_ENTROPY);
        assert_eq!(dual_order(RenyiOrder::SHANNON).unwrap(), RenyiOrder::SHANNON);
        assert_abs_diff_eq!(dual_order(order(2.0)).unwrap().value(), 2.0 / 3.0, epsilon = 1e-15);
        for a in [0.6, 0.7, 1.3, 2.0, 10.0] {
            let back = dual_order(dual_order(order(a)).unwrap()).unwrap();
            assert_abs_diff_eq!(back.value(), a, epsilon = 1e-12);
        }
        assert_eq!(dual_order(order(0.4)), Err(Error::NoDual(0.4)));
    }

    #[test]
    fn order_parsing() {
        assert_eq!("inf".parse::<RenyiOrder>().unwrap(), RenyiOrder::MIN_ENTROPY);
        assert_eq!("0.5".parse::<RenyiOrder>().unwrap(), RenyiOrder::MAX_ENTROPY);
        assert!("-1".parse::<RenyiOrder>().is_err());
        assert!("abc".parse::<RenyiOrder>().is_err());
        assert_eq!(RenyiOrder::MIN_ENTROPY.to_string(), "inf");
        assert!(TsallisOrder::new(1.0).is_err());
        assert!(TsallisOrder::new(0.0).is_err());
    }

    #[test]
    fn tsallis_examples() {
        for d in [2usize, 3, 5] {
            let u = Distribution::uniform(d);
            assert_abs_diff_eq!(
                tsallis_entropy(&u, TsallisOrder::new(2.0).unwrap()),
                1.0 - 1.0 / d as f64,
                epsilon = 1e-14
            );
        }
        let p = Distribution::new(vec![0.5, 0.3, 0.2]).unwrap();
        for q in [1.0 - 1e-6, 1.0 + 1e-6] {
            let s = tsallis_entropy(&p, TsallisOrder::new(q).unwrap());
            assert!((s - shannon_entropy_nats(&p)).abs() < 1e-5);
        }
        let corr = JointDistribution::from_rows(&[vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
        assert_abs_diff_eq!(conditional_tsallis(&corr, TsallisOrder::new(1.5).unwrap()), 0.0);
    }

    #[test]
    fn tsallis_product_matches_pseudo_additive_residual() {
        let q = TsallisOrder::new(2.0).unwrap();
        let px = Distribution::new(vec![0.6, 0.3, 0.1]).unwrap();
        let py = Distribution::new(vec![0.2, 0.8]).unwrap();
        let j = JointDistribution::product(&px, &py);
        let (sx, sy) = (tsallis_entropy(&px, q), tsallis_entropy(&py, q));
        // S(X|Y) = S(X,Y) - S(Y) = S(X) + (1 - q) S(X) S(Y) for independent X, Y.
        assert_abs_diff_eq!(conditional_tsallis(&j, q), sx + (1.0 - 2.0) * sx * sy, epsilon = 1e-14);
    }

    #[test]
    fn merge_cols_coarse_grains() {
        let j = JointDistribution::from_rows(&[vec![0.1, 0.2, 0.05], vec![0.3, 0.05, 0.3]]).unwrap();
        let m = j.merge_cols(&[0, 1, 0], 2).unwrap();
        assert_abs_diff_eq!(m.get(0, 0), 0.15, epsilon = 1e-15);
        assert_abs_diff_eq!(m.get(1, 0), 0.6, epsilon = 1e-15);
        assert!(j.merge_cols(&[0, 1], 2).is_err());
    }
}
