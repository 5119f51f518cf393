//! Derivative-free search over pairs of orthonormal bases.
//!
//! A basis is a fixed reference basis rotated by a product of Givens
//! rotations, one per index pair `(p, q)`, each with a mixing angle `θ` and a
//! phase `φ`. Coordinate search then moves one angle at a time.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::qobj::{CMatrix, Ket, C64};
use crate::Result;

/// Stopping rules and restart count for [`coordinate_search`] and [`maximize_over_bases`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    pub initial_step: f64,
    pub min_step: f64,
    /// A sweep gaining less than this (in bits) halves the step.
    pub min_improvement: f64,
    pub max_evaluations: usize,
    /// Number of starting points; start 0 is the reference geometry.
    pub restarts: usize,
    /// Spread of the random starting angles.
    pub start_spread: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            initial_step: 0.2,
            min_step: 1e-6,
            min_improvement: 1e-8,
            max_evaluations: 4000,
            restarts: 8,
            start_spread: 0.4,
        }
    }
}

/// Result of a search: best parameters, best value, objective calls.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub params: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
}

/// Maximises `f` from `x0` by compass moves along each coordinate.
pub fn coordinate_search<F: FnMut(&[f64]) -> f64>(mut f: F, x0: Vec<f64>, opts: &SearchOptions) -> SearchResult {
    let mut x = x0;
    let mut best = f(&x);
    let mut evaluations = 1;
    let mut step = opts.initial_step;
    while step >= opts.min_step && evaluations < opts.max_evaluations {
        let before = best;
        for i in 0..x.len() {
            for dir in [1.0, -1.0] {
                let old = x[i];
                x[i] = old + dir * step;
                let val = f(&x);
                evaluations += 1;
                if val > best {
                    best = val;
                    break;
                }
                x[i] = old;
            }
        }
        if best - before < opts.min_improvement {
            step *= 0.5;
        }
    }
    SearchResult {
        params: x,
        value: best,
        evaluations,
    }
}

/// A reference basis and the Givens parametrisation around it.
#[derive(Debug, Clone)]
pub struct GivensBasis {
    reference: CMatrix,
}

impl GivensBasis {
    pub fn new(reference: &[Ket]) -> Self {
        let d = reference.len();
        let reference = CMatrix::from_fn(d, d, |i, j| reference[j].amplitudes()[i]);
        GivensBasis { reference }
    }

    pub fn dim(&self) -> usize {
        self.reference.nrows()
    }

    /// `d(d-1)`: an angle and a phase per index pair.
    pub fn n_params(&self) -> usize {
        let d = self.dim();
        d * (d - 1)
    }

    /// Columns of `reference · G_1 · G_2 ⋯`, one rotation per pair `p < q`.
    pub fn basis(&self, params: &[f64]) -> Result<Vec<Ket>> {
        let d = self.dim();
        let mut m = self.reference.clone();
        let mut k = 0;
        for p in 0..d {
            for q in p + 1..d {
                let (theta, phi) = (params[k], params[k + 1]);
                k += 2;
                let (s, c) = theta.sin_cos();
                let e = C64::from_polar(1.0, phi);
                for r in 0..d {
                    let (a, b) = (m[(r, p)], m[(r, q)]);
                    m[(r, p)] = a * c + b * e * s;
                    m[(r, q)] = b * c - a * e.conj() * s;
                }
            }
        }
        (0..d).map(|j| Ket::normalized(m.column(j).iter().copied().collect())).collect()
    }
}

/// Maximises `objective(basis_x, basis_z)` over rotations of two reference bases.
///
/// Start 0 is the reference pair itself, followed by `warm_start` when given,
/// then seeded random angles, so the result is deterministic.
pub fn maximize_over_bases<F>(
    ref_x: &[Ket],
    ref_z: &[Ket],
    mut objective: F,
    opts: &SearchOptions,
    warm_start: Option<&[f64]>,
) -> Result<SearchResult>
where
    F: FnMut(&[Ket], &[Ket]) -> Result<f64>,
{
    let gx = GivensBasis::new(ref_x);
    let gz = GivensBasis::new(ref_z);
    let nx = gx.n_params();
    let n = nx + gz.n_params();
    let mut failure = None;
    let mut eval = |p: &[f64]| -> f64 {
        let r = gx
            .basis(&p[..nx])
            .and_then(|bx| gz.basis(&p[nx..]).and_then(|bz| objective(&bx, &bz)));
        match r {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NEG_INFINITY
            }
        }
    };
    let mut best: Option<SearchResult> = None;
    let mut total = 0;
    let mut starts = vec![vec![0.0; n]];
    starts.extend(warm_start.map(|w| w.to_vec()));
    for seed in 1..opts.restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
        starts.push((0..n).map(|_| opts.start_spread * (2.0 * rng.random::<f64>() - 1.0)).collect());
    }
    for x0 in starts {
        let r = coordinate_search(&mut eval, x0, opts);
        total += r.evaluations;
        if best.as_ref().map_or(true, |b| r.value > b.value) {
            best = Some(r);
        }
    }
    if let Some(e) = failure {
        return Err(e);
    }
    let mut best = best.expect("at least one start");
    best.evaluations = total;
    Ok(best)
}

/// Splits optimiser parameters back into the two bases.
pub fn bases_from_params(ref_x: &[Ket], ref_z: &[Ket], params: &[f64]) -> Result<(Vec<Ket>, Vec<Ket>)> {
    let gx = GivensBasis::new(ref_x);
    let gz = GivensBasis::new(ref_z);
    let nx = gx.n_params();
    Ok((gx.basis(&params[..nx])?, gz.basis(&params[nx..])?))
}
