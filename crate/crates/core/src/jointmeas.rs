//! Joint-measurability boundaries and threshold solvers.
//!
//! All arguments are visibilities. For a pair of mutually unbiased bases in
//! dimension `d` with visibilities `va` (computational basis) and `vx`
//! (Fourier basis):
//!
//! - exact compatibility: `((d-1)(va+vx) - √(d - (d-1)(va-vx)²)) / (d-2) <= 1`
//!   for `d >= 3`, and its limit `va² + vx² <= 1` at `d = 2`;
//! - no steering detected by the max/min-entropy criterion:
//!   `(√(vx + (1-vx)/d) + (d-1)√((1-vx)/d))² / (1 + (d-1)va) >= 1`.

use crate::entropy::{dual_order, RenyiOrder};
use crate::qobj::{norm3, Visibility};
use crate::{Error, Result};

/// Slack used when a boundary point is tested for "holds with equality".
const BOUNDARY_SLACK: f64 = 1e-12;

/// One row of a threshold scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdRecord {
    /// Dimension `d`, angle `θ` (radians), family parameter `t` or case index.
    pub parameter: f64,
    /// Rényi order of the criterion; `None` where the scenario fixes it.
    pub alpha: Option<RenyiOrder>,
    /// Smallest visibility at which the criterion detects steering (1 if never).
    pub detected: Visibility,
    /// Joint-measurability boundary, where one is known.
    pub exact: Option<Visibility>,
    /// `detected - exact`.
    pub gap: Option<f64>,
}

impl ThresholdRecord {
    pub fn new(parameter: f64, alpha: Option<RenyiOrder>, detected: Visibility, exact: Option<Visibility>) -> Self {
        ThresholdRecord {
            parameter,
            alpha,
            detected,
            exact,
            gap: exact.map(|e| detected.value() - e.value()),
        }
    }

    /// Dual order of [`alpha`](Self::alpha).
    pub fn beta(&self) -> Option<RenyiOrder> {
        self.alpha.and_then(|a| dual_order(a).ok())
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    Ok(())
}

/// Left-hand side of the exact MUB compatibility condition minus one.
/// Non-positive means jointly measurable.
///
/// Written as `(A - S) / (d - 2)` with `A = 1 + (d-1)(va - u)`, `u = 1 - vx`
/// and `S` the square root; when `A > 0` the difference is evaluated as
/// `(A² - S²) / (A + S)` with the constant terms cancelled by hand, which
/// keeps full precision where the boundary touches `vx = 1`.
pub fn mub_jm_residual(d: usize, va: f64, vx: f64) -> f64 {
    let u = 1.0 - vx;
    if d == 2 {
        return va * va - u * (1.0 + vx);
    }
    let m = (d - 1) as f64;
    let diff = va - vx;
    let s = (d as f64 - m * diff * diff).max(0.0).sqrt();
    let a = 1.0 + m * (va - u);
    let num = if a > 0.0 {
        let (p, q) = (va - u, va + u);
        (m * m * p * p + m * q * q - 4.0 * m * u) / (a + s)
    } else {
        a - s
    };
    num / (d - 2) as f64
}

/// Whether noisy computational/Fourier measurements are jointly measurable.
pub fn mub_jm_holds(d: usize, va: Visibility, vx: Visibility) -> Result<bool> {
    check_dim(d)?;
    Ok(mub_jm_residual(d, va.value(), vx.value()) <= BOUNDARY_SLACK)
}

/// Equal-visibility compatibility boundary `(√d + 2) / (2(√d + 1))`.
pub fn mub_jm_threshold_symmetric(d: usize) -> Result<Visibility> {
    check_dim(d)?;
    let s = (d as f64).sqrt();
    Visibility::new((s + 2.0) / (2.0 * (s + 1.0)))
}

/// The max/min-entropy criterion's ratio; below one means steering is detected.
///
/// `va` is the visibility of the measurement scored by the min-entropy,
/// `vx` that of the measurement scored by the max-entropy.
pub fn renyi_mub_ratio(d: usize, va: f64, vx: f64) -> f64 {
    let df = d as f64;
    let n = (vx + (1.0 - vx) / df).sqrt() + (df - 1.0) * ((1.0 - vx) / df).sqrt();
    n * n / (1.0 + (df - 1.0) * va)
}

/// Whether the criterion is satisfied, i.e. no steering is detected.
pub fn renyi_mub_holds(d: usize, va: Visibility, vx: Visibility) -> Result<bool> {
    check_dim(d)?;
    Ok(renyi_mub_ratio(d, va.value(), vx.value()) >= 1.0 - BOUNDARY_SLACK)
}

/// Equal-visibility detection threshold of the criterion, by bisection.
pub fn renyi_mub_threshold_symmetric(d: usize, tol: f64) -> Result<Visibility> {
    check_dim(d)?;
    bisect_threshold(|v| renyi_mub_ratio(d, v, v) < 1.0 - BOUNDARY_SLACK, tol)
}

/// Solution of a boundary equation for one visibility given the other.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaSolution {
    pub visibility: Visibility,
    /// The boundary lies outside `[0, 1]`; `visibility` is clamped to 1.
    pub saturated: bool,
}

fn solve_monotone<F: FnMut(f64) -> bool>(mut crossed: F, tol: f64) -> Result<EtaSolution> {
    if !crossed(1.0) {
        return Ok(EtaSolution {
            visibility: Visibility::ONE,
            saturated: true,
        });
    }
    if crossed(0.0) {
        return Ok(EtaSolution {
            visibility: Visibility::ZERO,
            saturated: true,
        });
    }
    Ok(EtaSolution {
        visibility: bisect_threshold(crossed, tol)?,
        saturated: false,
    })
}

/// Visibility `va` at which the criterion starts detecting steering, given `vx`.
pub fn renyi_eta_of_chi(d: usize, vx: Visibility, tol: f64) -> Result<EtaSolution> {
    check_dim(d)?;
    let vx = vx.value();
    solve_monotone(|va| renyi_mub_ratio(d, va, vx) < 1.0 - BOUNDARY_SLACK, tol)
}

/// Visibility `va` at which the pair stops being jointly measurable, given `vx`.
pub fn exact_eta_of_chi(d: usize, vx: Visibility, tol: f64) -> Result<EtaSolution> {
    check_dim(d)?;
    let vx = vx.value();
    solve_monotone(|va| mub_jm_residual(d, va, vx) > 0.0, tol)
}

/// Equal-visibility compatibility boundary `2 / (‖z + x‖ + ‖z - x‖)` of two
/// unbiased qubit measurements along unit Bloch vectors `z` and `x`.
pub fn qubit_exact_threshold(z: [f64; 3], x: [f64; 3]) -> Result<Visibility> {
    for v in [z, x] {
        let n = norm3(v);
        if (n - 1.0).abs() > 1e-9 {
            return Err(Error::NotUnit(n));
        }
    }
    let sum = norm3([z[0] + x[0], z[1] + x[1], z[2] + x[2]]);
    let diff = norm3([z[0] - x[0], z[1] - x[1], z[2] - x[2]]);
    Visibility::new((2.0 / (sum + diff)).min(1.0))
}

/// Criterion threshold `1 / (√2 cos θ)` when Bob's orthogonal pair sits at
/// angle `θ` from Alice's Bloch vectors, for `θ ∈ [0, π/4]`.
pub fn qubit_renyi_threshold(theta: f64) -> Result<Visibility> {
    if !(0.0..=std::f64::consts::FRAC_PI_4).contains(&theta) {
        return Err(Error::OutOfRange {
            name: "theta",
            value: theta,
            range: "[0, pi/4]",
        });
    }
    Visibility::new((1.0 / (std::f64::consts::SQRT_2 * theta.cos())).min(1.0))
}

/// Outcome of [`bisect_boundary`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bisection {
    /// End of the final bracket where the predicate already has its value at 1.
    pub value: f64,
    /// Final bracket, `upper - lower <= tol`.
    pub lower: f64,
    pub upper: f64,
    /// Predicate calls inside `(0, 1)`; the two endpoint probes are not counted.
    pub evaluations: usize,
}

/// Locates the switch point of a monotone predicate on `[0, 1]` to within `tol`.
///
/// The returned value sits on the far side of the switch, so for a predicate
/// that turns true it is a point where the predicate has been seen true.
pub fn bisect_boundary<F: FnMut(f64) -> bool>(mut pred: F, tol: f64) -> Result<Bisection> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::OutOfRange {
            name: "tol",
            value: tol,
            range: "(0, inf)",
        });
    }
    let at_lo = pred(0.0);
    if at_lo == pred(1.0) {
        return Err(Error::NonBracketing(at_lo));
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut evaluations = 0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        evaluations += 1;
        if pred(mid) == at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Bisection {
        value: hi,
        lower: lo,
        upper: hi,
        evaluations,
    })
}

/// [`bisect_boundary`] as a visibility. Debug builds first scan 16 points and
/// reject predicates that switch more than once.
pub fn bisect_threshold<F: FnMut(f64) -> bool>(mut pred: F, tol: f64) -> Result<Visibility> {
    if cfg!(debug_assertions) {
        let switches = (0..16)
            .map(|k| pred(k as f64 / 15.0))
            .collect::<Vec<_>>()
            .windows(2)
            .filter(|w| w[0] != w[1])
            .count();
        if switches > 1 {
            return Err(Error::NonMonotone);
        }
    }
    Visibility::new(bisect_boundary(pred, tol)?.value)
}
