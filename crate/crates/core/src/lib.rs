//! # steering-core
//!
//! Entropic EPR-steering criteria built from Rényi entropic uncertainty
//! relations, evaluated on simulated measurement statistics and benchmarked
//! against analytic joint-measurability thresholds.
//!
//! The crate is organised bottom-up:
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`qobj`] | complex linear algebra, states, bases, POVMs, white noise, Born-rule statistics |
//! | [`entropy`] | Rényi / Shannon / Tsallis entropies, unconditional and conditional |
//! | [`steering`] | uncertainty bound, steering inequality evaluation, local-hidden-state simulation |
//! | [`jointmeas`] | analytic joint-measurability conditions, threshold solvers, bisection |
//! | [`scenarios`] | end-to-end scans (dimension, qubit angle, qutrit family, Monte-Carlo soundness) |
//! | [`cli`] | the `steering` command line: CSV / SVG output and a self-test |
//!
//! ## Conventions
//!
//! - Noise is always expressed as a **visibility** `v`: a noisy measurement is
//!   `v * ideal + (1 - v) * white noise`. The noise fraction is `1 - v`.
//! - Rényi and Shannon entropies are in bits; Tsallis entropies in nats.
//! - Joint distributions are tables `p(x, y)` with rows indexing the variable
//!   whose uncertainty is measured (Bob) and columns indexing the side
//!   information (Alice).
//!
//! ```
//! use steering_core::jointmeas;
//!
//! // Visibility below which two noisy qubit MUB measurements become compatible.
//! let v = jointmeas::mub_jm_threshold_symmetric(2).unwrap();
//! assert!((v.value() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
//! ```

pub mod cli;
pub mod entropy;
pub mod jointmeas;
pub mod optimize;
pub mod qobj;
pub mod scenarios;
pub mod selftest;
pub mod steering;

use thiserror::Error;

pub use entropy::{Distribution, JointDistribution, RenyiOrder, TsallisOrder};
pub use jointmeas::ThresholdRecord;
pub use qobj::{DensityMatrix, Ket, Operator, Povm, QubitBinaryPovm, Visibility};
pub use scenarios::ScanResult;
pub use steering::{LhsModel, SteeringCertificate};

/// Errors raised by the numerical library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension {0} (need d >= 2)")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid entropy order {0}")]
    InvalidOrder(f64),

    #[error("order {0} has no dual (need alpha >= 1/2)")]
    NoDual(f64),

    #[error("{name} = {value} is out of range {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("uncertainty bound unsupported: {0}")]
    UnsupportedBound(String),

    #[error("predicate does not bracket a boundary on [0, 1] (both ends {0})")]
    NonBracketing(bool),

    #[error("predicate is not monotone on [0, 1]")]
    NonMonotone,

    #[error("vector is not a unit vector (norm {0})")]
    NotUnit(f64),

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Numerical tolerances used across the crate.
///
/// Every validation and comparison threshold lives here so a caller can
/// tighten or relax them in one place.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Hermiticity, trace, PSD and completeness checks.
    pub structural: f64,
    /// Ket norms and unitarity.
    pub unitarity: f64,
    /// Negative probabilities tolerated (and clamped to zero).
    pub negative_probability: f64,
    /// Allowed deviation of a distribution's total mass from one.
    pub normalization: f64,
    /// Rank-1 projector check used by the overlap bound.
    pub projector: f64,
    /// A steering inequality counts as violated only above this margin (bits).
    pub detection: f64,
    /// Default bisection tolerance for threshold solvers.
    pub bisection: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        structural: 1e-10,
        unitarity: 1e-12,
        negative_probability: 1e-12,
        normalization: 1e-10,
        projector: 1e-9,
        detection: 1e-12,
        bisection: 1e-9,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
