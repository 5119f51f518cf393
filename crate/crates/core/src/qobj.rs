//! Quantum objects: kets, operators, density matrices and POVMs.
//!
//! Everything here is a small dense complex matrix backed by `nalgebra`.
//! Values are validated at construction and immutable afterwards, so they can
//! be shared freely across threads.
//!
//! Bipartite operators are ordered with Alice's subsystem first: the basis
//! index of `|i>_A |k>_B` is `i * d_B + k`.

use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::entropy::JointDistribution;
use crate::{Error, Result, Tolerances};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

const TOL: Tolerances = Tolerances::DEFAULT;

#[inline]
fn c64(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    Ok(())
}

/// Coefficient of the sharp part of a noisy measurement.
///
/// A measurement at visibility `v` is `v * ideal + (1 - v) * white noise`,
/// so the noise fraction is `1 - v`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Visibility(f64);

impl Visibility {
    pub const ZERO: Visibility = Visibility(0.0);
    pub const ONE: Visibility = Visibility(1.0);

    pub fn new(v: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::OutOfRange {
                name: "visibility",
                value: v,
                range: "[0, 1]",
            });
        }
        Ok(Visibility(v))
    }

    /// Builds a visibility from a noise fraction `eta`, i.e. `v = 1 - eta`.
    pub fn from_noise(eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::OutOfRange {
                name: "noise",
                value: eta,
                range: "[0, 1]",
            });
        }
        Ok(Visibility(1.0 - eta))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn noise(self) -> f64 {
        1.0 - self.0
    }
}

/// A normalised state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amps: DVector<C64>,
}

impl Ket {
    /// Wraps amplitudes that must already have unit norm.
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        let amps = DVector::from_vec(amps);
        let norm = amps.norm();
        if (norm - 1.0).abs() > TOL.unitarity {
            return Err(Error::NotUnit(norm));
        }
        Ok(Ket { amps })
    }

    /// Normalises arbitrary non-zero amplitudes.
    pub fn normalized(amps: Vec<C64>) -> Result<Self> {
        let amps = DVector::from_vec(amps);
        let norm = amps.norm();
        if amps.is_empty() || norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalise a zero vector".into()));
        }
        Ok(Ket { amps: amps / c64(norm, 0.0) })
    }

    /// Computational basis vector `|j>` in dimension `d` (0-based).
    pub fn basis(d: usize, j: usize) -> Result<Self> {
        if d == 0 || j >= d {
            return Err(Error::DimensionMismatch { expected: d, found: j });
        }
        let mut amps = DVector::zeros(d);
        amps[j] = c64(1.0, 0.0);
        Ok(Ket { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Ket) -> C64 {
        self.amps.dotc(&other.amps)
    }

    pub fn conj(&self) -> Ket {
        Ket {
            amps: self.amps.map(|z| z.conj()),
        }
    }

    pub fn projector(&self) -> Operator {
        Operator {
            m: &self.amps * self.amps.adjoint(),
        }
    }

    pub fn apply(&self, u: &CMatrix) -> Result<Ket> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.nrows(),
            });
        }
        Ket::normalized((u * &self.amps).iter().copied().collect())
    }
}

/// A square complex matrix acting on a `dim`-dimensional space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    m: CMatrix,
}

impl Operator {
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::InvalidDimension(0));
        }
        Ok(Operator { m })
    }

    pub fn identity(d: usize) -> Self {
        Operator {
            m: CMatrix::identity(d, d),
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d = diag.len();
        let mut m = CMatrix::zeros(d, d);
        for (i, &x) in diag.iter().enumerate() {
            m[(i, i)] = c64(x, 0.0);
        }
        Operator { m }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn trace(&self) -> C64 {
        self.m.trace()
    }

    pub fn adjoint(&self) -> Operator {
        Operator { m: self.m.adjoint() }
    }

    /// Entrywise complex conjugate. For Hermitian operators this equals the transpose.
    pub fn conj(&self) -> Operator {
        Operator {
            m: self.m.map(|z| z.conj()),
        }
    }

    pub fn scale(&self, s: f64) -> Operator {
        Operator {
            m: &self.m * c64(s, 0.0),
        }
    }

    pub fn add(&self, other: &Operator) -> Operator {
        Operator { m: &self.m + &other.m }
    }

    pub fn mul(&self, other: &Operator) -> Operator {
        Operator { m: &self.m * &other.m }
    }

    pub fn kron(&self, other: &Operator) -> Operator {
        Operator {
            m: self.m.kronecker(&other.m),
        }
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn distance(&self, other: &Operator) -> f64 {
        max_abs(&(&self.m - &other.m))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        max_abs(&(&self.m - self.m.adjoint())) <= tol
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let h = (&self.m + self.m.adjoint()) * c64(0.5, 0.0);
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.is_hermitian(tol) && self.min_eigenvalue() >= -tol
    }

    /// Returns the unit vector `|v>` if this operator is the rank-1 projector `|v><v|`.
    pub fn rank_one_vector(&self, tol: f64) -> Option<Ket> {
        if !self.is_hermitian(tol) || (self.trace().re - 1.0).abs() > tol {
            return None;
        }
        if max_abs(&(&self.m * &self.m - &self.m)) > tol {
            return None;
        }
        // Column with the largest diagonal entry is proportional to |v>.
        let k = (0..self.dim())
            .max_by(|&a, &b| self.m[(a, a)].re.total_cmp(&self.m[(b, b)].re))?;
        Ket::normalized(self.m.column(k).iter().copied().collect()).ok()
    }
}

/// Pauli matrices `(sigma_x, sigma_y, sigma_z)`.
pub fn pauli() -> [Operator; 3] {
    let o = c64(0.0, 0.0);
    let one = c64(1.0, 0.0);
    let i = c64(0.0, 1.0);
    [
        Operator {
            m: CMatrix::from_row_slice(2, 2, &[o, one, one, o]),
        },
        Operator {
            m: CMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        },
        Operator {
            m: CMatrix::from_row_slice(2, 2, &[one, o, o, -one]),
        },
    ]
}

/// A validated quantum state: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: CMatrix,
}

impl DensityMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        Self::new_with(m, &TOL)
    }

    pub fn new_with(m: CMatrix, tol: &Tolerances) -> Result<Self> {
        let op = Operator::new(m)?;
        if !op.is_hermitian(tol.structural) {
            return Err(Error::InvalidState("not Hermitian".into()));
        }
        let tr = op.trace();
        if (tr.re - 1.0).abs() > tol.structural || tr.im.abs() > tol.structural {
            return Err(Error::InvalidState(format!("trace {} != 1", tr.re)));
        }
        let min = op.min_eigenvalue();
        if min < -tol.structural {
            return Err(Error::InvalidState(format!("negative eigenvalue {min}")));
        }
        Ok(DensityMatrix { m: op.m })
    }

    pub fn from_ket(psi: &Ket) -> Self {
        DensityMatrix {
            m: psi.projector().m,
        }
    }

    pub fn maximally_mixed(d: usize) -> Self {
        DensityMatrix {
            m: CMatrix::identity(d, d) * c64(1.0 / d as f64, 0.0),
        }
    }

    pub fn product(a: &DensityMatrix, b: &DensityMatrix) -> Self {
        DensityMatrix {
            m: a.m.kronecker(&b.m),
        }
    }

    /// Convex combination `sum_k w_k rho_k`; weights must form a distribution.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidState("empty mixture".into()))?;
        let d = first.1.dim();
        let mut m = CMatrix::zeros(d, d);
        for (w, rho) in parts {
            if rho.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: rho.dim(),
                });
            }
            m += &rho.m * c64(*w, 0.0);
        }
        DensityMatrix::new(m)
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn as_operator(&self) -> Operator {
        Operator { m: self.m.clone() }
    }

    pub fn purity(&self) -> f64 {
        (&self.m * &self.m).trace().re
    }

    /// Reduced state of the first factor (traces out the second) for a `da x db` split.
    pub fn reduced_first(&self, da: usize, db: usize) -> Result<DensityMatrix> {
        self.check_split(da, db)?;
        let mut r = CMatrix::zeros(da, da);
        for i in 0..da {
            for j in 0..da {
                r[(i, j)] = (0..db).map(|k| self.m[(i * db + k, j * db + k)]).sum();
            }
        }
        DensityMatrix::new(r)
    }

    /// Reduced state of the second factor (traces out the first).
    pub fn reduced_second(&self, da: usize, db: usize) -> Result<DensityMatrix> {
        self.check_split(da, db)?;
        let mut r = CMatrix::zeros(db, db);
        for k in 0..db {
            for l in 0..db {
                r[(k, l)] = (0..da).map(|i| self.m[(i * db + k, i * db + l)]).sum();
            }
        }
        DensityMatrix::new(r)
    }

    fn check_split(&self, da: usize, db: usize) -> Result<()> {
        if da * db != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: da * db,
            });
        }
        Ok(())
    }
}

/// A finite POVM: positive semidefinite effects summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    dim: usize,
    effects: Vec<Operator>,
}

impl Povm {
    pub fn new(effects: Vec<Operator>) -> Result<Self> {
        Self::new_with(effects, &TOL)
    }

    pub fn new_with(effects: Vec<Operator>, tol: &Tolerances) -> Result<Self> {
        let dim = effects
            .first()
            .ok_or_else(|| Error::InvalidPovm("no effects".into()))?
            .dim();
        let mut sum = CMatrix::zeros(dim, dim);
        for (k, e) in effects.iter().enumerate() {
            if e.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: e.dim(),
                });
            }
            if !e.is_psd(tol.structural) {
                return Err(Error::InvalidPovm(format!("effect {k} is not PSD")));
            }
            sum += &e.m;
        }
        let dev = max_abs(&(sum - CMatrix::identity(dim, dim)));
        if dev > tol.structural {
            return Err(Error::InvalidPovm(format!(
                "effects sum to identity only within {dev:e}"
            )));
        }
        Ok(Povm { dim, effects })
    }

    /// Projective measurement onto an orthonormal basis.
    pub fn from_basis(basis: &[Ket]) -> Result<Self> {
        Povm::new(basis.iter().map(Ket::projector).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcomes(&self) -> usize {
        self.effects.len()
    }

    pub fn effects(&self) -> &[Operator] {
        &self.effects
    }

    /// Entrywise conjugated effects: the measurement an ideal partner performs
    /// on the other half of a maximally entangled state.
    pub fn conjugate(&self) -> Povm {
        Povm {
            dim: self.dim,
            effects: self.effects.iter().map(Operator::conj).collect(),
        }
    }

    /// Basis vectors if every effect is a rank-1 projector.
    pub fn basis_vectors(&self, tol: f64) -> Option<Vec<Ket>> {
        self.effects.iter().map(|e| e.rank_one_vector(tol)).collect()
    }

    pub fn is_rank_one_projective(&self, tol: f64) -> bool {
        self.basis_vectors(tol).is_some()
    }
}

/// Two-outcome qubit POVM `E± = (I ± (b I + m·σ)) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitBinaryPovm {
    bias: f64,
    bloch: [f64; 3],
}

impl QubitBinaryPovm {
    /// Valid iff `|bias| + |bloch| <= 1`, which keeps both effects in `[0, I]`.
    pub fn new(bias: f64, bloch: [f64; 3]) -> Result<Self> {
        let len = norm3(bloch);
        if !bias.is_finite() || !len.is_finite() || bias.abs() + len > 1.0 + TOL.structural {
            return Err(Error::InvalidPovm(format!(
                "|b| + |m| = {} exceeds 1",
                bias.abs() + len
            )));
        }
        Ok(QubitBinaryPovm { bias, bloch })
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn bloch(&self) -> [f64; 3] {
        self.bloch
    }

    /// Length of the Bloch vector, i.e. the visibility of the unbiased part.
    pub fn sharpness(&self) -> f64 {
        norm3(self.bloch)
    }

    pub fn to_povm(&self) -> Povm {
        let [sx, sy, sz] = pauli();
        let id = Operator::identity(2);
        let body = id
            .scale(self.bias)
            .add(&sx.scale(self.bloch[0]))
            .add(&sy.scale(self.bloch[1]))
            .add(&sz.scale(self.bloch[2]));
        let plus = id.add(&body).scale(0.5);
        let minus = id.add(&body.scale(-1.0)).scale(0.5);
        Povm {
            dim: 2,
            effects: vec![plus, minus],
        }
    }
}

pub(crate) fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Discrete Fourier matrix `F[j][k] = ω^{-jk} / √d` with `ω = e^{2πi/d}`.
pub fn fourier_matrix(d: usize) -> Result<Operator> {
    check_dim(d)?;
    let s = 1.0 / (d as f64).sqrt();
    let m = CMatrix::from_fn(d, d, |j, k| {
        // Reduce the exponent first so the phase stays exact for large jk.
        let e = (j * k) % d;
        C64::from_polar(s, -2.0 * PI * e as f64 / d as f64)
    });
    Ok(Operator { m })
}

pub fn computational_basis(d: usize) -> Result<Vec<Ket>> {
    check_dim(d)?;
    (0..d).map(|j| Ket::basis(d, j)).collect()
}

/// Fourier basis `F|k>`, i.e. the columns of [`fourier_matrix`].
pub fn fourier_basis(d: usize) -> Result<Vec<Ket>> {
    let f = fourier_matrix(d)?;
    Ok((0..d)
        .map(|k| Ket {
            amps: f.m.column(k).into_owned(),
        })
        .collect())
}

/// Projective measurements in the computational and Fourier bases, in that order.
pub fn mub_pair(d: usize) -> Result<(Povm, Povm)> {
    let z = Povm::from_basis(&computational_basis(d)?)?;
    let x = Povm::from_basis(&fourier_basis(d)?)?;
    Ok((z, x))
}

/// Mixes every effect with white noise: `E -> v E + (1 - v) Tr[E] I / d`.
pub fn depolarize(p: &Povm, v: Visibility) -> Povm {
    let d = p.dim;
    let v = v.value();
    let effects = p
        .effects
        .iter()
        .map(|e| {
            let noise = e.trace().re * (1.0 - v) / d as f64;
            let mut m = &e.m * c64(v, 0.0);
            for i in 0..d {
                m[(i, i)] += c64(noise, 0.0);
            }
            Operator { m }
        })
        .collect();
    Povm { dim: d, effects }
}

/// The normalised maximally entangled state `(1/d) Σ_ij |ii><jj|` on `d x d`.
pub fn max_entangled_state(d: usize) -> Result<DensityMatrix> {
    check_dim(d)?;
    let n = d * d;
    let mut m = CMatrix::zeros(n, n);
    let w = c64(1.0 / d as f64, 0.0);
    for i in 0..d {
        for j in 0..d {
            m[(i * d + i, j * d + j)] = w;
        }
    }
    Ok(DensityMatrix { m })
}

/// Born-rule statistics `p(a, b) = Tr[(E_a ⊗ F_b) rho]`.
///
/// The table is returned with Bob's outcome `b` as the row index and Alice's
/// outcome `a` as the column index, the layout conditional entropies expect.
pub fn joint_distribution(rho: &DensityMatrix, alice: &Povm, bob: &Povm) -> Result<JointDistribution> {
    let (da, db) = (alice.dim, bob.dim);
    if da * db != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: da * db,
        });
    }
    let (na, nb) = (alice.outcomes(), bob.outcomes());
    let mut table = vec![0.0; nb * na];
    let mut cond = CMatrix::zeros(db, db);
    for (a, ea) in alice.effects.iter().enumerate() {
        // Bob's unnormalised conditional state Tr_A[(E_a ⊗ I) rho].
        cond.fill(c64(0.0, 0.0));
        for i in 0..da {
            for j in 0..da {
                let e = ea.m[(j, i)];
                if e == c64(0.0, 0.0) {
                    continue;
                }
                for k in 0..db {
                    for l in 0..db {
                        cond[(k, l)] += e * rho.m[(i * db + k, j * db + l)];
                    }
                }
            }
        }
        for (b, fb) in bob.effects.iter().enumerate() {
            let mut p = 0.0;
            for k in 0..db {
                for l in 0..db {
                    p += (fb.m[(l, k)] * cond[(k, l)]).re;
                }
            }
            table[b * na + a] = p;
        }
    }
    JointDistribution::new(nb, na, table)
}

/// Two-outcome qubit POVM from a bias and a subnormalised Bloch vector.
pub fn qubit_povm(b: f64, bloch: [f64; 3]) -> Result<Povm> {
    Ok(QubitBinaryPovm::new(b, bloch)?.to_povm())
}

/// Eigenvector of the qutrit clock-shift product `XZ` with eigenvalue 1.
///
/// `X|j> = |j-1>`, `Z|j> = ω^j |j>`. `(XZ)^3 = I`, so the eigenvalues are the
/// cube roots of unity; ordering them by phase in `[0, 2π)` puts eigenvalue 1
/// first. Its eigenvector is unbiased with respect to both the computational
/// and the Fourier basis.
pub fn third_mub_vector_d3() -> Ket {
    let d = 3;
    let mut x = CMatrix::zeros(d, d);
    for j in 0..d {
        x[((j + d - 1) % d, j)] = c64(1.0, 0.0);
    }
    let z = CMatrix::from_fn(d, d, |i, j| {
        if i == j {
            C64::from_polar(1.0, 2.0 * PI * i as f64 / d as f64)
        } else {
            c64(0.0, 0.0)
        }
    });
    let w = &x * &z;
    let proj = (CMatrix::identity(d, d) + &w + &w * &w) * c64(1.0 / 3.0, 0.0);
    let k = (0..d)
        .max_by(|&a, &b| proj[(a, a)].re.total_cmp(&proj[(b, b)].re))
        .unwrap_or(0);
    Ket::normalized(proj.column(k).iter().copied().collect())
        .expect("projector onto a nondegenerate eigenspace is nonzero")
}

/// `exp(-i φ |y><y|) = I + (e^{-iφ} - 1) |y><y|`.
fn phase_rotation(y: &Ket, phi: f64) -> CMatrix {
    let p = y.projector().m;
    CMatrix::identity(y.dim(), y.dim()) + p * (C64::from_polar(1.0, -phi) - c64(1.0, 0.0))
}

/// Basis vectors of the rotated qutrit pair `(Z^t, X^t)` for `t ∈ [0, 1/2]`.
///
/// `Z^t_i = exp(-t·2πi/3 |y><y|) |i>` and `X^t_i = exp(+t·2πi/3 |y><y|) F|i-1>`
/// with `|y>` from [`third_mub_vector_d3`]. The two rotations run in opposite
/// directions so the bases meet at `t = 1/2`, where `Z^t_i` and `X^t_i`
/// coincide up to a phase. The `i-1` labelling of the Fourier vectors makes
/// the overlap matrix have a constant diagonal and constant off-diagonal.
pub fn rotated_d3_kets(t: f64) -> Result<(Vec<Ket>, Vec<Ket>)> {
    if !(0.0..=0.5).contains(&t) {
        return Err(Error::OutOfRange {
            name: "t",
            value: t,
            range: "[0, 0.5]",
        });
    }
    let y = third_mub_vector_d3();
    let phi = t * 2.0 * PI / 3.0;
    let uz = phase_rotation(&y, phi);
    let ux = phase_rotation(&y, -phi);
    let comp = computational_basis(3)?;
    let four = fourier_basis(3)?;
    let z = comp.iter().map(|k| k.apply(&uz)).collect::<Result<Vec<_>>>()?;
    let x = (0..3)
        .map(|i| four[(i + 2) % 3].apply(&ux))
        .collect::<Result<Vec<_>>>()?;
    Ok((z, x))
}

/// Projective measurements of [`rotated_d3_kets`], as `(Z^t, X^t)`.
pub fn rotated_d3_bases(t: f64) -> Result<(Povm, Povm)> {
    let (z, x) = rotated_d3_kets(t)?;
    Ok((Povm::from_basis(&z)?, Povm::from_basis(&x)?))
}

/// Haar-random pure state (normalised complex Gaussian vector).
pub fn random_ket<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Ket {
    loop {
        let amps: Vec<C64> = (0..d)
            .map(|_| c64(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        if let Ok(k) = Ket::normalized(amps) {
            return k;
        }
    }
}

/// Haar-random unitary via Gram-Schmidt on a complex Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    loop {
        let g = CMatrix::from_fn(d, d, |_, _| {
            c64(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        if let Some(u) = gram_schmidt(&g) {
            return u;
        }
    }
}

fn gram_schmidt(g: &CMatrix) -> Option<CMatrix> {
    let d = g.ncols();
    let mut q = CMatrix::zeros(g.nrows(), d);
    for k in 0..d {
        let mut v = g.column(k).into_owned();
        for j in 0..k {
            let qj = q.column(j).into_owned();
            let proj = qj.dotc(&v);
            v -= qj * proj;
        }
        let n = v.norm();
        if n < 1e-8 {
            return None;
        }
        q.set_column(k, &(v / c64(n, 0.0)));
    }
    Some(q)
}

/// Orthonormal basis given by the columns of a unitary.
pub fn basis_from_unitary(u: &CMatrix) -> Result<Vec<Ket>> {
    (0..u.ncols())
        .map(|k| Ket::normalized(u.column(k).iter().copied().collect()))
        .collect()
}

/// Random mixed state: a uniformly weighted random mixture of `n_pure` Haar-random pure states.
pub fn random_density_matrix<R: Rng + ?Sized>(rng: &mut R, d: usize, n_pure: usize) -> DensityMatrix {
    let weights: Vec<f64> = (0..n_pure.max(1)).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    let total: f64 = weights.iter().sum();
    let mut m = CMatrix::zeros(d, d);
    for w in weights {
        let psi = random_ket(rng, d);
        m += psi.projector().m * c64(w / total, 0.0);
    }
    DensityMatrix { m }
}
