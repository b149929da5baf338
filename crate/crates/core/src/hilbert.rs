//! Dense complex linear algebra over finite-dimensional Hilbert spaces.
//!
//! Kronecker products use row-major indexing: for `a` of dimension `m` and
//! `b` of dimension `n`, component `k = i * n + j` of `a ⊗ b` is `a[i] * b[j]`.
//! The same convention applies to operators and is relied on by every module
//! that splits a product space into factors.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, RngCore};
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default cap on space dimension accepted by the scenario runner.
pub const DEFAULT_MAX_DIM: usize = 64;

/// Tolerance for the hermiticity check.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Tolerance for idempotency, orthogonality and completeness of projectors.
pub const PROJECTOR_TOL: f64 = 1e-10;
/// Relative tolerance used to merge (nearly) degenerate eigenvalues.
pub const EIGEN_GROUPING_TOL: f64 = 1e-9;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// A vector in `C^dim`. Constructors named after physical states return unit
/// vectors; the result of applying an operator is generally not normalized.
#[derive(Clone, PartialEq)]
pub struct StateVector {
    amps: DVector<C64>,
}

impl StateVector {
    /// Raw vector, no normalization.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::ZeroDimension);
        }
        Ok(Self {
            amps: DVector::from_vec(amps),
        })
    }

    /// Unit vector along `amps`.
    pub fn normalized(amps: Vec<C64>) -> Result<Self> {
        Self::from_amplitudes(amps)?.normalize()
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::normalized(amps.iter().map(|&x| c(x, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::from_amplitudes(vec![C64::new(0.0, 0.0); dim])
    }

    /// Computational basis vector `|k⟩` of `C^dim`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {k} out of range for dimension {dim}"
            )));
        }
        let mut v = Self::zeros(dim)?;
        v.amps[k] = c(1.0, 0.0);
        Ok(v)
    }

    /// `(|0⟩ + |1⟩)/√2`.
    pub fn plus() -> Self {
        Self::from_real(&[1.0, 1.0]).expect("nonzero")
    }

    /// `(|0⟩ - |1⟩)/√2`.
    pub fn minus() -> Self {
        Self::from_real(&[1.0, -1.0]).expect("nonzero")
    }

    /// Haar-random unit vector: a normalized standard complex Gaussian.
    pub fn random(dim: usize, rng: &mut dyn RngCore) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        loop {
            let amps: Vec<C64> = (0..dim).map(|_| gaussian(rng)).collect();
            if let Ok(v) = Self::normalized(amps) {
                return Ok(v);
            }
        }
    }

    pub(crate) fn from_dvector(amps: DVector<C64>) -> Self {
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        self.amps.as_slice()
    }

    pub fn amplitude(&self, k: usize) -> C64 {
        self.amps[k]
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    pub fn norm_squared(&self) -> f64 {
        self.amps.norm_squared()
    }

    pub fn normalize(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(Self {
            amps: self.amps.unscale(n),
        })
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self.amps.dotc(&other.amps))
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            amps: &self.amps * factor,
        }
    }

    /// `‖self − other‖`.
    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        check_dim(self.dim(), other.dim())?;
        Ok((&self.amps - &other.amps).norm())
    }

    /// Distance to `other` after removing the best global phase, i.e.
    /// `sqrt(‖a‖² + ‖b‖² − 2|⟨a|b⟩|)`.
    pub fn distance_up_to_phase(&self, other: &StateVector) -> Result<f64> {
        let overlap = self.inner(other)?.norm();
        Ok((self.norm_squared() + other.norm_squared() - 2.0 * overlap)
            .max(0.0)
            .sqrt())
    }

    pub fn tensor(&self, other: &StateVector) -> StateVector {
        tensor_vec(self, other)
    }

    /// Multiply by the phase making the first largest-magnitude amplitude
    /// real and positive. Used to fix the gauge of sampled vectors.
    pub fn with_canonical_phase(&self) -> Self {
        let mut best = 0;
        let mut best_norm = -1.0;
        for (k, a) in self.amps.iter().enumerate() {
            // strict comparison with a small margin keeps the choice stable
            // against rounding between nearly equal magnitudes
            if a.norm() > best_norm * (1.0 + 1e-9) {
                best = k;
                best_norm = a.norm();
            }
        }
        if best_norm <= 0.0 {
            return self.clone();
        }
        let phase = self.amps[best].conj() / best_norm;
        self.scale(phase)
    }
}

impl fmt::Debug for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.amps.iter()).finish()
    }
}

impl Add for &StateVector {
    type Output = StateVector;
    fn add(self, rhs: &StateVector) -> StateVector {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        StateVector::from_dvector(&self.amps + &rhs.amps)
    }
}

impl Sub for &StateVector {
    type Output = StateVector;
    fn sub(self, rhs: &StateVector) -> StateVector {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        StateVector::from_dvector(&self.amps - &rhs.amps)
    }
}

/// Row-major Kronecker product of two vectors.
pub fn tensor_vec(a: &StateVector, b: &StateVector) -> StateVector {
    StateVector::from_dvector(a.amps.kronecker(&b.amps))
}

/// A dense `dim × dim` complex matrix.
#[derive(Clone, PartialEq)]
pub struct Operator {
    m: DMatrix<C64>,
}

impl Operator {
    pub fn from_matrix(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() == 0 {
            return Err(Error::ZeroDimension);
        }
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        Ok(Self { m })
    }

    /// Build from a row-major list of rows.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        for r in rows {
            check_dim(n, r.len())?;
        }
        Self::from_matrix(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| c(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be at least 1");
        Self {
            m: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be at least 1");
        Self {
            m: DMatrix::zeros(dim, dim),
        }
    }

    pub fn diagonal(entries: &[f64]) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::ZeroDimension);
        }
        let d: Vec<C64> = entries.iter().map(|&x| c(x, 0.0)).collect();
        Ok(Self {
            m: DMatrix::from_diagonal(&DVector::from_vec(d)),
        })
    }

    /// `|v⟩⟨v|` (not normalized by `‖v‖²`).
    pub fn outer(v: &StateVector) -> Self {
        Self {
            m: &v.amps * v.amps.adjoint(),
        }
    }

    pub fn pauli_x() -> Self {
        Self::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).expect("2x2")
    }

    pub fn pauli_y() -> Self {
        Self::from_rows(&[
            vec![c(0.0, 0.0), c(0.0, -1.0)],
            vec![c(0.0, 1.0), c(0.0, 0.0)],
        ])
        .expect("2x2")
    }

    pub fn pauli_z() -> Self {
        Self::diagonal(&[1.0, -1.0]).expect("2x2")
    }

    /// Haar-random unitary from the QR decomposition of a complex Ginibre
    /// matrix, with the phases of `R`'s diagonal absorbed into `Q`.
    pub fn random_unitary(dim: usize, rng: &mut dyn RngCore) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        let g = DMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
        let qr = g.qr();
        let mut q = qr.q();
        let r = qr.r();
        for k in 0..dim {
            let d = r[(k, k)];
            let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
            let mut col = q.column_mut(k);
            col *= phase;
        }
        Ok(Self { m: q })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.m[(i, j)]
    }

    pub fn adjoint(&self) -> Self {
        Self {
            m: self.m.adjoint(),
        }
    }

    pub fn trace(&self) -> C64 {
        self.m.trace()
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self { m: &self.m * factor }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(c(factor, 0.0))
    }

    /// `O v`.
    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        check_dim(self.dim(), v.dim())?;
        Ok(StateVector::from_dvector(&self.m * &v.amps))
    }

    pub fn compose(&self, other: &Operator) -> Result<Operator> {
        check_dim(self.dim(), other.dim())?;
        Ok(Operator {
            m: &self.m * &other.m,
        })
    }

    pub fn try_add(&self, other: &Operator) -> Result<Operator> {
        check_dim(self.dim(), other.dim())?;
        Ok(Operator {
            m: &self.m + &other.m,
        })
    }

    pub fn try_sub(&self, other: &Operator) -> Result<Operator> {
        check_dim(self.dim(), other.dim())?;
        Ok(Operator {
            m: &self.m - &other.m,
        })
    }

    /// `𝕀 − self`.
    pub fn complement(&self) -> Operator {
        Operator {
            m: DMatrix::identity(self.dim(), self.dim()) - &self.m,
        }
    }

    /// Largest entry magnitude, the norm used for every tolerance check.
    pub fn max_abs(&self) -> f64 {
        self.m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Operator) -> Result<f64> {
        Ok(self.try_sub(other)?.max_abs())
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.m - self.m.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() <= HERMITIAN_TOL
    }

    /// `max |P² − P|`.
    pub fn idempotency_defect(&self) -> f64 {
        (&self.m * &self.m - &self.m)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_projector(&self) -> bool {
        self.is_hermitian() && self.idempotency_defect() <= PROJECTOR_TOL
    }

    pub fn check_projector(&self) -> Result<()> {
        let h = self.hermiticity_defect();
        if h > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation: h });
        }
        let d = self.idempotency_defect();
        if d > PROJECTOR_TOL {
            return Err(Error::NotProjector { deviation: d });
        }
        Ok(())
    }

    /// Rank of a projector, read off its trace.
    pub fn projector_rank(&self) -> usize {
        self.trace().re.round().max(0.0) as usize
    }

    /// `(O + O†)/2`, removes rounding noise from constructed projectors.
    pub(crate) fn symmetrized(&self) -> Operator {
        Operator {
            m: (&self.m + self.m.adjoint()).unscale(2.0),
        }
    }

    pub fn tensor(&self, other: &Operator) -> Operator {
        tensor_op(self, other)
    }

    /// `U O U†`.
    pub fn conjugate_by(&self, u: &Operator) -> Result<Operator> {
        check_dim(self.dim(), u.dim())?;
        Ok(Operator {
            m: &u.m * &self.m * u.m.adjoint(),
        })
    }
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<C64>> = (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.m[(i, j)]).collect())
            .collect();
        f.debug_list().entries(rows).finish()
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        self.compose(rhs).expect("dimension mismatch")
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        self.try_add(rhs).expect("dimension mismatch")
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        self.try_sub(rhs).expect("dimension mismatch")
    }
}

/// Row-major Kronecker product, consistent with [`tensor_vec`].
pub fn tensor_op(a: &Operator, b: &Operator) -> Operator {
    Operator {
        m: a.m.kronecker(&b.m),
    }
}

/// Max-entry magnitude of `AB − BA`.
pub fn commutator_norm(a: &Operator, b: &Operator) -> Result<f64> {
    check_dim(a.dim(), b.dim())?;
    Ok((&a.m * &b.m - &b.m * &a.m)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max))
}

/// Spectral resolution `O = Σ λ_k P_k` with distinct eigenvalues in
/// increasing order.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pairs: Vec<(f64, Operator)>,
}

impl SpectralDecomposition {
    pub fn pairs(&self) -> &[(f64, Operator)] {
        &self.pairs
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.pairs.iter().map(|(l, _)| *l).collect()
    }

    pub fn projectors(&self) -> impl Iterator<Item = &Operator> {
        self.pairs.iter().map(|(_, p)| p)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// `Σ λ_k P_k`.
    pub fn reconstruct(&self) -> Operator {
        let dim = self.pairs[0].1.dim();
        self.pairs
            .iter()
            .fold(Operator::zeros(dim), |acc, (l, p)| &acc + &p.scale_real(*l))
    }
}

/// Eigen-decompose a hermitian operator and group eigenvalues closer than
/// `EIGEN_GROUPING_TOL · max(1, max|λ|)` into a single spectral projector.
pub fn spectral_decomposition(op: &Operator) -> Result<SpectralDecomposition> {
    let deviation = op.hermiticity_defect();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let dim = op.dim();
    let eig = op.symmetrized().m.symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let scale = eig
        .eigenvalues
        .iter()
        .fold(1.0_f64, |acc, l| acc.max(l.abs()));
    let tol = EIGEN_GROUPING_TOL * scale;

    // single-linkage grouping of the sorted spectrum
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for &k in &order {
        let l = eig.eigenvalues[k];
        match groups.last_mut() {
            Some(g) if l - last <= tol => g.push(k),
            _ => groups.push(vec![k]),
        }
        last = l;
    }

    let pairs = groups
        .into_iter()
        .map(|g| {
            let value = g.iter().map(|&k| eig.eigenvalues[k]).sum::<f64>() / g.len() as f64;
            let mut p = DMatrix::<C64>::zeros(dim, dim);
            for &k in &g {
                let v = eig.eigenvectors.column(k);
                p += v * v.adjoint();
            }
            (value, Operator { m: p }.symmetrized())
        })
        .collect();
    Ok(SpectralDecomposition { pairs })
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Standard complex Gaussian (unit variance per real component).
pub(crate) fn gaussian(rng: &mut dyn RngCore) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im)
}
