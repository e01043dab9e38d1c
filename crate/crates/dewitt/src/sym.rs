//! Symmetric and symmetric-positive-definite matrix algebra.
//!
//! Everything downstream is built from a handful of exact-shape operations on
//! dense symmetric matrices: trace forms, the traceless decomposition, the
//! spectral exponential and logarithm, the relative logarithm
//! `log(g0^{-1} g)` between positive matrices, and the series operator
//! `A_L = e^{tr(L)/2} sum_k 2 ad(L)^{2k} / (2k+2)!`.
//!
//! All spectral computations run on genuinely symmetric matrices; quantities
//! that are only symmetric with respect to a base metric `g0` (mixed tensors
//! `g0^{-1} h`) are conjugated into the `g0`-adapted frame
//! `g0^{-1/2} h g0^{-1/2}` first, where they become symmetric.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative symmetry deviation below which inputs are silently symmetrized
/// as `(A + A^T)/2`; larger violations are rejected. Tolerates
/// file-roundtrip noise without accepting genuinely non-symmetric data.
pub const SYMMETRY_TOL: f64 = 1e-9;

/// Scale-invariant positivity threshold: a symmetric matrix counts as
/// positive definite when its smallest eigenvalue exceeds `SPD_RATIO` times
/// its largest.
pub const SPD_RATIO: f64 = 1e-12;

/// A dense n-by-n symmetric matrix with finite entries.
///
/// Entries satisfy `m[(i, j)] == m[(j, i)]` exactly: constructors symmetrize
/// within [`SYMMETRY_TOL`] and reject anything worse.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    mat: DMatrix<f64>,
}

impl SymMatrix {
    /// Validates and wraps a square matrix, symmetrizing roundoff-level
    /// asymmetry.
    pub fn new(mat: DMatrix<f64>) -> Result<Self> {
        check_square_finite(&mat)?;
        let dev = symmetry_deviation(&mat);
        if dev > SYMMETRY_TOL {
            return Err(Error::NotSymmetric {
                deviation: dev,
                tolerance: SYMMETRY_TOL,
            });
        }
        Ok(Self {
            mat: symmetrize(&mat),
        })
    }

    /// Builds from a row-major slice of `n*n` entries.
    pub fn from_row_major(n: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: entries.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(n, n, entries))
    }

    /// Wraps a matrix that is symmetric by construction. Symmetrizes
    /// unconditionally so the exact-equality invariant always holds.
    pub(crate) fn new_unchecked(mat: DMatrix<f64>) -> Self {
        Self {
            mat: symmetrize(&mat),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            mat: DMatrix::zeros(n, n),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            mat: DMatrix::identity(n, n),
        }
    }

    /// Diagonal matrix from the given entries.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self {
            mat: DMatrix::from_diagonal(&DVector::from_row_slice(diag)),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace()
    }

    pub fn norm(&self) -> f64 {
        self.mat.norm()
    }

    /// Scales by a scalar.
    pub fn scale(&self, factor: f64) -> SymMatrix {
        SymMatrix {
            mat: &self.mat * factor,
        }
    }
}

impl std::ops::Add for &SymMatrix {
    type Output = SymMatrix;
    fn add(self, rhs: &SymMatrix) -> SymMatrix {
        SymMatrix {
            mat: &self.mat + &rhs.mat,
        }
    }
}

impl std::ops::Sub for &SymMatrix {
    type Output = SymMatrix;
    fn sub(self, rhs: &SymMatrix) -> SymMatrix {
        SymMatrix {
            mat: &self.mat - &rhs.mat,
        }
    }
}

impl std::ops::Neg for &SymMatrix {
    type Output = SymMatrix;
    fn neg(self) -> SymMatrix {
        SymMatrix { mat: -&self.mat }
    }
}

/// A symmetric positive-definite matrix.
///
/// Positivity is checked spectrally: the smallest eigenvalue must exceed
/// [`SPD_RATIO`] times the largest.
#[derive(Clone, Debug, PartialEq)]
pub struct SpdMatrix {
    sym: SymMatrix,
}

impl SpdMatrix {
    pub fn new(mat: DMatrix<f64>) -> Result<Self> {
        Self::from_sym(SymMatrix::new(mat)?)
    }

    pub fn from_sym(sym: SymMatrix) -> Result<Self> {
        let eigs = nalgebra::SymmetricEigen::new(sym.mat.clone()).eigenvalues;
        let min_eig = eigs.min();
        let max_eig = eigs.max();
        if !(min_eig > SPD_RATIO * max_eig && min_eig > 0.0) {
            return Err(Error::NotPositiveDefinite { min_eig, max_eig });
        }
        Ok(Self { sym })
    }

    pub fn from_row_major(n: usize, entries: &[f64]) -> Result<Self> {
        Self::from_sym(SymMatrix::from_row_major(n, entries)?)
    }

    /// Wraps a matrix already known to be SPD (e.g. produced by a spectral
    /// map with positive values).
    pub(crate) fn new_unchecked(mat: DMatrix<f64>) -> Self {
        Self {
            sym: SymMatrix::new_unchecked(mat),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            sym: SymMatrix::identity(n),
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::from_sym(SymMatrix::from_diagonal(diag))
    }

    pub fn dim(&self) -> usize {
        self.sym.dim()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.sym.mat
    }

    pub fn as_sym(&self) -> &SymMatrix {
        &self.sym
    }

    pub fn into_sym(self) -> SymMatrix {
        self.sym
    }

    pub fn trace(&self) -> f64 {
        self.sym.trace()
    }
}

fn check_square_finite(mat: &DMatrix<f64>) -> Result<()> {
    if mat.nrows() != mat.ncols() {
        return Err(Error::NotSquare {
            rows: mat.nrows(),
            cols: mat.ncols(),
        });
    }
    if mat.nrows() == 0 {
        return Err(Error::EmptyMatrix);
    }
    for j in 0..mat.ncols() {
        for i in 0..mat.nrows() {
            if !mat[(i, j)].is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

/// `(A + A^T)/2`, entry-exact symmetric.
pub(crate) fn symmetrize(mat: &DMatrix<f64>) -> DMatrix<f64> {
    let n = mat.nrows();
    let mut out = mat.clone();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (mat[(i, j)] + mat[(j, i)]);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    out
}

/// `‖A - A^T‖_F / max(1, ‖A‖_F)`.
pub(crate) fn symmetry_deviation(mat: &DMatrix<f64>) -> f64 {
    (mat - mat.transpose()).norm() / mat.norm().max(1.0)
}

pub(crate) fn check_same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch {
            expected: a,
            got: b,
        });
    }
    Ok(())
}

/// Symmetric eigendecomposition `(Q, lambda)` with `M = Q diag(lambda) Q^T`.
pub(crate) fn sym_eigen(mat: &DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>) {
    let se = nalgebra::SymmetricEigen::new(mat.clone());
    (se.eigenvectors, se.eigenvalues)
}

/// Applies `f` to the spectrum: `Q diag(f(lambda)) Q^T`.
pub(crate) fn spectral_map(mat: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let (q, lam) = sym_eigen(mat);
    let fl = DVector::from_iterator(lam.len(), lam.iter().map(|&x| f(x)));
    symmetrize(&(&q * DMatrix::from_diagonal(&fl) * q.transpose()))
}

/// The traceless part `H_0 = H - (tr(H)/n) Id`.
pub fn traceless_part(h: &SymMatrix) -> SymMatrix {
    let n = h.dim();
    let shift = h.trace() / n as f64;
    let mut mat = h.mat.clone();
    for i in 0..n {
        mat[(i, i)] -= shift;
    }
    SymMatrix { mat }
}

/// The trace form `tr(HK)`, an inner product on symmetric matrices.
pub fn trace_inner(h: &SymMatrix, k: &SymMatrix) -> Result<f64> {
    check_same_dim(h.dim(), k.dim())?;
    Ok(trace_product(&h.mat, &k.mat))
}

/// `tr(AB)` without forming the full product.
pub(crate) fn trace_product(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            sum += a[(i, j)] * b[(j, i)];
        }
    }
    sum
}

/// Spectral exponential of a symmetric matrix; always SPD.
pub fn sym_exp(a: &SymMatrix) -> SpdMatrix {
    SpdMatrix::new_unchecked(spectral_map(&a.mat, f64::exp))
}

/// Spectral logarithm of an SPD matrix; inverse of [`sym_exp`].
pub fn sym_log(p: &SpdMatrix) -> SymMatrix {
    SymMatrix::new_unchecked(spectral_map(p.matrix(), f64::ln))
}

/// `log(g0^{-1/2} g g0^{-1/2})`: the relative logarithm expressed in the
/// `g0`-adapted frame, where it is symmetric.
pub(crate) fn adapted_log(g0_inv_sqrt: &DMatrix<f64>, g: &DMatrix<f64>) -> SymMatrix {
    let adapted = symmetrize(&(g0_inv_sqrt * g * g0_inv_sqrt));
    SymMatrix::new_unchecked(spectral_map(&adapted, f64::ln))
}

/// The relative logarithm `A = log(g0^{-1} g)` as a mixed tensor.
///
/// `g0^{-1} g` is not symmetric, so the logarithm is computed through the
/// congruence `g0^{-1/2} log(g0^{-1/2} g g0^{-1/2}) g0^{1/2}`, keeping all
/// spectral work on symmetric matrices. The result is `g0`-symmetric:
/// `g0 * A` is symmetric.
pub fn relative_log(g0: &SpdMatrix, g: &SpdMatrix) -> Result<DMatrix<f64>> {
    check_same_dim(g0.dim(), g.dim())?;
    let sqrt = spectral_map(g0.matrix(), f64::sqrt);
    let inv_sqrt = spectral_map(g0.matrix(), |x| 1.0 / x.sqrt());
    let adapted = adapted_log(&inv_sqrt, g.matrix());
    Ok(&inv_sqrt * adapted.matrix() * &sqrt)
}

/// Commutator `ad(L)(K) = LK - KL`.
pub(crate) fn ad(l: &DMatrix<f64>, k: &DMatrix<f64>) -> DMatrix<f64> {
    l * k - k * l
}

/// Applies the series operator
/// `A_L(K) = e^{tr(L)/2} sum_{k>=0} 2 ad(L)^{2k}(K) / (2k+2)!`.
///
/// Even powers of `ad(L)` preserve symmetry, so the result is symmetric, and
/// `ad(L)` is skew for the trace form, so `A_L` is self-adjoint:
/// `tr(H A_L(K)) = tr(K A_L(H))`.
pub fn ad_series_apply(l: &SymMatrix, k: &SymMatrix) -> Result<SymMatrix> {
    check_same_dim(l.dim(), k.dim())?;
    let tail = ad_exp_tail(l.matrix(), k.matrix(), 0);
    Ok(SymMatrix::new_unchecked(
        (l.trace() / 2.0).exp() * tail,
    ))
}

/// Shared series engine: for `parity = 0` sums the even-power series
/// `sum_{k>=0} 2 ad(L)^{2k}(K) / (2k+2)!` of [`ad_series_apply`]; for
/// `parity = 1` sums `sum_{m>=1} (-ad(L))^m (K) / (m+1)!`, the tail of the
/// right-trivialized differential of the matrix exponential.
pub(crate) fn ad_exp_tail(l: &DMatrix<f64>, k: &DMatrix<f64>, parity: u8) -> DMatrix<f64> {
    const MAX_TERMS: usize = 300;
    let n = l.nrows();
    let mut acc = DMatrix::<f64>::zeros(n, n);
    match parity {
        0 => {
            // term k: 2 ad(L)^{2k}(K) / (2k+2)!
            let mut cur = k.clone();
            let mut factorial = 2.0; // (2k+2)! for k = 0
            for step in 0..MAX_TERMS {
                let term = 2.0 / factorial * &cur;
                acc += &term;
                if term.norm() < 1e-16 * acc.norm() {
                    break;
                }
                cur = ad(l, &ad(l, &cur));
                let m = 2.0 * (step as f64 + 1.0);
                factorial *= (m + 1.0) * (m + 2.0);
            }
        }
        _ => {
            // term m: (-ad(L))^m (K) / (m+1)!, starting at m = 1
            let mut cur = -ad(l, k);
            let mut factorial = 2.0; // (m+1)! for m = 1
            for step in 1..MAX_TERMS {
                let term = 1.0 / factorial * &cur;
                acc += &term;
                if term.norm() < 1e-16 * acc.norm() {
                    break;
                }
                cur = -ad(l, &cur);
                factorial *= step as f64 + 2.0;
            }
        }
    }
    acc
}
