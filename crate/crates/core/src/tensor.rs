//! Dense complex linear algebra over bipartite Hilbert spaces.
//!
//! Everything in the crate is carried by [`ComplexMatrix`]: operators,
//! density matrices and superoperators alike. Superoperators act on
//! column-stacked vectorizations, so that `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use faer::linalg::solvers::Solve;
use faer::{Mat, MatRef, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Default relative singular-value cut for kernel computations.
pub const DEFAULT_NULL_TOL: f64 = 1e-10;

/// Dense complex matrix. Values are immutable: every operation returns a new
/// matrix.
#[derive(Clone)]
pub struct ComplexMatrix {
    inner: Mat<C64>,
}

/// Which factor of `H_A ⊗ H_B` an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Dimensions of the two factors of a bipartite Hilbert space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompositeDims {
    pub dim_a: usize,
    pub dim_b: usize,
}

impl CompositeDims {
    pub fn new(dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::InvalidParameter(format!(
                "subsystem dimensions must be positive, got ({dim_a}, {dim_b})"
            )));
        }
        Ok(Self { dim_a, dim_b })
    }

    /// A single system viewed as `H_A ⊗ C`.
    pub fn local(dim: usize) -> Result<Self> {
        Self::new(dim, 1)
    }

    pub fn total(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn dim(&self, which: Subsystem) -> usize {
        match which {
            Subsystem::A => self.dim_a,
            Subsystem::B => self.dim_b,
        }
    }

    /// Both factors must be nontrivial for the bipartite analyses.
    pub fn require_bipartite(&self) -> Result<()> {
        if self.dim_a < 2 || self.dim_b < 2 {
            return Err(Error::InvalidParameter(format!(
                "bipartite analysis needs both factors of dimension >= 2, got ({}, {})",
                self.dim_a, self.dim_b
            )));
        }
        Ok(())
    }
}

/// Eigendecomposition of a hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix);
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Self::from_fn(rows, cols, |i, j| entries[i * cols + j]))
    }

    /// Builds a matrix from nested rows, which must all have the same length.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::DimensionMismatch("rows of unequal length".into()));
        }
        Self::new(n, m, rows.concat())
    }

    /// Real-valued convenience constructor, row-major.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::new(rows, cols, entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// # Panics
    /// If either dimension is zero.
    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            inner: Mat::from_fn(rows, cols, f),
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| ZERO)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        Self::from_fn(diag.len(), diag.len(), |i, j| if i == j { diag[i] } else { ZERO })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self::from_fn(diag.len(), diag.len(), |i, j| {
            if i == j {
                C64::new(diag[i], 0.0)
            } else {
                ZERO
            }
        })
    }

    /// Matrix unit `|i⟩⟨j|` of size `n`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        Self::from_fn(n, n, |r, c| if r == i && c == j { ONE } else { ZERO })
    }

    /// `|ψ⟩⟨φ|`.
    pub fn outer(ket: &[C64], bra: &[C64]) -> Self {
        Self::from_fn(ket.len(), bra.len(), |i, j| ket[i] * bra[j].conj())
    }

    pub(crate) fn from_faer(inner: Mat<C64>) -> Self {
        assert!(inner.nrows() > 0 && inner.ncols() > 0);
        Self { inner }
    }

    pub fn as_faer(&self) -> MatRef<'_, C64> {
        self.inner.as_ref()
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.inner[(i, j)]
    }

    pub fn row_major(&self) -> Vec<C64> {
        let (r, c) = (self.rows(), self.cols());
        (0..r * c).map(|k| self.inner[(k / c, k % c)]).collect()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows().min(self.cols())).map(|i| self.inner[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_faer(self.inner.adjoint().to_owned())
    }

    pub fn transpose(&self) -> Self {
        Self::from_faer(self.inner.transpose().to_owned())
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(self.rows(), self.cols(), |i, j| self.inner[(i, j)].conj())
    }

    pub fn map(&self, mut f: impl FnMut(C64) -> C64) -> Self {
        Self::from_fn(self.rows(), self.cols(), |i, j| f(self.inner[(i, j)]))
    }

    pub fn scale(&self, k: C64) -> Self {
        self.map(|z| z * k)
    }

    pub fn scale_real(&self, k: f64) -> Self {
        self.map(|z| z * k)
    }

    pub fn trace(&self) -> C64 {
        self.diagonal().into_iter().sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.norm_l2()
    }

    pub fn max_abs(&self) -> f64 {
        self.inner.norm_max()
    }

    /// Largest entrywise modulus of `self - other`.
    ///
    /// # Panics
    /// If the shapes differ.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self - other).max_abs()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (self - other).frobenius_norm()
    }

    /// Induced 1-norm (maximum absolute column sum).
    pub fn norm_1(&self) -> f64 {
        (0..self.cols())
            .map(|j| (0..self.rows()).map(|i| self.inner[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale_real(0.5)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.max_abs_diff(&self.adjoint()) <= tol
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.is_hermitian(tol)
            && self
                .min_eigenvalue()
                .map(|lambda| lambda >= -tol)
                .unwrap_or(false)
    }

    pub fn is_density(&self, tol: f64) -> bool {
        self.is_psd(tol) && (self.trace() - ONE).norm() <= tol
    }

    /// Eigendecomposition of the hermitian part of `self`.
    pub fn eigh(&self) -> Result<HermitianEigen> {
        require_square(self)?;
        let h = self.hermitian_part();
        let evd = h
            .inner
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Decomposition(format!("{e:?}")))?;
        let values = evd.S().column_vector().iter().map(|z| z.re).collect();
        Ok(HermitianEigen {
            values,
            vectors: Self::from_faer(evd.U().to_owned()),
        })
    }

    pub fn eigenvalues_hermitian(&self) -> Result<Vec<f64>> {
        require_square(self)?;
        self.hermitian_part()
            .inner
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Decomposition(format!("{e:?}")))
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues_hermitian()?[0])
    }

    /// Applies a real function to the spectrum of the hermitian part.
    pub fn hermitian_function(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let HermitianEigen { values, vectors } = self.eigh()?;
        let fd: Vec<f64> = values.iter().map(|&x| f(x)).collect();
        let u = &vectors;
        let n = self.rows();
        let scaled = Self::from_fn(n, n, |i, j| u.get(i, j) * fd[j]);
        Ok(&scaled * &u.adjoint())
    }

    /// Square root of a positive semidefinite matrix; eigenvalues in
    /// `[-tol, 0)` are clamped to zero.
    pub fn sqrt_psd(&self, tol: f64) -> Result<Self> {
        let values = self.eigenvalues_hermitian()?;
        if values[0] < -tol {
            return Err(Error::NotDensityMatrix("operator under the square root"));
        }
        self.hermitian_function(|x| x.max(0.0).sqrt())
    }

    /// Normalizes a hermitian operator to unit trace.
    pub fn trace_normalized(&self) -> Self {
        let t = self.trace();
        self.scale(ONE / t)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.inner[idx]
    }
}

impl PartialEq for ComplexMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.rows() == other.rows()
            && self.cols() == other.cols()
            && (0..self.rows()).all(|i| (0..self.cols()).all(|j| self.inner[(i, j)] == other.inner[(i, j)]))
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            write!(f, "  ")?;
            for j in 0..self.cols() {
                let z = self.inner[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols(), rhs.rows(), "matmul shape mismatch");
        ComplexMatrix::from_faer(&self.inner * &rhs.inner)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows(), self.cols()), (rhs.rows(), rhs.cols()), "add shape mismatch");
        ComplexMatrix::from_faer(&self.inner + &rhs.inner)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows(), self.cols()), (rhs.rows(), rhs.cols()), "sub shape mismatch");
        ComplexMatrix::from_faer(&self.inner - &rhs.inner)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

pub(crate) fn require_square(m: &ComplexMatrix) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        })
    }
}

pub(crate) fn require_same_shape(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    if a.rows() == b.rows() && a.cols() == b.cols() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )))
    }
}

/// `[a, b] = ab - ba`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    &(a * b) - &(b * a)
}

/// `{a, b} = ab + ba`.
pub fn anticommutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    &(a * b) + &(b * a)
}

/// Kronecker product, `(a⊗b)[i·rb+k, j·cb+l] = a[i,j]·b[k,l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (rb, cb) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * rb, a.cols() * cb, |r, c| {
        a.get(r / rb, c / cb) * b.get(r % rb, c % cb)
    })
}

/// Block-diagonal direct sum `a ⊕ b`.
pub fn direct_sum(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca) = (a.rows(), a.cols());
    ComplexMatrix::from_fn(ra + b.rows(), ca + b.cols(), |r, c| match (r < ra, c < ca) {
        (true, true) => a.get(r, c),
        (false, false) => b.get(r - ra, c - ca),
        _ => ZERO,
    })
}

/// Partial trace over the factor that is *not* kept.
pub fn partial_trace(m: &ComplexMatrix, dims: CompositeDims, keep: Subsystem) -> Result<ComplexMatrix> {
    let n = dims.total();
    if m.rows() != n || m.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "partial trace of a {}x{} matrix over dims ({}, {})",
            m.rows(),
            m.cols(),
            dims.dim_a,
            dims.dim_b
        )));
    }
    let (da, db) = (dims.dim_a, dims.dim_b);
    Ok(match keep {
        Subsystem::A => ComplexMatrix::from_fn(da, da, |i, j| {
            (0..db).map(|k| m.get(i * db + k, j * db + k)).sum()
        }),
        Subsystem::B => ComplexMatrix::from_fn(db, db, |k, l| {
            (0..da).map(|i| m.get(i * db + k, i * db + l)).sum()
        }),
    })
}

/// Column-stacking vectorization: `v[i + j·rows] = m[i, j]`.
pub fn vectorize(m: &ComplexMatrix) -> Vec<C64> {
    let r = m.rows();
    (0..r * m.cols()).map(|k| m.get(k % r, k / r)).collect()
}

/// Inverse of [`vectorize`] for square matrices.
pub fn devectorize(v: &[C64]) -> Result<ComplexMatrix> {
    let n = (v.len() as f64).sqrt().round() as usize;
    if n == 0 || n * n != v.len() {
        return Err(Error::NotPerfectSquare(v.len()));
    }
    Ok(ComplexMatrix::from_fn(n, n, |i, j| v[i + j * n]))
}

/// Hilbert–Schmidt pairing `Tr[a† b]`.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    require_same_shape(a, b)?;
    let mut acc = ZERO;
    for j in 0..a.cols() {
        for i in 0..a.rows() {
            acc += a.get(i, j).conj() * b.get(i, j);
        }
    }
    Ok(acc)
}

/// Applies a superoperator matrix to an operator.
pub fn apply_superoperator(superop: &ComplexMatrix, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let v = vectorize(x);
    if superop.cols() != v.len() || superop.rows() != v.len() {
        return Err(Error::DimensionMismatch(format!(
            "superoperator of size {} applied to a {}x{} operator",
            superop.rows(),
            x.rows(),
            x.cols()
        )));
    }
    let col = Mat::from_fn(v.len(), 1, |i, _| v[i]);
    let out = superop.as_faer() * &col;
    devectorize(&(0..v.len()).map(|i| out[(i, 0)]).collect::<Vec<_>>())
}

/// Orthonormal basis of the approximate kernel of `m`: right singular
/// vectors whose singular value is at most `tol · σ_max(m)`.
pub fn null_space(m: &ComplexMatrix, tol: f64) -> Vec<Vec<C64>> {
    let k = null_space_mat(m.as_faer(), tol);
    columns(k.as_ref())
}

pub(crate) fn columns(m: MatRef<'_, C64>) -> Vec<Vec<C64>> {
    (0..m.ncols())
        .map(|j| (0..m.nrows()).map(|i| m[(i, j)]).collect())
        .collect()
}

pub(crate) fn from_columns(rows: usize, cols: &[Vec<C64>]) -> Mat<C64> {
    Mat::from_fn(rows, cols.len(), |i, j| cols[j][i])
}

/// Kernel of `m` as the columns of an `ncols × k` matrix (possibly `k = 0`).
pub(crate) fn null_space_mat(m: MatRef<'_, C64>, tol: f64) -> Mat<C64> {
    null_space_floor(m, tol, 0.0)
}

/// As [`null_space_mat`], with the cut taken relative to
/// `max(floor, σ_max)` so that a numerically zero matrix has a full kernel.
pub(crate) fn null_space_floor(m: MatRef<'_, C64>, tol: f64, floor: f64) -> Mat<C64> {
    let (rows, cols) = (m.nrows(), m.ncols());
    // Tall systems (stacked commutator equations) are reduced to their
    // square triangular factor first; the right singular vectors agree.
    let reduced;
    let work = if rows > cols {
        reduced = m.qr().thin_R().to_owned();
        reduced.as_ref()
    } else {
        m
    };
    let svd = match work.svd() {
        Ok(svd) => svd,
        Err(_) => return Mat::zeros(cols, 0),
    };
    let s: Vec<f64> = svd.S().column_vector().iter().map(|z| z.re).collect();
    let smax = s.first().copied().unwrap_or(0.0).max(floor);
    let v = svd.V();
    let keep: Vec<usize> = (0..cols)
        .filter(|&j| j >= s.len() || smax == 0.0 || s[j] <= tol * smax)
        .collect();
    Mat::from_fn(cols, keep.len(), |i, j| v[(i, keep[j])])
}

/// Right and left kernels of a square matrix from a single SVD.
pub(crate) fn kernel_pair(m: MatRef<'_, C64>, tol: f64) -> Result<(Mat<C64>, Mat<C64>)> {
    assert_eq!(m.nrows(), m.ncols());
    let n = m.nrows();
    let svd = m.svd().map_err(|e| Error::Decomposition(format!("{e:?}")))?;
    let s: Vec<f64> = svd.S().column_vector().iter().map(|z| z.re).collect();
    let smax = s[0];
    let keep: Vec<usize> = (0..n).filter(|&j| smax == 0.0 || s[j] <= tol * smax).collect();
    let (u, v) = (svd.U(), svd.V());
    let right = Mat::from_fn(n, keep.len(), |i, j| v[(i, keep[j])]);
    let left = Mat::from_fn(n, keep.len(), |i, j| u[(i, keep[j])]);
    Ok((right, left))
}

/// Real coordinates of a hermitian matrix, isometric for the
/// Hilbert–Schmidt inner product.
fn hermitian_coords(h: &ComplexMatrix) -> Vec<f64> {
    let n = h.rows();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        out.push(h.get(i, i).re);
    }
    for i in 0..n {
        for j in i + 1..n {
            let z = h.get(i, j);
            out.push(std::f64::consts::SQRT_2 * z.re);
            out.push(std::f64::consts::SQRT_2 * z.im);
        }
    }
    out
}

fn hermitian_from_coords(n: usize, x: &[f64]) -> ComplexMatrix {
    let mut entries = vec![ZERO; n * n];
    for i in 0..n {
        entries[i * n + i] = C64::new(x[i], 0.0);
    }
    let mut k = n;
    for i in 0..n {
        for j in i + 1..n {
            let z = C64::new(x[k], x[k + 1]) / std::f64::consts::SQRT_2;
            entries[i * n + j] = z;
            entries[j * n + i] = z.conj();
            k += 2;
        }
    }
    ComplexMatrix::new(n, n, entries).expect("shape is consistent")
}

/// Orthonormal (Hilbert–Schmidt) basis of the real span of the hermitian
/// parts of `candidates`. Directions with singular value at most
/// `tol · max(1, σ_max)` are dropped, so candidates are expected to be of
/// order one (e.g. built from unit kernel vectors).
pub fn hermitian_basis(candidates: &[ComplexMatrix], tol: f64) -> Vec<ComplexMatrix> {
    let Some(first) = candidates.first() else {
        return Vec::new();
    };
    let n = first.rows();
    let coords: Vec<Vec<f64>> = candidates.iter().map(|c| hermitian_coords(&c.hermitian_part())).collect();
    let m = Mat::<f64>::from_fn(n * n, coords.len(), |i, j| coords[j][i]);
    let Ok(svd) = m.thin_svd() else {
        return Vec::new();
    };
    let s: Vec<f64> = svd.S().column_vector().iter().copied().collect();
    let cut = tol * s.first().copied().unwrap_or(0.0).max(1.0);
    let u = svd.U();
    (0..s.len())
        .filter(|&j| s[j] > cut)
        .map(|j| {
            let x: Vec<f64> = (0..n * n).map(|i| u[(i, j)]).collect();
            hermitian_from_coords(n, &x)
        })
        .collect()
}

/// Splits each candidate into its hermitian and anti-hermitian parts
/// (the latter multiplied by `-i`), both hermitian.
pub fn hermitian_parts(candidates: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    candidates
        .iter()
        .flat_map(|x| {
            let xd = x.adjoint();
            [(x + &xd).scale_real(0.5), (x - &xd).scale(C64::new(0.0, -0.5))]
        })
        .collect()
}

/// Solves `a · x = b` by LU with partial pivoting.
pub(crate) fn solve(a: MatRef<'_, C64>, b: MatRef<'_, C64>) -> Mat<C64> {
    a.partial_piv_lu().solve(b)
}

const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const PADE9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA13: f64 = 5.371920351148152e0;

fn lincomb(terms: &[(f64, &Mat<C64>)], n: usize) -> Mat<C64> {
    let mut out = Mat::<C64>::zeros(n, n);
    for &(k, m) in terms {
        if k != 0.0 {
            out += faer::Scale(C64::new(k, 0.0)) * m;
        }
    }
    out
}

/// Matrix exponential by Padé scaling and squaring (degree 3 to 13,
/// selected from the 1-norm).
pub fn matrix_exp(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    require_square(m)?;
    let n = m.rows();
    let a = m.inner.clone();
    let norm = m.norm_1();
    let eye = Mat::<C64>::identity(n, n);

    for &(degree, theta) in &THETA {
        if norm <= theta {
            let b: &[f64] = match degree {
                3 => &PADE3,
                5 => &PADE5,
                7 => &PADE7,
                _ => &PADE9,
            };
            let a2 = &a * &a;
            // powers[k] = A^(2k)
            let mut powers = vec![eye.clone(), a2.clone()];
            while powers.len() <= degree / 2 {
                let next = powers.last().unwrap() * &a2;
                powers.push(next);
            }
            let odd: Vec<(f64, &Mat<C64>)> = (0..=degree / 2).map(|k| (b[2 * k + 1], &powers[k])).collect();
            let even: Vec<(f64, &Mat<C64>)> = (0..=degree / 2).map(|k| (b[2 * k], &powers[k])).collect();
            let u = &a * lincomb(&odd, n);
            let v = lincomb(&even, n);
            return Ok(ComplexMatrix::from_faer(pade_quotient(&u, &v)));
        }
    }

    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let a = faer::Scale(C64::new(0.5f64.powi(s), 0.0)) * &a;
    let b = &PADE13;
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_inner = &a6 * lincomb(&[(b[13], &a6), (b[11], &a4), (b[9], &a2)], n);
    let u_tail = lincomb(&[(b[7], &a6), (b[5], &a4), (b[3], &a2), (b[1], &eye)], n);
    let u = &a * (u_inner + u_tail);
    let v_inner = &a6 * lincomb(&[(b[12], &a6), (b[10], &a4), (b[8], &a2)], n);
    let v = v_inner + lincomb(&[(b[6], &a6), (b[4], &a4), (b[2], &a2), (b[0], &eye)], n);
    let mut r = pade_quotient(&u, &v);
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(ComplexMatrix::from_faer(r))
}

fn pade_quotient(u: &Mat<C64>, v: &Mat<C64>) -> Mat<C64> {
    let p = v + u;
    let q = v - u;
    solve(q.as_ref(), p.as_ref())
}

pub mod pauli {
    //! Single-qubit operators in the basis `{|0⟩, |1⟩}`.
    use super::{ComplexMatrix, C64, ONE, ZERO};

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::new(2, 2, vec![ZERO, ONE, ONE, ZERO]).unwrap()
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::new(2, 2, vec![ZERO, C64::new(0.0, -1.0), C64::new(0.0, 1.0), ZERO]).unwrap()
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&[1.0, -1.0])
    }

    /// `|0⟩⟨1|`, the annihilator when `|1⟩` is the occupied state.
    pub fn lower() -> ComplexMatrix {
        ComplexMatrix::unit(2, 0, 1)
    }

    /// `|1⟩⟨0|`.
    pub fn raise() -> ComplexMatrix {
        ComplexMatrix::unit(2, 1, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn kron_identity_and_projector() {
        assert_eq!(kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2)), ComplexMatrix::identity(4));
        let p = ComplexMatrix::unit(2, 0, 0);
        assert_eq!(kron(&p, &p), ComplexMatrix::unit(4, 0, 0));
    }

    #[test]
    fn kron_sigma_x_is_antidiagonal() {
        let xx = kron(&pauli::x(), &pauli::x());
        let anti = ComplexMatrix::from_fn(4, 4, |i, j| if i + j == 3 { ONE } else { ZERO });
        assert_eq!(xx, anti);
    }

    #[test]
    fn partial_trace_of_bell_state() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi = [c(s, 0.0), ZERO, ZERO, c(s, 0.0)];
        let bell = ComplexMatrix::outer(&phi, &phi);
        let dims = CompositeDims::new(2, 2).unwrap();
        let rb = partial_trace(&bell, dims, Subsystem::B).unwrap();
        assert!(rb.max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-15);
        let ra = partial_trace(&bell, dims, Subsystem::A).unwrap();
        assert!(ra.max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-15);
    }

    #[test]
    fn partial_trace_dimension_mismatch() {
        let dims = CompositeDims::new(2, 3).unwrap();
        assert!(matches!(
            partial_trace(&ComplexMatrix::identity(4), dims, Subsystem::A),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn partial_trace_of_bulk_commutator_vanishes() {
        // Tr_B [I ⊗ V, H_AB] = 0 whenever Tr_B H_AB = 0.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let dims = CompositeDims::new(2, 3).unwrap();
        let h = random::hermitian(6, &mut rng);
        let ha = partial_trace(&h, dims, Subsystem::A).unwrap().scale_real(1.0 / 3.0);
        let hab = &h - &kron(&ha, &ComplexMatrix::identity(3));
        assert!(partial_trace(&hab, dims, Subsystem::A).unwrap().max_abs() < 1e-13);
        let v = kron(&ComplexMatrix::identity(2), &random::hermitian(3, &mut rng));
        let t = partial_trace(&commutator(&v, &hab), dims, Subsystem::A).unwrap();
        assert!(t.max_abs() < 1e-13, "{t:?}");
    }

    #[test]
    fn vectorize_identity() {
        assert_eq!(vectorize(&ComplexMatrix::identity(2)), vec![ONE, ZERO, ZERO, ONE]);
        assert!(matches!(devectorize(&[ONE, ZERO, ONE]), Err(Error::NotPerfectSquare(3))));
    }

    #[test]
    fn vec_sandwich_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random::ginibre(2, &mut rng);
        let x = random::ginibre(2, &mut rng);
        let b = random::ginibre(2, &mut rng);
        let lhs = vectorize(&(&(&a * &x) * &b));
        let sup = kron(&b.transpose(), &a);
        let rhs = vectorize(&apply_superoperator(&sup, &x).unwrap());
        for (l, r) in lhs.iter().zip(&rhs) {
            assert!((l - r).norm() < 1e-13);
        }
    }

    #[test]
    fn devectorize_roundtrip_3x3() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random::ginibre(3, &mut rng);
        assert_eq!(devectorize(&vectorize(&m)).unwrap(), m);
    }

    #[test]
    fn null_space_examples() {
        let full = null_space(&ComplexMatrix::zeros(3, 3), 1e-10);
        assert_eq!(full.len(), 3);
        let k = null_space(&ComplexMatrix::from_real_diagonal(&[1.0, 0.0]), 1e-10);
        assert_eq!(k.len(), 1);
        assert!(k[0][0].norm() < 1e-15);
        assert!((k[0][1].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn null_space_of_tall_and_wide_systems() {
        // Wide: 1x3 row has a 2-dimensional kernel.
        let wide = ComplexMatrix::from_real(1, 3, &[1.0, 1.0, 0.0]).unwrap();
        assert_eq!(null_space(&wide, 1e-10).len(), 2);
        // Tall: stacking the same row three times.
        let tall = ComplexMatrix::from_real(6, 2, &[1.0, -1.0, 2.0, -2.0, 3.0, -3.0, 0.5, -0.5, 1.0, -1.0, 1.0, -1.0])
            .unwrap();
        let k = null_space(&tall, 1e-10);
        assert_eq!(k.len(), 1);
        assert!((k[0][0] - k[0][1]).norm() < 1e-14);
    }

    #[test]
    fn matrix_exp_examples() {
        assert_eq!(
            matrix_exp(&ComplexMatrix::zeros(3, 3)).unwrap().max_abs_diff(&ComplexMatrix::identity(3)),
            0.0
        );
        let e = matrix_exp(&ComplexMatrix::from_real_diagonal(&[1.0, -1.0])).unwrap();
        let want = ComplexMatrix::from_real_diagonal(&[std::f64::consts::E, 1.0 / std::f64::consts::E]);
        assert!(e.max_abs_diff(&want) < 1e-12);
        let arg = pauli::x().scale(C64::new(0.0, std::f64::consts::FRAC_PI_2));
        let e = matrix_exp(&arg).unwrap();
        assert!(e.max_abs_diff(&pauli::x().scale(I)) < 1e-12, "{e:?}");
        // Nilpotent: exp([[0, 1], [0, 0]]) = [[1, 1], [0, 1]].
        let n = ComplexMatrix::unit(2, 0, 1).scale_real(3.0);
        let e = matrix_exp(&n).unwrap();
        assert!(e.max_abs_diff(&ComplexMatrix::from_real(2, 2, &[1.0, 3.0, 0.0, 1.0]).unwrap()) < 1e-12);
        assert!(matches!(matrix_exp(&ComplexMatrix::zeros(2, 3)), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn matrix_exp_large_norm_uses_squaring() {
        let d = ComplexMatrix::from_real_diagonal(&[10.0, -3.0, 0.5]);
        let e = matrix_exp(&d).unwrap();
        for (k, x) in [10.0f64, -3.0, 0.5].iter().enumerate() {
            assert!(((e.get(k, k).re - x.exp()) / x.exp()).abs() < 1e-13);
        }
    }

    #[test]
    fn hs_inner_examples() {
        let eye = ComplexMatrix::identity(2);
        assert_eq!(hs_inner(&eye, &eye).unwrap(), c(2.0, 0.0));
        assert_eq!(hs_inner(&pauli::x(), &pauli::y()).unwrap(), ZERO);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random::ginibre(4, &mut rng);
        let direct: f64 = a.row_major().iter().map(|z| z.norm_sqr()).sum();
        let ip = hs_inner(&a, &a).unwrap();
        assert!((ip.re - direct).abs() < 1e-12 && ip.im.abs() < 1e-14);
        assert!(hs_inner(&eye, &ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn predicates() {
        let rho = ComplexMatrix::from_real_diagonal(&[0.25, 0.75]);
        assert!(rho.is_hermitian(0.0) && rho.is_psd(0.0) && rho.is_density(1e-15));
        assert!(!pauli::z().is_psd(1e-12));
        assert!(!ComplexMatrix::unit(2, 0, 1).is_hermitian(1e-12));
        assert!(!ComplexMatrix::identity(2).is_density(1e-12));
    }

    #[test]
    fn hermitian_basis_drops_dependent_directions() {
        let cands = vec![pauli::z(), pauli::z().scale_real(2.0), ComplexMatrix::identity(2)];
        let basis = hermitian_basis(&cands, 1e-10);
        assert_eq!(basis.len(), 2);
        for b in &basis {
            assert!((b.frobenius_norm() - 1.0).abs() < 1e-14);
            assert!(b.is_hermitian(0.0));
        }
    }

    #[test]
    fn constructors_reject_bad_shapes() {
        assert_eq!(ComplexMatrix::new(0, 2, vec![]), Err(Error::EmptyMatrix));
        assert!(ComplexMatrix::new(2, 2, vec![ONE; 3]).is_err());
        assert!(ComplexMatrix::from_rows(&[vec![ONE, ZERO], vec![ONE]]).is_err());
        assert!(CompositeDims::new(0, 2).is_err());
        assert!(CompositeDims::new(1, 2).unwrap().require_bipartite().is_err());
    }

    fn small_matrix(n: usize) -> impl Strategy<Value = ComplexMatrix> {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n)
            .prop_map(move |v| ComplexMatrix::new(n, n, v.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn kron_mixed_product(a in small_matrix(2), b in small_matrix(3), cc in small_matrix(2), d in small_matrix(3)) {
            let lhs = &kron(&a, &b) * &kron(&cc, &d);
            let rhs = kron(&(&a * &cc), &(&b * &d));
            prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12 * (1.0 + rhs.max_abs()));
        }

        #[test]
        fn partial_trace_of_product(a in small_matrix(2), b in small_matrix(3)) {
            let dims = CompositeDims::new(2, 3).unwrap();
            let ab = kron(&a, &b);
            let ta = partial_trace(&ab, dims, Subsystem::A).unwrap();
            prop_assert!(ta.max_abs_diff(&a.scale(b.trace())) <= 1e-13);
            let tb = partial_trace(&ab, dims, Subsystem::B).unwrap();
            prop_assert!(tb.max_abs_diff(&b.scale(a.trace())) <= 1e-13);
            prop_assert!((ta.trace() - ab.trace()).norm() <= 1e-13);
        }

        #[test]
        fn vec_sandwich(a in small_matrix(3), x in small_matrix(3), b in small_matrix(3)) {
            let lhs = vectorize(&(&(&a * &x) * &b));
            let rhs = vectorize(&apply_superoperator(&kron(&b.transpose(), &a), &x).unwrap());
            for (l, r) in lhs.iter().zip(&rhs) {
                prop_assert!((l - r).norm() <= 1e-13);
            }
        }

        #[test]
        fn null_space_residual_bound(m in small_matrix(4), rank in 1usize..4) {
            // Force a rank deficiency by zeroing trailing columns of m·m†-like factor.
            let trunc = ComplexMatrix::from_fn(4, 4, |i, j| if j < rank { m.get(i, j) } else { ZERO });
            let low = &trunc * &m.adjoint();
            let tol = 1e-10;
            let smax = low.as_faer().singular_values().unwrap()[0];
            for v in null_space(&low, tol) {
                let mv = &low * &ComplexMatrix::from_fn(4, 1, |i, _| v[i]);
                prop_assert!(mv.frobenius_norm() <= 2.0 * tol * smax + 1e-15);
                let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
                prop_assert!((norm - 1.0).abs() < 1e-12);
            }
        }

        #[test]
        fn exp_of_skew_hermitian_is_unitary(h in small_matrix(4), t in 0.1f64..20.0) {
            let skew = h.hermitian_part().scale(C64::new(0.0, t));
            let u = matrix_exp(&skew).unwrap();
            prop_assert!((&u * &u.adjoint()).max_abs_diff(&ComplexMatrix::identity(4)) <= 1e-10);
        }

        #[test]
        fn hs_inner_conjugate_symmetric(a in small_matrix(3), b in small_matrix(3)) {
            let ab = hs_inner(&a, &b).unwrap();
            let ba = hs_inner(&b, &a).unwrap();
            prop_assert!((ab - ba.conj()).norm() <= 1e-14);
        }
    }
}
