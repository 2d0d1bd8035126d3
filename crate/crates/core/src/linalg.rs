//! Dense complex operators on tensor-product spaces.
//!
//! Composite indices are row-major over the tensor factors: factor 0 is the
//! slowest-varying digit. Every routine in the crate relies on this single
//! convention.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::storage::RawStorage;
use nalgebra::{DMatrix, DVector, Dim, Matrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Largest total dimension any size-checked operation will build (4^4).
pub const MAX_DIM: usize = 256;

/// Relative tolerance on `max |X - X^dagger|`, scaled by `1 + max |X_ij|`.
pub const HERMITIAN_RTOL: f64 = 1e-9;

/// An eigenvalue below `-NEGATIVITY_RTOL * max |X_ij|` marks an operator as not PSD.
pub const NEGATIVITY_RTOL: f64 = 1e-10;

/// Dense complex square matrix tagged with the dimensions of its tensor factors.
#[derive(Clone, PartialEq)]
pub struct MultiOperator {
    entries: CMatrix,
    dims: Vec<usize>,
}

impl fmt::Debug for MultiOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiOperator")
            .field("dims", &self.dims)
            .field("entries", &self.entries)
            .finish()
    }
}

/// Eigendecomposition of the Hermitian part of an operator, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    /// `V f(Λ) V†`.
    pub fn reconstruct(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &v) in self.values.iter().enumerate() {
            let s = f(v);
            for i in 0..n {
                scaled[(i, j)] *= s;
            }
        }
        &scaled * self.vectors.adjoint()
    }
}

/// Hermitian eigendecomposition of `(m + m†)/2`, sorted ascending.
pub fn hermitian_eigen(m: &CMatrix) -> HermitianEigen {
    let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let (values, vectors) = symmetric_eigen_checked(sym);
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let sorted = order.iter().map(|&i| values[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), order.len(), |r, c| vectors[(r, order[c])]);
    HermitianEigen { values: sorted, vectors }
}

/// Eigenvalues of `(m + m†)/2`, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let mut values: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    if values.iter().any(|v| !v.is_finite()) {
        values = symmetric_eigen_checked(sym).0;
    }
    values.sort_by(f64::total_cmp);
    values
}

/// The QR iteration in nalgebra occasionally breaks down (NaN/inf) on very
/// sparse inputs. Conjugating by a dense Householder reflection removes the
/// sparsity without changing the spectrum.
fn symmetric_eigen_checked(sym: CMatrix) -> (Vec<f64>, CMatrix) {
    let finite = |e: &SymmetricEigen<C64, nalgebra::Dyn>| {
        e.eigenvalues.iter().all(|v| v.is_finite()) && e.eigenvectors.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    };
    let eig = SymmetricEigen::new(sym.clone());
    if finite(&eig) {
        return (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors);
    }
    let n = sym.nrows();
    for attempt in 1..=4u32 {
        let v = CMatrix::from_fn(n, 1, |i, _| {
            let x = (i + 1) as f64 * (0.6180339887 + attempt as f64);
            C64::new((x.fract() - 0.5) + 1e-3, (x * 1.3).fract() - 0.5)
        });
        let norm2 = v.iter().map(C64::norm_sqr).sum::<f64>();
        let h = CMatrix::identity(n, n) - &v * v.adjoint() * C64::new(2.0 / norm2, 0.0);
        let eig = SymmetricEigen::new(&h * &sym * &h);
        if finite(&eig) {
            return (eig.eigenvalues.iter().copied().collect(), &h * eig.eigenvectors);
        }
    }
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for f in (0..dims.len().saturating_sub(1)).rev() {
        s[f] = s[f + 1] * dims[f + 1];
    }
    s
}

/// Full-space offsets of every composite index over `factors` (first listed is slowest).
pub(crate) fn subset_offsets(dims: &[usize], factors: &[usize]) -> Vec<usize> {
    let st = strides(dims);
    let mut offsets = vec![0usize];
    for &f in factors {
        let mut next = Vec::with_capacity(offsets.len() * dims[f]);
        for &o in &offsets {
            for digit in 0..dims[f] {
                next.push(o + digit * st[f]);
            }
        }
        offsets = next;
    }
    offsets
}

/// Digits of a composite index, factor 0 first.
pub fn index_digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut digits = vec![0; dims.len()];
    for f in (0..dims.len()).rev() {
        digits[f] = index % dims[f];
        index /= dims[f];
    }
    digits
}

fn check_subset(set: &[usize], factors: usize) -> Result<Vec<bool>> {
    let mut mask = vec![false; factors];
    for &i in set {
        if i >= factors {
            return Err(Error::IndexOutOfRange { index: i, factors });
        }
        mask[i] = true;
    }
    Ok(mask)
}

pub fn check_budget(dim: usize) -> Result<()> {
    if dim > MAX_DIM {
        Err(Error::SizeBudget { dim, budget: MAX_DIM })
    } else {
        Ok(())
    }
}

impl MultiOperator {
    pub fn new(entries: CMatrix, dims: Vec<usize>) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "operator must be square, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if dims.is_empty() || dims.iter().any(|&d| d == 0) {
            return Err(Error::DimensionMismatch(format!("invalid factor dimensions {dims:?}")));
        }
        let total: usize = dims.iter().product();
        if total != entries.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "factor dimensions {dims:?} multiply to {total}, matrix side is {}",
                entries.nrows()
            )));
        }
        Ok(Self { entries, dims })
    }

    /// Single-factor operator.
    pub fn from_matrix(entries: CMatrix) -> Result<Self> {
        let n = entries.nrows();
        Self::new(entries, vec![n])
    }

    pub fn from_real_fn(dims: Vec<usize>, f: impl Fn(usize, usize) -> f64) -> Self {
        let n = dims.iter().product();
        Self { entries: CMatrix::from_fn(n, n, |i, j| C64::new(f(i, j), 0.0)), dims }
    }

    pub fn identity(dims: Vec<usize>) -> Self {
        let n = dims.iter().product();
        Self { entries: CMatrix::identity(n, n), dims }
    }

    pub fn zeros(dims: Vec<usize>) -> Self {
        let n = dims.iter().product();
        Self { entries: CMatrix::zeros(n, n), dims }
    }

    pub fn diagonal(dims: Vec<usize>, diag: &[f64]) -> Result<Self> {
        let n: usize = dims.iter().product();
        if diag.len() != n {
            return Err(Error::DimensionMismatch(format!("{} diagonal entries for dimension {n}", diag.len())));
        }
        let v = CVector::from_iterator(n, diag.iter().map(|&x| C64::new(x, 0.0)));
        Ok(Self { entries: CMatrix::from_diagonal(&v), dims })
    }

    /// `|v⟩⟨v|`.
    pub fn projector(v: &CVector, dims: Vec<usize>) -> Result<Self> {
        Self::new(v * v.adjoint(), dims)
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn num_factors(&self) -> usize {
        self.dims.len()
    }

    pub fn with_dims(self, dims: Vec<usize>) -> Result<Self> {
        Self::new(self.entries, dims)
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// `max |X - X†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut defect: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                defect = defect.max((self.entries[(i, j)] - self.entries[(j, i)].conj()).norm());
            }
        }
        defect
    }

    pub fn hermitian_tolerance(&self) -> f64 {
        HERMITIAN_RTOL * (1.0 + self.max_abs())
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() <= self.hermitian_tolerance()
    }

    pub fn ensure_hermitian(&self) -> Result<()> {
        let defect = self.hermiticity_defect();
        let tolerance = self.hermitian_tolerance();
        if defect <= tolerance {
            Ok(())
        } else {
            Err(Error::NotHermitian { defect, tolerance })
        }
    }

    pub fn hermitian_part(&self) -> Self {
        let entries = (&self.entries + self.entries.adjoint()) * C64::new(0.5, 0.0);
        Self { entries, dims: self.dims.clone() }
    }

    pub fn adjoint(&self) -> Self {
        Self { entries: self.entries.adjoint(), dims: self.dims.clone() }
    }

    pub fn transpose(&self) -> Self {
        Self { entries: self.entries.transpose(), dims: self.dims.clone() }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { entries: &self.entries * C64::new(c, 0.0), dims: self.dims.clone() }
    }

    fn check_same_dims(&self, other: &Self) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch(format!("factor dimensions {:?} vs {:?}", self.dims, other.dims)));
        }
        Ok(())
    }

    /// Matrix product `self · rhs`; factor layouts must agree.
    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        self.check_same_dims(rhs)?;
        Ok(Self { entries: &self.entries * &rhs.entries, dims: self.dims.clone() })
    }

    /// `U X U†`.
    pub fn conjugate_by(&self, u: &Self) -> Result<Self> {
        self.check_same_dims(u)?;
        Ok(Self { entries: &u.entries * &self.entries * u.entries.adjoint(), dims: self.dims.clone() })
    }

    /// `tr(self · rhs)` without forming the product.
    pub fn trace_product(&self, rhs: &Self) -> Result<C64> {
        self.check_same_dims(rhs)?;
        let n = self.dim();
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..n {
            for i in 0..n {
                acc += self.entries[(i, j)] * rhs.entries[(j, i)];
            }
        }
        Ok(acc)
    }

    /// Kronecker product with concatenated factor dimensions.
    pub fn tensor_product(&self, rhs: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&rhs.dims);
        Self { entries: self.entries.kronecker(&rhs.entries), dims }
    }

    /// `self^{⊗n}` for `n >= 1`.
    pub fn tensor_power(&self, n: usize) -> Self {
        assert!(n >= 1, "tensor power needs n >= 1");
        let mut out = self.clone();
        for _ in 1..n {
            out = out.tensor_product(self);
        }
        out
    }

    /// Traces out every factor not listed in `keep`; kept factors stay in ascending order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let mask = check_subset(keep, self.num_factors())?;
        let kept: Vec<usize> = (0..self.num_factors()).filter(|&f| mask[f]).collect();
        let traced: Vec<usize> = (0..self.num_factors()).filter(|&f| !mask[f]).collect();
        let keep_off = subset_offsets(&self.dims, &kept);
        let trace_off = subset_offsets(&self.dims, &traced);
        let n = keep_off.len();
        let mut out = CMatrix::zeros(n, n);
        for (c, &co) in keep_off.iter().enumerate() {
            for (r, &ro) in keep_off.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for &t in &trace_off {
                    acc += self.entries[(ro + t, co + t)];
                }
                out[(r, c)] = acc;
            }
        }
        if kept.is_empty() {
            return Self::new(out, vec![1]);
        }
        let dims = kept.iter().map(|&f| self.dims[f]).collect();
        Self::new(out, dims)
    }

    /// Transposes the listed factors.
    pub fn partial_transpose(&self, subsystems: &[usize]) -> Result<Self> {
        let mask = check_subset(subsystems, self.num_factors())?;
        let (sel, rest) = self.transpose_split(&mask);
        let n = self.dim();
        let entries = CMatrix::from_fn(n, n, |r, c| self.entries[(rest[r] + sel[c], rest[c] + sel[r])]);
        Ok(Self { entries, dims: self.dims.clone() })
    }

    /// Per-index offset contributions of the masked and unmasked factors.
    pub(crate) fn transpose_split(&self, mask: &[bool]) -> (Vec<usize>, Vec<usize>) {
        let st = strides(&self.dims);
        let n = self.dim();
        let mut sel = vec![0; n];
        let mut rest = vec![0; n];
        for i in 0..n {
            let digits = index_digits(i, &self.dims);
            for (f, &dg) in digits.iter().enumerate() {
                if mask[f] {
                    sel[i] += dg * st[f];
                } else {
                    rest[i] += dg * st[f];
                }
            }
        }
        (sel, rest)
    }

    /// Reorders factors: factor `j` of the result is factor `perm[j]` of `self`.
    pub fn permute_subsystems(&self, perm: &[usize]) -> Result<Self> {
        let m = self.num_factors();
        if perm.len() != m {
            return Err(Error::InvalidPermutation(format!("length {} for {m} factors", perm.len())));
        }
        let mut seen = vec![false; m];
        for &p in perm {
            if p >= m || seen[p] {
                return Err(Error::InvalidPermutation(format!("{perm:?} is not a bijection on 0..{m}")));
            }
            seen[p] = true;
        }
        let map = subset_offsets(&self.dims, perm);
        let n = self.dim();
        let entries = CMatrix::from_fn(n, n, |r, c| self.entries[(map[r], map[c])]);
        let dims = perm.iter().map(|&p| self.dims[p]).collect();
        Ok(Self { entries, dims })
    }

    pub fn eigen(&self) -> Result<HermitianEigen> {
        self.ensure_hermitian()?;
        Ok(hermitian_eigen(&self.entries))
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        self.ensure_hermitian()?;
        Ok(hermitian_eigenvalues(&self.entries))
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?[0])
    }

    /// Largest absolute eigenvalue of a Hermitian operator.
    pub fn spectral_norm(&self) -> Result<f64> {
        let ev = self.eigenvalues()?;
        Ok(ev[0].abs().max(ev[ev.len() - 1].abs()))
    }

    /// Cutoff below which an eigenvalue counts as negative for detection verdicts.
    pub fn negativity_threshold(&self) -> f64 {
        -NEGATIVITY_RTOL * self.max_abs()
    }

    /// True when the operator has an eigenvalue below [`Self::negativity_threshold`].
    pub fn is_negative(&self) -> Result<bool> {
        Ok(self.min_eigenvalue()? < self.negativity_threshold())
    }

    /// Hermitian PSD square root.
    pub fn psd_sqrt(&self) -> Result<Self> {
        let eig = self.eigen()?;
        let tol = self.hermitian_tolerance();
        if eig.values[0] < -tol {
            return Err(Error::NotPsd { min_eigenvalue: eig.values[0] });
        }
        let entries = eig.reconstruct(|v| v.max(0.0).sqrt());
        Ok(Self { entries, dims: self.dims.clone() })
    }

    pub fn ensure_psd(&self) -> Result<()> {
        let min = self.min_eigenvalue()?;
        if min < -self.hermitian_tolerance() {
            Err(Error::NotPsd { min_eigenvalue: min })
        } else {
            Ok(())
        }
    }
}

impl Add<&MultiOperator> for &MultiOperator {
    type Output = MultiOperator;

    /// Panics if the factor layouts differ.
    fn add(self, rhs: &MultiOperator) -> MultiOperator {
        assert_eq!(self.dims, rhs.dims, "factor dimensions differ");
        MultiOperator { entries: &self.entries + &rhs.entries, dims: self.dims.clone() }
    }
}

impl Sub<&MultiOperator> for &MultiOperator {
    type Output = MultiOperator;

    /// Panics if the factor layouts differ.
    fn sub(self, rhs: &MultiOperator) -> MultiOperator {
        assert_eq!(self.dims, rhs.dims, "factor dimensions differ");
        MultiOperator { entries: &self.entries - &rhs.entries, dims: self.dims.clone() }
    }
}

impl Mul<C64> for &MultiOperator {
    type Output = MultiOperator;

    fn mul(self, rhs: C64) -> MultiOperator {
        MultiOperator { entries: &self.entries * rhs, dims: self.dims.clone() }
    }
}

/// Serialisable dense complex matrix as nested `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ComplexRows(pub Vec<Vec<[f64; 2]>>);

impl ComplexRows {
    pub fn from_matrix(m: &CMatrix) -> Self {
        Self((0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect())
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let n = self.0.len();
        if self.0.iter().any(|row| row.len() != n) {
            return Err(Error::Config("matrix rows must all have the same length as the row count".into()));
        }
        Ok(CMatrix::from_fn(n, n, |i, j| C64::new(self.0[i][j][0], self.0[i][j][1])))
    }
}

/// Max-abs entrywise distance.
pub fn max_abs_diff<R, C, S1, S2>(a: &Matrix<C64, R, C, S1>, b: &Matrix<C64, R, C, S2>) -> f64
where
    R: Dim,
    C: Dim,
    S1: RawStorage<C64, R, C>,
    S2: RawStorage<C64, R, C>,
{
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter().zip(b.iter()).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}
