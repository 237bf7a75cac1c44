//! Dense complex vectors and matrices sized for array processing (m ≤ 64).
//!
//! Only what the constrained RLS recursions need lives here: products,
//! the gain vector and rank-1 inverse-correlation update of the matrix
//! inversion lemma, Hermitian symmetrisation, and a Cholesky solve for the
//! MVDR oracle. Nothing in the recursion path inverts a matrix.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Column vector of complex samples.
#[derive(Debug, Clone, PartialEq)]
pub struct CVector(Vec<Complex64>);

impl CVector {
    pub fn new(entries: Vec<Complex64>) -> Self {
        CVector(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        CVector(vec![ZERO; dim])
    }

    pub fn from_real(values: &[f64]) -> Self {
        CVector(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex64> {
        self.0.iter()
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }

    /// Inner product `selfᴴ other`.
    pub fn inner(&self, other: &CVector) -> Complex64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn scale(&self, c: Complex64) -> CVector {
        CVector(self.0.iter().map(|v| v * c).collect())
    }

    pub fn scale_real(&self, c: f64) -> CVector {
        CVector(self.0.iter().map(|v| v * c).collect())
    }

    pub fn add(&self, other: &CVector) -> CVector {
        debug_assert_eq!(self.dim(), other.dim());
        CVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &CVector) -> CVector {
        debug_assert_eq!(self.dim(), other.dim());
        CVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn max_abs_diff(&self, other: &CVector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<usize> for CVector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for CVector {
    fn index_mut(&mut self, i: usize) -> &mut Complex64 {
        &mut self.0[i]
    }
}

impl FromIterator<Complex64> for CVector {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        CVector(iter.into_iter().collect())
    }
}

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, 1.0)
    }

    pub fn scaled_identity(n: usize, c: f64) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(c, 0.0);
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension {
                op: "from_row_major",
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(CMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let data: Vec<Complex64> = rows.iter().flatten().copied().collect();
        Self::from_row_major(rows.len(), cols, data)
    }

    /// Real diagonal matrix.
    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    /// `u vᴴ`.
    pub fn outer(u: &CVector, v: &CVector) -> Self {
        let mut m = Self::zeros(u.dim(), v.dim());
        for i in 0..u.dim() {
            for j in 0..v.dim() {
                m[(i, j)] = u[i] * v[j].conj();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> CVector {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> CMatrix {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    /// `M x`.
    pub fn mul_vec(&self, x: &CVector) -> Result<CVector> {
        check_dim("mul_vec", self.cols, x.dim())?;
        Ok(self
            .data
            .chunks_exact(self.cols)
            .map(|row| row.iter().zip(x.iter()).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `Mᴴ x` without forming the adjoint.
    pub fn adjoint_mul_vec(&self, x: &CVector) -> Result<CVector> {
        check_dim("adjoint_mul_vec", self.rows, x.dim())?;
        let mut out = vec![ZERO; self.cols];
        for (row, xi) in self.data.chunks_exact(self.cols).zip(x.iter()) {
            for (o, a) in out.iter_mut().zip(row) {
                *o += a.conj() * xi;
            }
        }
        Ok(CVector::new(out))
    }

    pub fn matmul(&self, other: &CMatrix) -> Result<CMatrix> {
        check_dim("matmul", self.cols, other.rows)?;
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &CMatrix) -> Result<CMatrix> {
        self.check_same_shape("add", other)?;
        Ok(CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &CMatrix) -> Result<CMatrix> {
        self.check_same_shape("sub", other)?;
        Ok(CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, c: Complex64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    /// `xᴴ M y`.
    pub fn quadratic_form(&self, x: &CVector, y: &CVector) -> Result<Complex64> {
        Ok(x.inner(&self.mul_vec(y)?))
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest elementwise deviation from Hermitian symmetry.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    fn check_same_shape(&self, op: &'static str, other: &CMatrix) -> Result<()> {
        check_dim(op, self.rows, other.rows)?;
        check_dim(op, self.cols, other.cols)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

fn check_dim(op: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { op, expected, got })
    }
}

/// Gain vector `k = P x / (1 + λ₁ xᴴ P x)`.
pub fn gain_vector(p: &CMatrix, x: &CVector, lambda1: f64) -> Result<CVector> {
    if !p.is_square() {
        return Err(Error::Dimension {
            op: "gain_vector",
            expected: p.rows(),
            got: p.cols(),
        });
    }
    let px = p.mul_vec(x)?;
    let denom = ONE + lambda1 * x.inner(&px);
    if denom.norm() <= tol::SINGULAR {
        return Err(Error::SingularUpdate { snapshot: None });
    }
    Ok(px.scale(denom.inv()))
}

/// Inverse-correlation update `P' = P − λ₁ k xᴴ P`.
///
/// With `k` from [`gain_vector`] on the same arguments this is the matrix
/// inversion lemma for `(P⁻¹ + λ₁ x xᴴ)⁻¹`.
pub fn inverse_update(p: &CMatrix, k: &CVector, x: &CVector, lambda1: f64) -> Result<CMatrix> {
    check_dim("inverse_update", p.rows(), k.dim())?;
    // xᴴ P as a row vector.
    let row = p.adjoint_mul_vec(x)?;
    let mut out = p.clone();
    for i in 0..p.rows() {
        let ki = k[i] * lambda1;
        if ki == ZERO {
            continue;
        }
        for j in 0..p.cols() {
            out[(i, j)] -= ki * row[j].conj();
        }
    }
    Ok(out)
}

/// Symmetrise: `(M + Mᴴ) / 2`.
///
/// # Panics
/// If `m` is not square.
pub fn hermitian_regularize(m: &CMatrix) -> CMatrix {
    assert!(m.is_square(), "hermitian_regularize needs a square matrix");
    let n = m.rows();
    let mut out = m.clone();
    for i in 0..n {
        out[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            out[(i, j)] = avg;
            out[(j, i)] = avg.conj();
        }
    }
    out
}

/// Solve `R z = b` for Hermitian positive-definite `R` by Cholesky factorisation.
pub fn cholesky_solve(r: &CMatrix, b: &CVector) -> Result<CVector> {
    if !r.is_square() {
        return Err(Error::Dimension {
            op: "cholesky_solve",
            expected: r.rows(),
            got: r.cols(),
        });
    }
    check_dim("cholesky_solve", r.rows(), b.dim())?;
    let n = r.rows();
    // Lower factor L with R = L Lᴴ.
    let mut l = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = r[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if d.is_nan() || d <= 0.0 || !d.is_finite() {
            return Err(Error::NotPositiveDefinite { pivot: j });
        }
        let d = d.sqrt();
        l[(j, j)] = Complex64::new(d, 0.0);
        for i in (j + 1)..n {
            let mut s = r[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / d;
        }
    }
    let mut z = vec![ZERO; n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[(i, k)] * z[k];
        }
        z[i] = s / l[(i, i)];
    }
    for i in (0..n).rev() {
        let mut s = z[i];
        for k in (i + 1)..n {
            s -= l[(k, i)].conj() * z[k];
        }
        z[i] = s / l[(i, i)];
    }
    Ok(CVector::new(z))
}
