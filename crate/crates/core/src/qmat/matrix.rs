use std::fmt;
use std::ops::{Add, Index, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Dense square complex matrix.
///
/// Every constructor guarantees a square shape with `dim >= 1` and finite
/// entries. Arithmetic between matrices of different dimension panics, as
/// with any shape error in `nalgebra`.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    data: DMatrix<Complex64>,
}

impl CMatrix {
    pub fn from_dmatrix(data: DMatrix<Complex64>) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(Error::NotSquare {
                rows: data.nrows(),
                cols: data.ncols(),
            });
        }
        if data.nrows() == 0 {
            return Err(Error::EmptyMatrix);
        }
        for j in 0..data.ncols() {
            for i in 0..data.nrows() {
                let z = data[(i, j)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Self { data })
    }

    /// Row-major entries.
    pub fn from_row_slice(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Self::from_dmatrix(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        for r in rows {
            if r.len() != dim {
                return Err(Error::NotSquare {
                    rows: dim,
                    cols: r.len(),
                });
            }
        }
        let flat: Vec<Complex64> = rows.iter().flatten().copied().collect();
        Self::from_row_slice(dim, &flat)
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| c64(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim >= 1);
        Self {
            data: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1);
        Self {
            data: DMatrix::zeros(dim, dim),
        }
    }

    /// Diagonal matrix with real entries. Panics on non-finite input.
    pub fn diag_real(diag: &[f64]) -> Self {
        let d: Vec<Complex64> = diag.iter().map(|&x| c64(x, 0.0)).collect();
        Self::diag(&d)
    }

    pub fn diag(diag: &[Complex64]) -> Self {
        assert!(!diag.is_empty());
        assert!(diag.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
        Self {
            data: DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(diag)),
        }
    }

    /// |v><v| for an arbitrary (not necessarily normalized) vector.
    pub fn outer(v: &[Complex64]) -> Self {
        assert!(!v.is_empty());
        let n = v.len();
        let mut data = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                data[(i, j)] = v[i] * v[j].conj();
            }
        }
        Self { data }
    }

    pub fn pauli_x() -> Self {
        Self::from_row_slice(2, &[ZERO, ONE, ONE, ZERO]).unwrap()
    }

    pub fn pauli_y() -> Self {
        Self::from_row_slice(2, &[ZERO, -I, I, ZERO]).unwrap()
    }

    pub fn pauli_z() -> Self {
        Self::diag_real(&[1.0, -1.0])
    }

    pub(crate) fn from_dmatrix_unchecked(data: DMatrix<Complex64>) -> Self {
        debug_assert_eq!(data.nrows(), data.ncols());
        Self { data }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn into_dmatrix(self) -> DMatrix<Complex64> {
        self.data
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[(row, col)]
    }

    /// Row-major copy of the entries.
    pub fn to_rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.data[(i, j)]).collect())
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            data: self.data.adjoint(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.data.trace()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            data: &self.data * s,
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(c64(s, 0.0))
    }

    /// `self · rho · self†`
    pub fn conjugate(&self, rho: &CMatrix) -> Self {
        Self {
            data: &self.data * &rho.data * self.data.adjoint(),
        }
    }

    /// Tensor product; the left operand indexes the most significant factor.
    pub fn kron(&self, other: &CMatrix) -> Self {
        Self {
            data: self.data.kronecker(&other.data),
        }
    }

    /// Square sub-block starting at (`start`, `start`)-style offsets.
    pub fn block(&self, row: usize, col: usize, size: usize) -> Self {
        Self {
            data: self.data.view((row, col), (size, size)).into_owned(),
        }
    }

    /// Builds `[[a, b], [c, d]]` from four equally sized blocks.
    pub fn from_blocks(a: &CMatrix, b: &CMatrix, c: &CMatrix, d: &CMatrix) -> Self {
        let n = a.dim();
        assert!(b.dim() == n && c.dim() == n && d.dim() == n);
        let mut data = DMatrix::zeros(2 * n, 2 * n);
        data.view_mut((0, 0), (n, n)).copy_from(&a.data);
        data.view_mut((0, n), (n, n)).copy_from(&b.data);
        data.view_mut((n, 0), (n, n)).copy_from(&c.data);
        data.view_mut((n, n), (n, n)).copy_from(&d.data);
        Self { data }
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max entrywise |A - A†|.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// (A + A†) / 2
    pub fn hermitian_part(&self) -> Self {
        Self {
            data: (&self.data + self.data.adjoint()) * c64(0.5, 0.0),
        }
    }

    /// Max entrywise |U†U - I|.
    pub fn unitarity_defect(&self) -> f64 {
        let gram = Self {
            data: self.data.adjoint() * &self.data,
        };
        gram.max_abs_diff(&Self::identity(self.dim()))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        let gram = self.data.adjoint() * &self.data;
        let eig = gram.symmetric_eigen();
        eig.eigenvalues.iter().copied().fold(0.0, f64::max).max(0.0).sqrt()
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.data[idx]
    }
}

impl<'a> Mul<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &'a CMatrix) -> CMatrix {
        CMatrix {
            data: &self.data * &rhs.data,
        }
    }
}

impl<'a> Add<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &'a CMatrix) -> CMatrix {
        CMatrix {
            data: &self.data + &rhs.data,
        }
    }
}

impl<'a> Sub<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &'a CMatrix) -> CMatrix {
        CMatrix {
            data: &self.data - &rhs.data,
        }
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CMatrix{}", self)
    }
}

impl fmt::Display for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prec = f.precision().unwrap_or(5);
        writeln!(f, "[")?;
        for i in 0..self.dim() {
            write!(f, "  ")?;
            for j in 0..self.dim() {
                let z = self.data[(i, j)];
                let sign = if z.im < 0.0 { '-' } else { '+' };
                write!(f, "{:>w$.prec$} {sign} {:.prec$}i", z.re, z.im.abs(), w = prec + 4)?;
                if j + 1 < self.dim() {
                    write!(f, ",  ")?;
                }
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}
