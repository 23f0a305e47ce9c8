//! Eigendecomposition-based routines: square roots, fidelity and the
//! physicality projection.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::density::DensityState;
use super::matrix::{c64, CMatrix};
use crate::error::{Error, Result};

/// Eigenvalues in `[-CLAMP_TOL, 0)` are rounding noise and become 0.
pub const CLAMP_TOL: f64 = 1e-10;
/// Below `-NOT_PSD_TOL` an input is rejected as unphysical.
pub const NOT_PSD_TOL: f64 = 1e-8;

/// Eigenvalues below this are treated as outside a state's support when
/// evaluating fidelity.
const SUPPORT_TOL: f64 = 1e-13;

/// Ascending eigenvalues and matching unit eigenvectors (as columns) of the
/// Hermitian part of `m`.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, DMatrix<Complex64>) {
    let h = m.hermitian_part().into_dmatrix();
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(m.dim(), m.dim(), |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    let (values, _) = hermitian_eigen(m);
    values[0]
}

/// `V · diag(f(λ)) · V†`
fn reassemble(values: &[f64], vectors: &DMatrix<Complex64>) -> CMatrix {
    let d = DVector::from_iterator(values.len(), values.iter().map(|&x| c64(x, 0.0)));
    let scaled = vectors * DMatrix::from_diagonal(&d);
    CMatrix::from_dmatrix_unchecked(scaled * vectors.adjoint())
}

/// Principal square root of a Hermitian positive semidefinite matrix.
///
/// Eigenvalues in `[-1e-8, 0)` are clamped to zero; anything more negative
/// is reported as `NotPsd`.
pub fn herm_sqrt(a: &CMatrix) -> Result<CMatrix> {
    let deviation = a.hermiticity_defect();
    if deviation > NOT_PSD_TOL * a.max_abs().max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    let (values, vectors) = hermitian_eigen(a);
    if values[0] < -NOT_PSD_TOL {
        return Err(Error::NotPsd {
            min_eigenvalue: values[0],
        });
    }
    let roots: Vec<f64> = values.iter().map(|&x| x.max(0.0).sqrt()).collect();
    Ok(reassemble(&roots, &vectors))
}

/// Square root of a Hermitian matrix whose negative eigenvalues are known to
/// be rounding artifacts; all of them are clamped.
pub(crate) fn herm_sqrt_clamped(a: &CMatrix) -> CMatrix {
    let (values, vectors) = hermitian_eigen(a);
    let roots: Vec<f64> = values.iter().map(|&x| x.max(0.0).sqrt()).collect();
    reassemble(&roots, &vectors)
}

/// Fidelity `(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2` between normalized
/// states.
///
/// The inner matrix is evaluated on the support of whichever state has the
/// lower rank, so a pure reference reduces exactly to `<phi|sigma|phi>`
/// instead of picking up square roots of rounding noise.
pub fn uhlmann_fidelity(rho: &DensityState, sigma: &DensityState) -> Result<f64> {
    for s in [rho, sigma] {
        if !s.is_normalized() {
            return Err(Error::NotNormalized { trace: s.trace() });
        }
    }
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }

    let support = |m: &CMatrix| {
        let (values, vectors) = hermitian_eigen(m);
        let keep: Vec<usize> = (0..values.len())
            .filter(|&k| values[k] > SUPPORT_TOL)
            .collect();
        (values, vectors, keep)
    };
    let (rv, rvec, rkeep) = support(rho.matrix());
    let (sv, svec, skeep) = support(sigma.matrix());
    let (values, vectors, keep, other) = if skeep.len() < rkeep.len() {
        (sv, svec, skeep, rho.matrix())
    } else {
        (rv, rvec, rkeep, sigma.matrix())
    };
    if keep.is_empty() {
        return Ok(0.0);
    }

    // sqrt(ref) · other · sqrt(ref) restricted to the support of ref.
    let r = keep.len();
    let other = other.as_dmatrix();
    let inner = DMatrix::from_fn(r, r, |i, j| {
        let vi = vectors.column(keep[i]);
        let vj = vectors.column(keep[j]);
        let elem = (vi.adjoint() * other * vj)[(0, 0)];
        elem * (values[keep[i]] * values[keep[j]]).sqrt()
    });
    let (inner_values, _) = hermitian_eigen(&CMatrix::from_dmatrix_unchecked(inner));
    if inner_values[0] < -NOT_PSD_TOL {
        return Err(Error::NotPsd {
            min_eigenvalue: inner_values[0],
        });
    }
    let root_trace: f64 = inner_values.iter().map(|&x| x.max(0.0).sqrt()).sum();
    Ok((root_trace * root_trace).clamp(0.0, 1.0))
}

/// Euclidean projection of `v` onto the probability simplex
/// `{x : x_i >= 0, sum x_i = 1}`.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut shift = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - 1.0) / (k + 1) as f64;
        if u - candidate > 0.0 {
            shift = candidate;
        }
    }
    v.iter().map(|&x| (x - shift).max(0.0)).collect()
}

/// Closest physical density matrix: Hermitize, then project the spectrum
/// onto the probability simplex while keeping the eigenbasis.
pub fn nearest_physical(a: &CMatrix) -> DensityState {
    let (values, vectors) = hermitian_eigen(a);
    let projected = project_simplex(&values);
    let mat = reassemble(&projected, &vectors).hermitian_part();
    DensityState::from_parts_unchecked(mat, true)
}
