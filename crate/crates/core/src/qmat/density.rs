use num_complex::Complex64;

use super::matrix::CMatrix;
use super::spectral::min_eigenvalue;
use crate::error::{Error, Result};

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;

/// A density matrix, or an unnormalized post-selection branch of one.
///
/// Construction validates Hermiticity, positivity and the trace bounds, so a
/// `DensityState` in hand always satisfies them. The trace is cached.
#[derive(Clone, Debug)]
pub struct DensityState {
    mat: CMatrix,
    trace_value: f64,
    normalized: bool,
}

impl DensityState {
    /// A state with unit trace.
    pub fn normalized(mat: CMatrix) -> Result<Self> {
        let trace_value = validate(&mat)?;
        if (trace_value - 1.0).abs() > TRACE_TOL {
            return Err(Error::NotNormalized { trace: trace_value });
        }
        Ok(Self {
            mat,
            trace_value,
            normalized: true,
        })
    }

    /// An unnormalized branch with `0 <= trace <= 1`.
    pub fn branch(mat: CMatrix) -> Result<Self> {
        let trace_value = validate(&mat)?;
        Ok(Self {
            mat,
            trace_value,
            normalized: false,
        })
    }

    /// `|v><v|` for a unit vector `v`.
    pub fn pure(amplitudes: &[Complex64]) -> Result<Self> {
        Self::normalized(CMatrix::outer(amplitudes))
    }

    /// Computational basis state `|index>` of a `dim`-dimensional space.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim);
        let mut d = vec![0.0; dim];
        d[index] = 1.0;
        Self {
            mat: CMatrix::diag_real(&d),
            trace_value: 1.0,
            normalized: true,
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            mat: CMatrix::identity(dim).scale_real(1.0 / dim as f64),
            trace_value: 1.0,
            normalized: true,
        }
    }

    /// Divide by the trace. Fails with `ZeroTrace` below 1e-12.
    pub fn renormalize(&self) -> Result<Self> {
        if self.trace_value < 1e-12 {
            return Err(Error::ZeroTrace {
                trace: self.trace_value,
            });
        }
        Self::normalized(self.mat.scale_real(1.0 / self.trace_value))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn trace(&self) -> f64 {
        self.trace_value
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.mat.get(row, col)
    }

    /// `Tr(rho · O)` for a Hermitian observable or projector.
    pub fn expectation(&self, op: &CMatrix) -> f64 {
        (self.mat.as_dmatrix() * op.as_dmatrix()).trace().re
    }

    pub(crate) fn from_parts_unchecked(mat: CMatrix, normalized: bool) -> Self {
        let trace_value = mat.trace().re;
        Self {
            mat,
            trace_value,
            normalized,
        }
    }
}

fn validate(mat: &CMatrix) -> Result<f64> {
    let deviation = mat.hermiticity_defect();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let min_eig = min_eigenvalue(mat);
    if min_eig < -PSD_TOL {
        return Err(Error::NotPsd {
            min_eigenvalue: min_eig,
        });
    }
    let trace = mat.trace().re;
    if !(-TRACE_TOL..=1.0 + TRACE_TOL).contains(&trace) {
        return Err(Error::TraceOutOfRange { trace });
    }
    Ok(trace.max(0.0))
}
