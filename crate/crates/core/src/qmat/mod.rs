//! Dense complex linear algebra for small qubit registers.

mod density;
mod matrix;
mod spectral;

pub use density::{DensityState, HERMITIAN_TOL, PSD_TOL, TRACE_TOL};
pub use matrix::{c64, CMatrix, I, ONE, ZERO};
pub use spectral::{
    hermitian_eigen, herm_sqrt, min_eigenvalue, nearest_physical, project_simplex,
    uhlmann_fidelity, CLAMP_TOL, NOT_PSD_TOL,
};
pub(crate) use spectral::herm_sqrt_clamped;

use crate::error::{Error, Result};

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kron(b)
}

/// Kronecker product of a list of factors, first factor most significant.
pub fn kron_all(factors: &[&CMatrix]) -> CMatrix {
    let (first, rest) = factors.split_first().expect("at least one factor");
    rest.iter().fold((*first).clone(), |acc, f| acc.kron(f))
}

/// Reduced state on the wires in `keep`.
///
/// Wire 0 is the most significant tensor factor. `keep` is treated as a set;
/// the kept wires appear in ascending order in the result. Keeping no wires
/// yields the 1x1 matrix holding the trace.
pub fn partial_trace(
    sigma: &DensityState,
    keep: &[usize],
    wire_dims: &[usize],
) -> Result<DensityState> {
    let total: usize = wire_dims.iter().product();
    if total != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: sigma.dim(),
            found: total,
        });
    }
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if let Some(&bad) = keep.iter().find(|&&w| w >= wire_dims.len()) {
        return Err(Error::WireIndex {
            wire: bad,
            wires: wire_dims.len(),
        });
    }

    let n = wire_dims.len();
    let mut strides = vec![1usize; n];
    for w in (0..n.saturating_sub(1)).rev() {
        strides[w] = strides[w + 1] * wire_dims[w + 1];
    }
    let kept = |w: usize| keep.binary_search(&w).is_ok();
    let digits = |index: usize| -> Vec<usize> {
        (0..n).map(|w| (index / strides[w]) % wire_dims[w]).collect()
    };
    let project = |d: &[usize], want_kept: bool| -> usize {
        (0..n)
            .filter(|&w| kept(w) == want_kept)
            .fold(0, |acc, w| acc * wire_dims[w] + d[w])
    };

    let out_dim: usize = keep.iter().map(|&w| wire_dims[w]).product();
    let mut out = nalgebra::DMatrix::zeros(out_dim, out_dim);
    let all_digits: Vec<Vec<usize>> = (0..total).map(digits).collect();
    for (i, di) in all_digits.iter().enumerate() {
        let ti = project(di, false);
        let ki = project(di, true);
        for (j, dj) in all_digits.iter().enumerate() {
            if project(dj, false) == ti {
                out[(ki, project(dj, true))] += sigma.get(i, j);
            }
        }
    }
    Ok(DensityState::from_parts_unchecked(
        CMatrix::from_dmatrix_unchecked(out),
        sigma.is_normalized(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn bell() -> DensityState {
        let s = c64(FRAC_1_SQRT_2, 0.0);
        DensityState::pure(&[s, ZERO, ZERO, s]).unwrap()
    }

    #[test]
    fn bell_marginals_are_maximally_mixed() {
        let half = CMatrix::identity(2).scale_real(0.5);
        for keep in [0, 1] {
            let r = partial_trace(&bell(), &[keep], &[2, 2]).unwrap();
            assert!(r.matrix().max_abs_diff(&half) < 1e-15);
        }
    }

    #[test]
    fn product_state_factorizes() {
        let a = CMatrix::from_real_rows(&[vec![0.7, 0.2], vec![0.2, 0.3]]).unwrap();
        let b = CMatrix::from_real_rows(&[vec![0.4, 0.1], vec![0.1, 0.6]]).unwrap();
        let ab = DensityState::normalized(kron(&a, &b)).unwrap();
        let ra = partial_trace(&ab, &[0], &[2, 2]).unwrap();
        let rb = partial_trace(&ab, &[1], &[2, 2]).unwrap();
        assert!(ra.matrix().max_abs_diff(&a) < 1e-15);
        assert!(rb.matrix().max_abs_diff(&b) < 1e-15);
    }

    #[test]
    fn trace_everything_and_keep_everything() {
        let r = partial_trace(&bell(), &[], &[2, 2]).unwrap();
        assert_eq!(r.dim(), 1);
        assert!((r.get(0, 0).re - 1.0).abs() < 1e-15);
        let all = partial_trace(&bell(), &[1, 0], &[2, 2]).unwrap();
        assert!(all.matrix().max_abs_diff(bell().matrix()) < 1e-15);
    }

    #[test]
    fn bad_wire_and_dims() {
        assert!(matches!(
            partial_trace(&bell(), &[2], &[2, 2]),
            Err(Error::WireIndex { wire: 2, wires: 2 })
        ));
        assert!(matches!(
            partial_trace(&bell(), &[0], &[2, 4]),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
