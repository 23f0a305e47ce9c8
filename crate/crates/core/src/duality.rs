//! One-ancilla duality-algorithm gadgets for the weak measurement, the
//! reversal and amplitude damping.
//!
//! A gadget prepares the ancilla with `V`, applies `U_j` to the system when
//! the ancilla is in `|j>` (`U_0 = I`, `U_1 = Z`), then mixes the ancilla with
//! `W`. Post-selecting the ancilla on `|m>` leaves the system acted on by
//!
//! ```text
//! M_m = sum_j W[m, j] V[j, 0] U_j
//! ```
//!
//! The damping gadget additionally applies an ancilla-controlled `X` to the
//! system so that branch 1 is the decay operator `E1` rather than its
//! diagonal part.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmat::{CMatrix, DensityState, ONE, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GadgetKind {
    /// Weak measurement, strength `w`.
    WeakMeasurement,
    /// Measurement reversal, strength `wr`.
    Reversal,
    /// Amplitude damping, strength `p`.
    Damping,
}

impl GadgetKind {
    pub fn b_sign(self) -> BSign {
        match self {
            GadgetKind::Reversal => BSign::Negative,
            _ => BSign::Positive,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GadgetKind::WeakMeasurement => "WM",
            GadgetKind::Reversal => "MR",
            GadgetKind::Damping => "AD",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BSign {
    Positive,
    Negative,
}

/// Coefficients of the two-term expansion `a^2 I ± b^2 Z`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UeSplit {
    pub alpha: f64,
    pub a: f64,
    /// Signed; `|b| = sqrt((1 - sqrt(1 - alpha)) / 2)`.
    pub b: f64,
    pub c: f64,
}

impl UeSplit {
    pub fn b_abs(&self) -> f64 {
        self.b.abs()
    }
}

pub fn ue_split(alpha: f64, sign: BSign) -> Result<UeSplit> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::DegenerateStrength { alpha });
    }
    let root = (1.0 - alpha).sqrt();
    let a = ((1.0 + root) / 2.0).sqrt();
    let b_abs = ((1.0 - root) / 2.0).sqrt();
    let b = match sign {
        BSign::Positive => b_abs,
        BSign::Negative => -b_abs,
    };
    Ok(UeSplit {
        alpha,
        a,
        b,
        c: alpha.sqrt() / 2.0,
    })
}

#[derive(Clone, Debug)]
pub struct DualityGadget {
    kind: GadgetKind,
    strength: f64,
    v: CMatrix,
    w_mat: CMatrix,
    unitaries: [CMatrix; 2],
    post_x: bool,
}

/// Residuals of the structural invariants of a gadget.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GadgetCheck {
    pub v_unitarity: f64,
    pub w_unitarity: f64,
    pub completeness: f64,
}

impl GadgetCheck {
    pub fn max(&self) -> f64 {
        self.v_unitarity.max(self.w_unitarity).max(self.completeness)
    }
}

/// Builds the gadget realizing `kind` at `strength`.
///
/// `V`'s first column is `(a, |b|)` and `W = [[a, b], [c/a, -c/b]]` with `b`
/// signed, so the reversal gadget's success branch is `a^2 I - b^2 Z`.
pub fn build_gadget(kind: GadgetKind, strength: f64) -> Result<DualityGadget> {
    let split = ue_split(strength, kind.b_sign())?;
    let (a, b, c) = (split.a, split.b, split.c);
    let b_abs = split.b_abs();
    let v = CMatrix::from_real_rows(&[vec![a, -b_abs], vec![b_abs, a]])?;
    let w_mat = CMatrix::from_real_rows(&[vec![a, b], vec![c / a, -c / b]])?;
    Ok(DualityGadget {
        kind,
        strength,
        v,
        w_mat,
        unitaries: [CMatrix::identity(2), CMatrix::pauli_z()],
        post_x: kind == GadgetKind::Damping,
    })
}

impl DualityGadget {
    /// Assembles a gadget from explicit parts without checking anything.
    /// Used for fault injection; call [`DualityGadget::check`] to inspect it.
    pub fn from_parts(
        kind: GadgetKind,
        strength: f64,
        v: CMatrix,
        w_mat: CMatrix,
        post_x: bool,
    ) -> Self {
        Self {
            kind,
            strength,
            v,
            w_mat,
            unitaries: [CMatrix::identity(2), CMatrix::pauli_z()],
            post_x,
        }
    }

    pub fn kind(&self) -> GadgetKind {
        self.kind
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }

    pub fn v(&self) -> &CMatrix {
        &self.v
    }

    pub fn w_mat(&self) -> &CMatrix {
        &self.w_mat
    }

    pub fn unitaries(&self) -> &[CMatrix; 2] {
        &self.unitaries
    }

    pub fn post_x(&self) -> bool {
        self.post_x
    }

    pub fn check(&self) -> GadgetCheck {
        let sum = (0..2).fold(CMatrix::zeros(2), |acc, m| {
            let op = self.branch_operator(m);
            &acc + &(&op.adjoint() * &op)
        });
        GadgetCheck {
            v_unitarity: self.v.unitarity_defect(),
            w_unitarity: self.w_mat.unitarity_defect(),
            completeness: sum.max_abs_diff(&CMatrix::identity(2)),
        }
    }

    /// `M_m = sum_j W[m, j] V[j, 0] U_j`, times `X` on branch 1 when the
    /// gadget carries the controlled-X correction.
    pub fn branch_operator(&self, m: usize) -> CMatrix {
        assert!(m < 2, "branch index must be 0 or 1");
        let mut op = CMatrix::zeros(2);
        for (j, u) in self.unitaries.iter().enumerate() {
            let coeff = self.w_mat.get(m, j) * self.v.get(j, 0);
            op = &op + &u.scale(coeff);
        }
        if self.post_x && m == 1 {
            op = &CMatrix::pauli_x() * &op;
        }
        op
    }

    /// Full system+ancilla unitary, ancilla as the most significant factor.
    pub fn circuit_unitary(&self) -> CMatrix {
        let id = CMatrix::identity(2);
        let p0 = CMatrix::diag_real(&[1.0, 0.0]);
        let p1 = CMatrix::diag_real(&[0.0, 1.0]);
        let prep = self.v.kron(&id);
        let select = &p0.kron(&self.unitaries[0]) + &p1.kron(&self.unitaries[1]);
        let mix = self.w_mat.kron(&id);
        let mut u = &mix * &(&select * &prep);
        if self.post_x {
            let cx = &p0.kron(&id) + &p1.kron(&CMatrix::pauli_x());
            u = &cx * &u;
        }
        u
    }
}

/// Runs the gadget on `ancilla |0> ⊗ rho_sys` and returns the unnormalized
/// system states left after post-selecting the ancilla on `|0>` and `|1>`.
pub fn run_gadget(rho_sys: &DensityState, g: &DualityGadget) -> Result<[DensityState; 2]> {
    if rho_sys.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: rho_sys.dim(),
        });
    }
    let ancilla = CMatrix::from_row_slice(2, &[ONE, ZERO, ZERO, ZERO])?;
    let joint = ancilla.kron(rho_sys.matrix());
    let out = g.circuit_unitary().conjugate(&joint);
    let tau0 = DensityState::branch(out.block(0, 0, 2))?;
    let tau1 = DensityState::branch(out.block(2, 2, 2))?;
    Ok([tau0, tau1])
}

/// Real diagonal of a (diagonal) branch operator.
pub fn diagonal(op: &CMatrix) -> [f64; 2] {
    [op.get(0, 0).re, op.get(1, 1).re]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{ad_kraus, apply_kraus, mr_operator, rho_ad, wm_operator, PureQubit};

    const GRID: [f64; 11] = [0.01, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99];
    const KINDS: [GadgetKind; 3] = [
        GadgetKind::WeakMeasurement,
        GadgetKind::Reversal,
        GadgetKind::Damping,
    ];

    #[test]
    fn split_examples() {
        let s = ue_split(0.1, BSign::Positive).unwrap();
        assert!((s.a - 0.98709).abs() < 5e-6);
        assert!((s.b - 0.16018).abs() < 5e-6);
        assert!((s.c - 0.15811).abs() < 5e-6);
        assert!((ue_split(0.75, BSign::Positive).unwrap().c - 0.43301).abs() < 5e-6);
        assert!(ue_split(0.3, BSign::Negative).unwrap().b < 0.0);
    }

    #[test]
    fn split_identities() {
        for alpha in GRID {
            let s = ue_split(alpha, BSign::Negative).unwrap();
            assert!((s.a * s.a - s.b * s.b - (1.0 - alpha).sqrt()).abs() < 1e-14);
            assert!((s.a * s.a + s.b * s.b - 1.0).abs() < 1e-14);
            assert!((s.a * s.b_abs() - s.c).abs() < 1e-14);
        }
    }

    #[test]
    fn degenerate_strengths_rejected() {
        for alpha in [0.0, 1.0, -0.2, 1.5, f64::NAN] {
            assert!(matches!(
                ue_split(alpha, BSign::Positive),
                Err(Error::DegenerateStrength { .. })
            ));
        }
        assert!(build_gadget(GadgetKind::Damping, 1.0).is_err());
    }

    #[test]
    fn wm_branches() {
        let g = build_gadget(GadgetKind::WeakMeasurement, 0.1).unwrap();
        let m0 = g.branch_operator(0);
        let m1 = g.branch_operator(1);
        assert!(m0.max_abs_diff(&wm_operator(0.1).unwrap()) < 1e-15);
        // c (I - Z) = diag(0, sqrt(w))
        assert!(m1.max_abs_diff(&CMatrix::diag_real(&[0.0, 0.1f64.sqrt()])) < 1e-15);
        let d = diagonal(&m0);
        assert!((d[1] - 0.94868).abs() < 5e-6);
        assert!((diagonal(&m1)[1] - 0.31623).abs() < 5e-6);
    }

    #[test]
    fn mr_branches() {
        let g = build_gadget(GadgetKind::Reversal, 0.5).unwrap();
        assert!(g.branch_operator(0).max_abs_diff(&mr_operator(0.5).unwrap()) < 1e-15);
        assert!((g.branch_operator(0).get(0, 0).re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        let expect = CMatrix::diag_real(&[0.5f64.sqrt(), 0.0]);
        assert!(g.branch_operator(1).max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn ad_branches_are_the_kraus_pair() {
        let g = build_gadget(GadgetKind::Damping, 0.3935).unwrap();
        assert!(g.post_x());
        let [e0, e1] = ad_kraus(0.3935).unwrap();
        assert!(g.branch_operator(0).max_abs_diff(&e0) < 1e-15);
        assert!(g.branch_operator(1).max_abs_diff(&e1) < 1e-15);
        assert!((g.branch_operator(0).get(1, 1).re - 0.778781).abs() < 1e-6);
        assert!((g.branch_operator(1).get(0, 1).re - 0.62730).abs() < 5e-6);
    }

    #[test]
    fn unitarity_and_completeness_on_grid() {
        for kind in KINDS {
            for s in GRID {
                let chk = build_gadget(kind, s).unwrap().check();
                assert!(chk.max() < 1e-12, "{kind:?} {s}: {chk:?}");
            }
        }
    }

    #[test]
    fn circuit_unitary_is_unitary() {
        for kind in KINDS {
            let u = build_gadget(kind, 0.37).unwrap().circuit_unitary();
            assert!(u.unitarity_defect() < 1e-14);
        }
    }

    #[test]
    fn run_examples() {
        let ground = DensityState::basis(2, 0);
        let g = build_gadget(GadgetKind::WeakMeasurement, 0.4).unwrap();
        let [t0, t1] = run_gadget(&ground, &g).unwrap();
        assert!(t0.matrix().max_abs_diff(ground.matrix()) < 1e-15);
        assert!(t1.trace().abs() < 1e-15);

        // strength 1 is degenerate for the gadget; approach it instead
        let g = build_gadget(GadgetKind::Damping, 1.0 - 1e-15).unwrap();
        let [t0, t1] = run_gadget(&DensityState::basis(2, 1), &g).unwrap();
        assert!(t0.trace() < 1e-14);
        assert!(t1.matrix().max_abs_diff(ground.matrix()) < 1e-14);

        let g = build_gadget(GadgetKind::WeakMeasurement, 0.1).unwrap();
        let [t0, _] = run_gadget(&PureQubit::phi2().density(), &g).unwrap();
        assert!((t0.trace() - 0.95).abs() < 1e-15);
    }

    #[test]
    fn branches_match_kraus_action() {
        let rho = PureQubit::new(1.2, 0.9).unwrap().density();
        for kind in KINDS {
            for s in GRID {
                let g = build_gadget(kind, s).unwrap();
                let [t0, t1] = run_gadget(&rho, &g).unwrap();
                assert!((t0.trace() + t1.trace() - 1.0).abs() < 1e-12);
                for (m, t) in [(0, &t0), (1, &t1)] {
                    let direct = g.branch_operator(m).conjugate(rho.matrix());
                    assert!(t.matrix().max_abs_diff(&direct) < 1e-12);
                }
                match kind {
                    GadgetKind::Damping => {
                        let sum = t0.matrix() + t1.matrix();
                        assert!(sum.max_abs_diff(rho_ad(&rho, s).unwrap().matrix()) < 1e-12);
                    }
                    GadgetKind::WeakMeasurement => {
                        let k = wm_operator(s).unwrap();
                        let expect = apply_kraus(&rho, &[k], true).unwrap();
                        let got = t0.renormalize().unwrap();
                        assert!(got.matrix().max_abs_diff(expect.matrix()) < 1e-12);
                        let r = rho.get(0, 0).re + (1.0 - s) * rho.get(1, 1).re;
                        assert!((t0.trace() - r).abs() < 1e-14);
                    }
                    GadgetKind::Reversal => {
                        let k = mr_operator(s).unwrap();
                        let expect = apply_kraus(&rho, &[k], true).unwrap();
                        let got = t0.renormalize().unwrap();
                        assert!(got.matrix().max_abs_diff(expect.matrix()) < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn flipped_w_breaks_completeness() {
        let g = build_gadget(GadgetKind::WeakMeasurement, 0.3).unwrap();
        let w = g.w_mat();
        let bad_w = CMatrix::from_rows(&[
            vec![w.get(0, 0), w.get(0, 1)],
            vec![w.get(1, 0), -w.get(1, 1)],
        ])
        .unwrap();
        let bad = DualityGadget::from_parts(g.kind(), g.strength(), g.v().clone(), bad_w, false);
        assert!(bad.check().completeness > 0.1);
    }
}
