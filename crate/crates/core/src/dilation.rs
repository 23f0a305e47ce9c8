//! Sz-Nagy dilation: embed a contraction `K` as the top-left block of a
//! unitary on one extra qubit,
//!
//! ```text
//! U = [[ K,               sqrt(I - K K†) ],
//!      [ sqrt(I - K† K),  -K†            ]]
//! ```
//!
//! The extra qubit is the most significant factor, so post-selecting it on
//! `|0>` applies `K` to the system.

use num_complex::Complex64;
use serde::Serialize;

use crate::channels::{mr_operator, wm_operator};
use crate::error::{Error, Result};
use crate::qmat::{c64, herm_sqrt_clamped, CMatrix, DensityState};

pub const CONTRACTION_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct DilationUnitary {
    u: CMatrix,
    k_dim: usize,
}

impl DilationUnitary {
    pub fn matrix(&self) -> &CMatrix {
        &self.u
    }

    pub fn k_dim(&self) -> usize {
        self.k_dim
    }

    /// Top-left `k_dim x k_dim` block.
    pub fn contraction(&self) -> CMatrix {
        self.u.block(0, 0, self.k_dim)
    }
}

pub fn snd_unitary(k: &CMatrix) -> Result<DilationUnitary> {
    let norm = k.spectral_norm();
    if norm > 1.0 + CONTRACTION_TOL {
        return Err(Error::NotContraction { norm });
    }
    let n = k.dim();
    let id = CMatrix::identity(n);
    let kd = k.adjoint();
    let left_defect = herm_sqrt_clamped(&(&id - &(k * &kd)));
    let right_defect = herm_sqrt_clamped(&(&id - &(&kd * k)));
    Ok(DilationUnitary {
        u: CMatrix::from_blocks(k, &left_defect, &right_defect, &kd.scale_real(-1.0)),
        k_dim: n,
    })
}

/// Applies the dilation of `k` to `|0><0| ⊗ rho_sys` and returns the
/// unnormalized success (`K rho K†`) and complement branches.
pub fn run_dilated(rho_sys: &DensityState, k: &CMatrix) -> Result<[DensityState; 2]> {
    if k.dim() != rho_sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho_sys.dim(),
            found: k.dim(),
        });
    }
    let dil = snd_unitary(k)?;
    let n = k.dim();
    let ancilla = CMatrix::diag_real(&[1.0, 0.0]);
    let out = dil.matrix().conjugate(&ancilla.kron(rho_sys.matrix()));
    Ok([
        DensityState::branch(out.block(0, 0, n))?,
        DensityState::branch(out.block(n, n, n))?,
    ])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FilterKind {
    WeakMeasurement,
    Reversal,
}

impl FilterKind {
    pub fn operator(self, strength: f64) -> Result<CMatrix> {
        match self {
            FilterKind::WeakMeasurement => wm_operator(strength),
            FilterKind::Reversal => mr_operator(strength),
        }
    }

    /// Control state of the controlled rotation: 1 for the weak measurement,
    /// 0 for the reversal.
    pub fn control_state(self) -> u8 {
        match self {
            FilterKind::WeakMeasurement => 1,
            FilterKind::Reversal => 0,
        }
    }
}

/// Wire 0 is the ancilla (the dilation's block index), wire 1 the system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ZPlacement {
    Ancilla,
    System,
}

impl ZPlacement {
    pub fn wire(self) -> usize {
        match self {
            ZPlacement::Ancilla => 0,
            ZPlacement::System => 1,
        }
    }
}

/// Two-wire gates. Rotations follow `R_a(angle) = exp(-i angle A / 2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum DilationGate {
    RotZ {
        angle: f64,
        wire: usize,
    },
    ControlledRotY {
        angle: f64,
        control: usize,
        control_state: u8,
        target: usize,
    },
}

pub fn rot_y(angle: f64) -> CMatrix {
    let (s, c) = (angle / 2.0).sin_cos();
    CMatrix::from_real_rows(&[vec![c, -s], vec![s, c]]).expect("2x2")
}

pub fn rot_z(angle: f64) -> CMatrix {
    CMatrix::diag(&[
        Complex64::from_polar(1.0, -angle / 2.0),
        Complex64::from_polar(1.0, angle / 2.0),
    ])
}

fn on_wire(op: &CMatrix, wire: usize) -> CMatrix {
    let id = CMatrix::identity(2);
    if wire == 0 {
        op.kron(&id)
    } else {
        id.kron(op)
    }
}

impl DilationGate {
    /// 4x4 matrix on (ancilla, system), ancilla most significant.
    pub fn matrix(&self) -> CMatrix {
        match *self {
            DilationGate::RotZ { angle, wire } => on_wire(&rot_z(angle), wire),
            DilationGate::ControlledRotY {
                angle,
                control,
                control_state,
                target,
            } => {
                assert_ne!(control, target);
                let mut proj = [0.0, 0.0];
                proj[control_state as usize] = 1.0;
                let active = CMatrix::diag_real(&proj);
                let idle = &CMatrix::identity(2) - &active;
                let r = rot_y(angle);
                let id = CMatrix::identity(2);
                if control == 0 {
                    &active.kron(&r) + &idle.kron(&id)
                } else {
                    &r.kron(&active) + &id.kron(&idle)
                }
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PlacementCheck {
    pub placement: ZPlacement,
    /// Max entrywise `|block - phase K|` after fitting one global phase.
    pub success_block_residual: f64,
    pub passes: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GateSequence {
    pub kind: FilterKind,
    pub strength: f64,
    /// `asin(sqrt(strength))`
    pub theta: f64,
    /// Gates in written order; the product applies the last one first.
    pub gates: Vec<DilationGate>,
    pub checks: Vec<PlacementCheck>,
    pub accepted: Option<ZPlacement>,
    pub max_residual: f64,
}

impl GateSequence {
    pub fn passes(&self) -> bool {
        self.accepted.is_some()
    }
}

pub const SEQUENCE_TOL: f64 = 1e-12;

fn sequence_for(kind: FilterKind, theta: f64, z_wire: usize) -> Vec<DilationGate> {
    vec![
        DilationGate::RotZ {
            angle: std::f64::consts::FRAC_PI_2,
            wire: z_wire,
        },
        DilationGate::ControlledRotY {
            angle: 2.0 * theta,
            control: 1,
            control_state: kind.control_state(),
            target: 0,
        },
    ]
}

pub fn sequence_product(gates: &[DilationGate]) -> CMatrix {
    gates
        .iter()
        .fold(CMatrix::identity(4), |acc, g| &acc * &g.matrix())
}

/// Distance between `block` and `target` after fitting one global phase.
pub fn residual_up_to_phase(block: &CMatrix, target: &CMatrix) -> f64 {
    let (mut best, mut pivot) = (0.0, (0, 0));
    for i in 0..target.dim() {
        for j in 0..target.dim() {
            if target.get(i, j).norm() > best {
                best = target.get(i, j).norm();
                pivot = (i, j);
            }
        }
    }
    if best == 0.0 {
        return block.max_abs();
    }
    let ratio = block.get(pivot.0, pivot.1) / target.get(pivot.0, pivot.1);
    let phase = if ratio.norm() > 0.0 {
        ratio / ratio.norm()
    } else {
        c64(1.0, 0.0)
    };
    block.max_abs_diff(&target.scale(phase))
}

/// Two-gate realization of the weak-measurement or reversal dilation: a
/// `pi/2` z-rotation and a y-rotation by `2 asin(sqrt(strength))` on the
/// ancilla, controlled by the system.
///
/// The z-rotation's wire is not fixed by the source decomposition, so both
/// placements are checked against the success-block contract and the
/// passing one is reported.
pub fn gate_sequence(kind: FilterKind, strength: f64) -> Result<GateSequence> {
    if strength == 1.0 {
        return Err(Error::DegenerateStrength { alpha: strength });
    }
    let k = kind.operator(strength)?;
    let theta = strength.sqrt().asin();

    let mut checks = Vec::new();
    for placement in [ZPlacement::Ancilla, ZPlacement::System] {
        let product = sequence_product(&sequence_for(kind, theta, placement.wire()));
        let residual = residual_up_to_phase(&product.block(0, 0, 2), &k);
        checks.push(PlacementCheck {
            placement,
            success_block_residual: residual,
            passes: residual <= SEQUENCE_TOL,
        });
    }
    let accepted = checks.iter().find(|c| c.passes).map(|c| c.placement);
    let chosen = accepted.unwrap_or(ZPlacement::Ancilla);
    let max_residual = checks
        .iter()
        .find(|c| c.placement == chosen)
        .map(|c| c.success_block_residual)
        .unwrap_or(f64::INFINITY);
    Ok(GateSequence {
        kind,
        strength,
        theta,
        gates: sequence_for(kind, theta, chosen.wire()),
        checks,
        accepted,
        max_residual,
    })
}
