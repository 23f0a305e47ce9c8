//! Four-qubit protection circuit: weak measurement, damping and reversal
//! gadgets sharing one system qubit.
//!
//! Wires are `C1` (reversal ancilla), `C2` (weak-measurement ancilla), `C3`
//! (system) and `C4` (damping ancilla), in that order of significance:
//! basis index `8 b(C1) + 4 b(C2) + 2 b(C3) + b(C4)`.

mod readout;

pub use readout::{
    coherence, read_pulse, readout_reconstruct, readout_signals, rotate_wire, tomo_settings,
    Calibration, ReadoutSignals,
};

use serde::Serialize;

use crate::duality::{build_gadget, DualityGadget, GadgetKind};
use crate::error::{Error, Result};
use crate::qmat::{kron_all, CMatrix, DensityState};

pub const N_WIRES: usize = 4;
pub const DIM: usize = 1 << N_WIRES;

pub const WIRE_MR: usize = 0;
pub const WIRE_WM: usize = 1;
pub const WIRE_SYSTEM: usize = 2;
pub const WIRE_AD: usize = 3;

pub const GATE_UNITARITY_TOL: f64 = 1e-12;

/// Bit of `wire` in a basis index.
pub fn wire_bit(index: usize, wire: usize) -> usize {
    (index >> (N_WIRES - 1 - wire)) & 1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Control {
    pub wire: usize,
    /// Basis state of the control wire that activates the gate.
    pub polarity: u8,
}

/// A single-qubit unitary on `target`, optionally controlled by one wire.
#[derive(Clone, Debug)]
pub struct GateOp {
    label: String,
    unitary: CMatrix,
    target: usize,
    control: Option<Control>,
}

impl GateOp {
    pub fn new(
        label: impl Into<String>,
        unitary: CMatrix,
        target: usize,
        control: Option<Control>,
    ) -> Result<Self> {
        if unitary.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: unitary.dim(),
            });
        }
        let residual = unitary.unitarity_defect();
        if residual > GATE_UNITARITY_TOL {
            return Err(Error::NotUnitary { residual });
        }
        for wire in std::iter::once(target).chain(control.map(|c| c.wire)) {
            if wire >= N_WIRES {
                return Err(Error::WireIndex {
                    wire,
                    wires: N_WIRES,
                });
            }
        }
        if let Some(c) = control {
            if c.wire == target {
                return Err(Error::Config(format!(
                    "gate {}: control and target are both wire {target}",
                    label.into()
                )));
            }
            if c.polarity > 1 {
                return Err(Error::Config("control polarity must be 0 or 1".into()));
            }
        }
        Ok(Self {
            label: label.into(),
            unitary,
            target,
            control,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn unitary(&self) -> &CMatrix {
        &self.unitary
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn control(&self) -> Option<Control> {
        self.control
    }

    /// The gate as a 16x16 register operator.
    pub fn register_matrix(&self) -> CMatrix {
        let id = CMatrix::identity(2);
        let layer = |target_op: &CMatrix, ctrl: Option<(usize, &CMatrix)>| {
            let factors: Vec<&CMatrix> = (0..N_WIRES)
                .map(|w| {
                    if w == self.target {
                        target_op
                    } else if let Some((_, proj)) = ctrl.filter(|(cw, _)| *cw == w) {
                        proj
                    } else {
                        &id
                    }
                })
                .collect();
            kron_all(&factors)
        };
        match self.control {
            None => layer(&self.unitary, None),
            Some(c) => {
                let mut on = [0.0, 0.0];
                on[c.polarity as usize] = 1.0;
                let active = CMatrix::diag_real(&on);
                let idle = &id - &active;
                let fired = layer(&self.unitary, Some((c.wire, &active)));
                let skipped = layer(&id, Some((c.wire, &idle)));
                &fired + &skipped
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CircuitParams {
    pub w: f64,
    pub p: f64,
    pub wr: f64,
}

#[derive(Clone, Debug)]
pub struct ProtectionCircuit {
    gates: Vec<GateOp>,
    params: CircuitParams,
}

fn strength_gadget(kind: GadgetKind, strength: f64, name: &'static str) -> Result<Option<DualityGadget>> {
    if strength == 0.0 {
        return Ok(None);
    }
    if strength == 1.0 {
        return Err(Error::DegenerateStrength { alpha: strength });
    }
    if !(0.0..1.0).contains(&strength) {
        return Err(Error::range(name, strength, "[0, 1)"));
    }
    build_gadget(kind, strength).map(Some)
}

fn gadget_gates(g: &DualityGadget, ancilla: usize) -> Result<Vec<GateOp>> {
    let tag = g.kind().name();
    let mut gates = vec![
        GateOp::new(format!("V_{tag}"), g.v().clone(), ancilla, None)?,
        GateOp::new(
            format!("CZ_{tag}"),
            g.unitaries()[1].clone(),
            WIRE_SYSTEM,
            Some(Control {
                wire: ancilla,
                polarity: 1,
            }),
        )?,
        GateOp::new(format!("W_{tag}"), g.w_mat().clone(), ancilla, None)?,
    ];
    if g.post_x() {
        gates.push(GateOp::new(
            format!("CX_{tag}"),
            CMatrix::pauli_x(),
            WIRE_SYSTEM,
            Some(Control {
                wire: ancilla,
                polarity: 1,
            }),
        )?);
    }
    Ok(gates)
}

/// Weak measurement on `C2`, damping on `C4`, reversal on `C1`, each as a
/// duality gadget acting on `C3`. A zero strength drops that block.
pub fn build_protection_circuit(w: f64, p: f64, wr: f64) -> Result<ProtectionCircuit> {
    let blocks = [
        (strength_gadget(GadgetKind::WeakMeasurement, w, "w")?, WIRE_WM),
        (strength_gadget(GadgetKind::Damping, p, "p")?, WIRE_AD),
        (strength_gadget(GadgetKind::Reversal, wr, "wr")?, WIRE_MR),
    ];
    let mut gates = Vec::new();
    for (gadget, ancilla) in blocks {
        if let Some(g) = gadget {
            gates.extend(gadget_gates(&g, ancilla)?);
        }
    }
    Ok(ProtectionCircuit {
        gates,
        params: CircuitParams { w, p, wr },
    })
}

impl ProtectionCircuit {
    pub fn from_gates(gates: Vec<GateOp>, params: CircuitParams) -> Self {
        Self { gates, params }
    }

    pub fn gates(&self) -> &[GateOp] {
        &self.gates
    }

    pub fn params(&self) -> CircuitParams {
        self.params
    }

    /// Product of all gates, first gate acting first.
    pub fn unitary(&self) -> CMatrix {
        self.gates
            .iter()
            .fold(CMatrix::identity(DIM), |acc, g| &g.register_matrix() * &acc)
    }
}

/// `|0><0| ⊗ |0><0| ⊗ rho_sys ⊗ |0><0|`
pub fn initial_register(rho_sys: &DensityState) -> Result<CMatrix> {
    if rho_sys.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: rho_sys.dim(),
        });
    }
    let ground = CMatrix::diag_real(&[1.0, 0.0]);
    Ok(kron_all(&[&ground, &ground, rho_sys.matrix(), &ground]))
}

pub fn run_circuit(c: &ProtectionCircuit, rho_sys: &DensityState) -> Result<DensityState> {
    if !rho_sys.is_normalized() {
        return Err(Error::NotNormalized {
            trace: rho_sys.trace(),
        });
    }
    let mut sigma = initial_register(rho_sys)?;
    for g in &c.gates {
        sigma = g.register_matrix().conjugate(&sigma);
    }
    DensityState::normalized(sigma)
}

/// Protected system state and success probability: trace out `C4`, keep the
/// `C1 = C2 = 0` block.
///
/// With `s` the register matrix, `N = s00 + s11 + s22 + s33` and the state is
/// `[[s00 + s11, s02 + s13], [conj, s22 + s33]] / N`.
pub fn extract_protected(sigma: &DensityState) -> Result<(DensityState, f64)> {
    if sigma.dim() != DIM {
        return Err(Error::DimensionMismatch {
            expected: DIM,
            found: sigma.dim(),
        });
    }
    let s = |i, j| sigma.get(i, j);
    let top = s(0, 0) + s(1, 1);
    let bottom = s(2, 2) + s(3, 3);
    let coherence = s(0, 2) + s(1, 3);
    let n = top.re + bottom.re;
    if n < 1e-12 {
        return Err(Error::ZeroTrace { trace: n });
    }
    let m = CMatrix::from_rows(&[vec![top, coherence], vec![coherence.conj(), bottom]])?;
    Ok((DensityState::normalized(m.scale_real(1.0 / n))?, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{reversal_strength, rho_ad, rho_protect_analytic, PureQubit};
    use crate::qmat::partial_trace;

    #[test]
    fn gate_counts() {
        let c = build_protection_circuit(0.0, 0.5, 0.0).unwrap();
        assert_eq!(c.gates().len(), 4);
        let c = build_protection_circuit(0.1, 0.3935, 0.45415).unwrap();
        assert_eq!(c.gates().len(), 10);
        let labels: Vec<&str> = c.gates().iter().map(|g| g.label()).collect();
        assert_eq!(
            labels,
            ["V_WM", "CZ_WM", "W_WM", "V_AD", "CZ_AD", "W_AD", "CX_AD", "V_MR", "CZ_MR", "W_MR"]
        );
        let ancillas: Vec<usize> = c.gates().iter().filter(|g| g.control().is_none()).map(|g| g.target()).collect();
        assert_eq!(ancillas, [1, 1, 3, 3, 0, 0]);
        assert!(build_protection_circuit(0.0, 0.0, 0.0).unwrap().gates().is_empty());
    }

    #[test]
    fn degenerate_and_out_of_range() {
        assert!(matches!(
            build_protection_circuit(1.0, 0.2, 0.3),
            Err(Error::DegenerateStrength { .. })
        ));
        assert!(matches!(
            build_protection_circuit(0.2, 1.0, 0.3),
            Err(Error::DegenerateStrength { .. })
        ));
        assert!(matches!(
            build_protection_circuit(0.2, 0.3, -0.1),
            Err(Error::Range { .. })
        ));
    }

    #[test]
    fn gates_are_unitary() {
        let c = build_protection_circuit(0.35, 0.6, 0.74).unwrap();
        for g in c.gates() {
            assert!(g.unitary().is_unitary(1e-12), "{}", g.label());
            assert!(g.register_matrix().is_unitary(1e-12), "{}", g.label());
        }
        assert!(c.unitary().is_unitary(1e-12));
    }

    #[test]
    fn gateop_validation() {
        let x = CMatrix::pauli_x();
        assert!(matches!(
            GateOp::new("bad", x.clone(), 4, None),
            Err(Error::WireIndex { .. })
        ));
        assert!(GateOp::new("bad", x.clone(), 1, Some(Control { wire: 1, polarity: 1 })).is_err());
        let nonunitary = CMatrix::diag_real(&[1.0, 0.5]);
        assert!(matches!(
            GateOp::new("bad", nonunitary, 0, None),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn controlled_gate_embedding() {
        // C4-controlled X on C3 maps |0011> to |0001>.
        let g = GateOp::new("cx", CMatrix::pauli_x(), WIRE_SYSTEM, Some(Control { wire: WIRE_AD, polarity: 1 })).unwrap();
        let m = g.register_matrix();
        assert_eq!(m.get(0b0001, 0b0011).re, 1.0);
        assert_eq!(m.get(0b0000, 0b0000).re, 1.0);
        assert_eq!(m.get(0b0010, 0b0010).re, 1.0);
        let g0 = GateOp::new("c0x", CMatrix::pauli_x(), WIRE_SYSTEM, Some(Control { wire: WIRE_MR, polarity: 0 })).unwrap();
        assert_eq!(g0.register_matrix().get(0b0010, 0b0000).re, 1.0);
        assert_eq!(g0.register_matrix().get(0b1000, 0b1000).re, 1.0);
    }

    #[test]
    fn identity_circuit_leaves_input() {
        let rho = PureQubit::new(1.0, 0.3).unwrap().density();
        let c = build_protection_circuit(0.0, 0.0, 0.0).unwrap();
        let sigma = run_circuit(&c, &rho).unwrap();
        assert!(sigma.matrix().max_abs_diff(&initial_register(&rho).unwrap()) < 1e-15);
    }

    #[test]
    fn damping_only_matches_closed_form() {
        let rho = PureQubit::new(2.0, 1.3).unwrap().density();
        for p in [0.1, 0.5, 0.95] {
            let c = build_protection_circuit(0.0, p, 0.0).unwrap();
            let sigma = run_circuit(&c, &rho).unwrap();
            let sys = partial_trace(&sigma, &[WIRE_SYSTEM], &[2; 4]).unwrap();
            let expect = rho_ad(&rho, p).unwrap();
            assert!(sys.matrix().max_abs_diff(expect.matrix()) < 1e-12);
            let (ex, n) = extract_protected(&sigma).unwrap();
            assert!((n - 1.0).abs() < 1e-12);
            assert!(ex.matrix().max_abs_diff(expect.matrix()) < 1e-12);
        }
    }

    #[test]
    fn full_circuit_matches_closed_form() {
        let rho = PureQubit::phi2().density();
        let p = 1.0 - (-2.5f64).exp();
        let wr = reversal_strength(0.1, p).unwrap();
        let c = build_protection_circuit(0.1, p, wr).unwrap();
        let sigma = run_circuit(&c, &rho).unwrap();
        assert!((sigma.trace() - 1.0).abs() < 1e-12);
        let (got, n) = extract_protected(&sigma).unwrap();
        let (expect, n_expect) = rho_protect_analytic(&rho, 0.1, p, wr).unwrap();
        assert!(got.matrix().max_abs_diff(expect.matrix()) < 1e-10);
        assert!((n - n_expect).abs() < 1e-10);
    }

    #[test]
    fn extraction_agrees_with_partial_trace_route() {
        let rho = PureQubit::new(0.7, 4.0).unwrap().density();
        let c = build_protection_circuit(0.3, 0.45, reversal_strength(0.3, 0.45).unwrap()).unwrap();
        let sigma = run_circuit(&c, &rho).unwrap();
        // trace out C4, then keep the C1 = C2 = 0 block of the 8x8 result
        let reduced = partial_trace(&sigma, &[0, 1, 2], &[2; 4]).unwrap();
        let block = reduced.matrix().block(0, 0, 2);
        let n = block.trace().re;
        let (got, n_got) = extract_protected(&sigma).unwrap();
        assert!((n - n_got).abs() < 1e-14);
        assert!(got.matrix().max_abs_diff(&block.scale_real(1.0 / n)) < 1e-14);
    }

    #[test]
    fn extraction_edge_cases() {
        let (rho, n) = extract_protected(&DensityState::basis(DIM, 0)).unwrap();
        assert!(rho.matrix().max_abs_diff(DensityState::basis(2, 0).matrix()) < 1e-15);
        assert_eq!(n, 1.0);
        let err = extract_protected(&DensityState::basis(DIM, 0b0100));
        assert!(matches!(err, Err(Error::ZeroTrace { .. })));
    }

    #[test]
    fn extraction_ignores_c4_unitaries() {
        let rho = PureQubit::new(1.9, 0.2).unwrap().density();
        let c = build_protection_circuit(0.2, 0.7, reversal_strength(0.2, 0.7).unwrap()).unwrap();
        let sigma = run_circuit(&c, &rho).unwrap();
        let u = crate::dilation::rot_y(0.83);
        let g = GateOp::new("u4", &u * &crate::dilation::rot_z(1.7), WIRE_AD, None).unwrap();
        let rotated = DensityState::normalized(g.register_matrix().conjugate(sigma.matrix())).unwrap();
        let (a, na) = extract_protected(&sigma).unwrap();
        let (b, nb) = extract_protected(&rotated).unwrap();
        assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-12);
        assert!((na - nb).abs() < 1e-12);
    }
}
