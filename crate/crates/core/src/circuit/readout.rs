//! Emulated tomography readout of the protected qubit.
//!
//! Three settings apply a `Y(pi/2)` read pulse to `C1`, `C2` or `C3`. Each
//! peak is the single-quantum coherence of the read qubit for one pattern of
//! the three spectator qubits, and its intensity is the real part of that
//! coherence. The protected block is rebuilt from sums of peaks plus the
//! unrotated `C3` coherence.

use num_complex::Complex64;
use serde::Serialize;

use super::{GateOp, DIM, N_WIRES, WIRE_MR, WIRE_SYSTEM, WIRE_WM};
use crate::dilation::rot_y;
use crate::error::{Error, Result};
use crate::qmat::{nearest_physical, CMatrix, DensityState};

/// `exp(-i pi/4 Y)`
pub fn read_pulse() -> CMatrix {
    rot_y(std::f64::consts::FRAC_PI_2)
}

/// Applies the read pulse to `wire`.
pub fn rotate_wire(sigma: &CMatrix, wire: usize) -> Result<CMatrix> {
    if sigma.dim() != DIM {
        return Err(Error::DimensionMismatch {
            expected: DIM,
            found: sigma.dim(),
        });
    }
    let g = GateOp::new("read", read_pulse(), wire, None)?;
    Ok(g.register_matrix().conjugate(sigma))
}

/// Rotated states for the three settings, read qubit `C1`, `C2`, `C3`.
pub fn tomo_settings(sigma: &DensityState) -> Result<[DensityState; 3]> {
    let rot = |w| DensityState::normalized(rotate_wire(sigma.matrix(), w)?);
    Ok([rot(WIRE_MR)?, rot(WIRE_WM)?, rot(WIRE_SYSTEM)?])
}

/// Basis index with `qubit` set to `bit` and the remaining wires filled from
/// `pattern`, most significant spectator first.
fn compose_index(qubit: usize, bit: usize, pattern: usize) -> usize {
    let mut idx = 0;
    let mut k = N_WIRES - 1;
    for w in 0..N_WIRES {
        let b = if w == qubit {
            bit
        } else {
            k -= 1;
            (pattern >> k) & 1
        };
        idx = (idx << 1) | b;
    }
    idx
}

/// Coherence `<..0..| s |..1..>` of `qubit` at a spectator pattern.
pub fn coherence(sigma: &CMatrix, qubit: usize, pattern: usize) -> Complex64 {
    sigma.get(
        compose_index(qubit, 0, pattern),
        compose_index(qubit, 1, pattern),
    )
}

/// Scale that turns a raw peak into the normalized intensity, fixed by the
/// peak of the ground register.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Calibration {
    pub scale: f64,
}

impl Calibration {
    pub fn from_reference() -> Self {
        let ground = DensityState::basis(DIM, 0);
        let rotated = rotate_wire(ground.matrix(), WIRE_MR).expect("reference register");
        let raw = coherence(&rotated, WIRE_MR, 0).re;
        Self { scale: 0.5 / raw }
    }
}

impl Default for Calibration {
    fn default() -> Self {
        Self::from_reference()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReadoutSignals {
    /// All eight `C1` peaks.
    pub alpha: f64,
    /// The four `C2` peaks with `C1` in `|0>`.
    pub beta: f64,
    /// The two `C3` peaks with `C1 = C2 = 0`.
    pub gamma: f64,
    /// Unrotated `C3` coherence summed over `C4`.
    pub coherence: Complex64,
}

impl ReadoutSignals {
    /// Populations of the protected block before normalization.
    pub fn populations(&self) -> (f64, f64) {
        let common = 1.0 + 2.0 * self.alpha + 4.0 * self.beta;
        ((common + 8.0 * self.gamma) / 8.0, (common - 8.0 * self.gamma) / 8.0)
    }

    pub fn success_probability(&self) -> f64 {
        let (a, b) = self.populations();
        a + b
    }
}

pub fn readout_signals(sigma: &CMatrix, cal: Calibration) -> Result<ReadoutSignals> {
    let s1 = rotate_wire(sigma, WIRE_MR)?;
    let s2 = rotate_wire(sigma, WIRE_WM)?;
    let s3 = rotate_wire(sigma, WIRE_SYSTEM)?;
    let peak = |s: &CMatrix, q, pat| cal.scale * coherence(s, q, pat).re;
    let alpha = (0..8).map(|pat| peak(&s1, WIRE_MR, pat)).sum();
    let beta = (0..4).map(|pat| peak(&s2, WIRE_WM, pat)).sum();
    let gamma = peak(&s3, WIRE_SYSTEM, 0) + peak(&s3, WIRE_SYSTEM, 1);
    let coherence = coherence(sigma, WIRE_SYSTEM, 0) + coherence(sigma, WIRE_SYSTEM, 1);
    Ok(ReadoutSignals {
        alpha,
        beta,
        gamma,
        coherence,
    })
}

/// Protected qubit from the emulated readout, projected onto the nearest
/// density matrix. Accepts non-physical registers such as noisy estimates.
pub fn readout_reconstruct(sigma: &CMatrix) -> Result<DensityState> {
    let sig = readout_signals(sigma, Calibration::from_reference())?;
    let (pa, pb) = sig.populations();
    let n = pa + pb;
    if n.abs() < 1e-12 {
        return Err(Error::ZeroTrace { trace: n });
    }
    let c = sig.coherence;
    let m = CMatrix::from_rows(&[
        vec![Complex64::new(pa, 0.0), c],
        vec![c.conj(), Complex64::new(pb, 0.0)],
    ])?;
    Ok(nearest_physical(&m.scale_real(1.0 / n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{reversal_strength, PureQubit};
    use crate::circuit::{wire_bit, build_protection_circuit, extract_protected, run_circuit};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spectator_bits(index: usize, qubit: usize) -> usize {
        (0..N_WIRES)
            .filter(|&w| w != qubit)
            .fold(0, |acc, w| (acc << 1) | wire_bit(index, w))
    }

    #[test]
    fn index_layout() {
        for q in 0..N_WIRES {
            for pat in 0..8 {
                for bit in 0..2 {
                    let i = compose_index(q, bit, pat);
                    assert_eq!(wire_bit(i, q), bit);
                    assert_eq!(spectator_bits(i, q), pat);
                }
            }
        }
        assert_eq!(compose_index(WIRE_SYSTEM, 0, 1), 1);
        assert_eq!(compose_index(WIRE_SYSTEM, 1, 1), 3);
    }

    #[test]
    fn calibration_is_unity() {
        assert!((Calibration::from_reference().scale - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ground_register_reads_ground() {
        let s = DensityState::basis(DIM, 0);
        let sig = readout_signals(s.matrix(), Calibration::default()).unwrap();
        assert!((sig.alpha - 0.5).abs() < 1e-15);
        assert!((sig.beta - 0.5).abs() < 1e-15);
        assert!((sig.gamma - 0.5).abs() < 1e-15);
        let (a, b) = sig.populations();
        assert!((a - 1.0).abs() < 1e-15 && b.abs() < 1e-15);
    }

    #[test]
    fn readout_matches_extraction() {
        let p = 1.0 - (-0.5f64).exp();
        for (theta, w) in [(std::f64::consts::FRAC_PI_2, 0.1), (1.0, 0.4), (2.9, 0.7)] {
            let rho = PureQubit::new(theta, 0.8).unwrap().density();
            let c = build_protection_circuit(w, p, reversal_strength(w, p).unwrap()).unwrap();
            let sigma = run_circuit(&c, &rho).unwrap();
            let (expect, n) = extract_protected(&sigma).unwrap();
            let sig = readout_signals(sigma.matrix(), Calibration::default()).unwrap();
            assert!((sig.success_probability() - n).abs() < 1e-12);
            let got = readout_reconstruct(sigma.matrix()).unwrap();
            assert!(got.matrix().max_abs_diff(expect.matrix()) < 1e-12);
        }
    }

    #[test]
    fn diagonal_register_coherence() {
        let pops: Vec<f64> = (0..DIM).map(|i| (i + 1) as f64).collect();
        let total: f64 = pops.iter().sum();
        let pops: Vec<f64> = pops.iter().map(|x| x / total).collect();
        let s = CMatrix::diag_real(&pops);
        let s3 = rotate_wire(&s, WIRE_SYSTEM).unwrap();
        for pat in [0, 1] {
            let (i, j) = (compose_index(WIRE_SYSTEM, 0, pat), compose_index(WIRE_SYSTEM, 1, pat));
            let c = coherence(&s3, WIRE_SYSTEM, pat);
            assert!((c.re - (pops[i] - pops[j]) / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn double_pulse_flips_wire() {
        for w in 0..N_WIRES {
            let once = rotate_wire(DensityState::basis(DIM, 0).matrix(), w).unwrap();
            let twice = rotate_wire(&once, w).unwrap();
            let flipped = 1 << (N_WIRES - 1 - w);
            assert!((twice.get(flipped, flipped).re - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn tomo_settings_are_states() {
        let rho = PureQubit::phi2().density();
        let c = build_protection_circuit(0.1, 0.3, 0.5).unwrap();
        let sigma = run_circuit(&c, &rho).unwrap();
        for s in tomo_settings(&sigma).unwrap() {
            assert!(s.is_normalized());
            assert!((s.trace() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn noisy_register_still_physical() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rho = PureQubit::phi3().density();
        let c = build_protection_circuit(0.1, 0.9, reversal_strength(0.1, 0.9).unwrap()).unwrap();
        let sigma = run_circuit(&c, &rho).unwrap();
        for _ in 0..20 {
            let rows: Vec<Vec<Complex64>> = (0..DIM)
                .map(|i| {
                    (0..DIM)
                        .map(|j| {
                            sigma.get(i, j)
                                + Complex64::new(rng.random_range(-0.02..0.02), rng.random_range(-0.02..0.02))
                        })
                        .collect()
                })
                .collect();
            let noisy = CMatrix::from_rows(&rows).unwrap();
            let r = readout_reconstruct(&noisy).unwrap();
            assert!(r.is_normalized());
            assert!(crate::qmat::min_eigenvalue(r.matrix()) > -1e-12);
            assert!(r.matrix().hermiticity_defect() < 1e-14);
        }
    }
}
