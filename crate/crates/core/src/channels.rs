//! Closed-form single-qubit models: amplitude damping, the weak measurement
//! and reversal filters, and the protected-state bookkeeping.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmat::{c64, uhlmann_fidelity, CMatrix, DensityState};

fn check_unit_closed(name: &'static str, x: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(Error::range(name, x, "[0, 1]"))
    }
}

fn check_unit_half_open(name: &'static str, x: f64) -> Result<f64> {
    if (0.0..1.0).contains(&x) {
        Ok(x)
    } else {
        Err(Error::range(name, x, "[0, 1)"))
    }
}

fn require_qubit(rho: &DensityState) -> Result<()> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: rho.dim(),
        });
    }
    if !rho.is_normalized() {
        return Err(Error::NotNormalized { trace: rho.trace() });
    }
    Ok(())
}

/// Damping strength `p`, optionally remembering the `(gamma, t)` it came from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DampingParams {
    pub gamma: Option<f64>,
    pub t: Option<f64>,
    pub p: f64,
}

impl DampingParams {
    /// `p = 1 - exp(-gamma t)`
    pub fn from_rate(gamma: f64, t: f64) -> Result<Self> {
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::range("gamma", gamma, "[0, inf)"));
        }
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::range("t", t, "[0, inf)"));
        }
        Ok(Self {
            gamma: Some(gamma),
            t: Some(t),
            p: -(-gamma * t).exp_m1(),
        })
    }

    pub fn from_strength(p: f64) -> Result<Self> {
        Ok(Self {
            gamma: None,
            t: None,
            p: check_unit_closed("p", p)?,
        })
    }
}

/// Weak-measurement and reversal strengths, both in `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Strengths {
    pub w: f64,
    pub wr: f64,
}

impl Strengths {
    pub fn new(w: f64, wr: f64) -> Result<Self> {
        Ok(Self {
            w: check_unit_half_open("w", w)?,
            wr: check_unit_half_open("wr", wr)?,
        })
    }

    /// `w` together with the reversal strength `reversal_strength(w, p)`.
    pub fn with_reversal(w: f64, p: f64) -> Result<Self> {
        let wr = reversal_strength(w, p)?;
        Self::new(w, wr)
    }
}

/// `cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>`
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PureQubit {
    theta: f64,
    phi: f64,
}

impl PureQubit {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::range("theta", theta, "[0, pi]"));
        }
        if !phi.is_finite() {
            return Err(Error::range("phi", phi, "finite"));
        }
        Ok(Self {
            theta,
            phi: phi.rem_euclid(TAU),
        })
    }

    /// `sqrt(3)/2 |0> + i/2 |1>`
    pub fn phi1() -> Self {
        Self {
            theta: FRAC_PI_3,
            phi: FRAC_PI_2,
        }
    }

    /// `(|0> + i|1>)/sqrt(2)`
    pub fn phi2() -> Self {
        Self {
            theta: FRAC_PI_2,
            phi: FRAC_PI_2,
        }
    }

    /// `|1>`
    pub fn phi3() -> Self {
        Self {
            theta: PI,
            phi: FRAC_PI_2,
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn amplitudes(&self) -> [Complex64; 2] {
        let (s, c) = (self.theta / 2.0).sin_cos();
        [c64(c, 0.0), Complex64::from_polar(s, self.phi)]
    }

    pub fn density(&self) -> DensityState {
        DensityState::pure(&self.amplitudes()).expect("unit vector")
    }

    /// Excited-state population `sin^2(theta/2)`.
    pub fn excited_population(&self) -> f64 {
        (self.theta / 2.0).sin().powi(2)
    }

    /// Ground-state population `cos^2(theta/2)`.
    pub fn ground_population(&self) -> f64 {
        (self.theta / 2.0).cos().powi(2)
    }
}

/// Amplitude-damping Kraus pair `(E0, E1)`.
pub fn ad_kraus(p: f64) -> Result<[CMatrix; 2]> {
    let p = check_unit_closed("p", p)?;
    let e0 = CMatrix::diag_real(&[1.0, (1.0 - p).sqrt()]);
    let e1 = CMatrix::from_real_rows(&[vec![0.0, p.sqrt()], vec![0.0, 0.0]])?;
    Ok([e0, e1])
}

/// `diag(1, sqrt(1 - w))`
pub fn wm_operator(w: f64) -> Result<CMatrix> {
    let w = check_unit_half_open("w", w)?;
    Ok(CMatrix::diag_real(&[1.0, (1.0 - w).sqrt()]))
}

/// `diag(sqrt(1 - wr), 1)`
pub fn mr_operator(wr: f64) -> Result<CMatrix> {
    let wr = check_unit_half_open("wr", wr)?;
    Ok(CMatrix::diag_real(&[(1.0 - wr).sqrt(), 1.0]))
}

/// `wr = w + p (1 - w)`, i.e. `1 - wr = (1 - w)(1 - p)`.
pub fn reversal_strength(w: f64, p: f64) -> Result<f64> {
    let w = check_unit_half_open("w", w)?;
    let p = check_unit_closed("p", p)?;
    Ok(w + p * (1.0 - w))
}

/// `sum_k K rho K†`, optionally renormalized. The trace of the sum is
/// recorded on the returned state in both cases.
pub fn apply_kraus(rho: &DensityState, ks: &[CMatrix], normalize: bool) -> Result<DensityState> {
    let first = ks.first().ok_or_else(|| Error::Config("empty Kraus set".into()))?;
    let mut acc = CMatrix::zeros(first.dim());
    for k in ks {
        if k.dim() != rho.dim() {
            return Err(Error::DimensionMismatch {
                expected: rho.dim(),
                found: k.dim(),
            });
        }
        acc = &acc + &k.conjugate(rho.matrix());
    }
    let branch = DensityState::branch(acc)?;
    if normalize {
        branch.renormalize()
    } else {
        Ok(branch)
    }
}

/// Amplitude-damped state in closed form.
pub fn rho_ad(rho0: &DensityState, p: f64) -> Result<DensityState> {
    require_qubit(rho0)?;
    let p = check_unit_closed("p", p)?;
    let keep = (1.0 - p).sqrt();
    let m = CMatrix::from_rows(&[
        vec![
            c64(p, 0.0) + rho0.get(0, 0) * (1.0 - p),
            rho0.get(0, 1) * keep,
        ],
        vec![rho0.get(1, 0) * keep, rho0.get(1, 1) * (1.0 - p)],
    ])?;
    DensityState::normalized(m)
}

/// Trace left after the weak measurement alone: `rho11 + (1 - w) rho22`.
pub fn weak_measurement_trace(rho0: &DensityState, w: f64) -> Result<f64> {
    require_qubit(rho0)?;
    let w = check_unit_half_open("w", w)?;
    Ok(rho0.get(0, 0).re + (1.0 - w) * rho0.get(1, 1).re)
}

/// Unnormalized result of weak measurement, damping and reversal, in closed
/// form.
pub fn sigma_protect_analytic(
    rho0: &DensityState,
    w: f64,
    p: f64,
    wr: f64,
) -> Result<DensityState> {
    require_qubit(rho0)?;
    let w = check_unit_half_open("w", w)?;
    let p = check_unit_closed("p", p)?;
    let wr = check_unit_half_open("wr", wr)?;
    let (r11, r22) = (rho0.get(0, 0).re, rho0.get(1, 1).re);
    let coherence = ((1.0 - w) * (1.0 - p) * (1.0 - wr)).sqrt();
    let m = CMatrix::from_rows(&[
        vec![
            c64((1.0 - wr) * (r11 + p * (1.0 - w) * r22), 0.0),
            rho0.get(0, 1) * coherence,
        ],
        vec![
            rho0.get(1, 0) * coherence,
            c64((1.0 - w) * (1.0 - p) * r22, 0.0),
        ],
    ])?;
    DensityState::branch(m)
}

/// Normalized protected state and its success probability `N`.
pub fn rho_protect_analytic(
    rho0: &DensityState,
    w: f64,
    p: f64,
    wr: f64,
) -> Result<(DensityState, f64)> {
    let sigma = sigma_protect_analytic(rho0, w, p, wr)?;
    let n = sigma.trace();
    Ok((sigma.renormalize()?, n))
}

/// Split of the success probability at the reversal strength
/// `reversal_strength(w, p)`: the part that reproduces the input (`n1`) and
/// the part that lands in `|0>` (`n2`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuccessTerms {
    pub n1: f64,
    pub n2: f64,
    pub n: f64,
}

impl SuccessTerms {
    /// `N2 / N1 = p (1 - w) rho22`; infinite when `N1` vanishes.
    pub fn ratio(&self) -> f64 {
        self.n2 / self.n1
    }
}

pub fn success_terms(rho0: &DensityState, w: f64, p: f64) -> Result<SuccessTerms> {
    require_qubit(rho0)?;
    let w = check_unit_half_open("w", w)?;
    let p = check_unit_closed("p", p)?;
    let r22 = rho0.get(1, 1).re;
    let n1 = (1.0 - p) * (1.0 - w);
    let n2 = r22 * (1.0 - w).powi(2) * p * (1.0 - p);
    Ok(SuccessTerms { n1, n2, n: n1 + n2 })
}

/// `(N1 rho0 + N2 |0><0|) / N`
pub fn protected_from_terms(rho0: &DensityState, terms: &SuccessTerms) -> Result<DensityState> {
    if terms.n < 1e-12 {
        return Err(Error::ZeroTrace { trace: terms.n });
    }
    let ground = CMatrix::diag_real(&[1.0, 0.0]);
    let m = &rho0.matrix().scale_real(terms.n1) + &ground.scale_real(terms.n2);
    DensityState::normalized(m.scale_real(1.0 / terms.n))
}

/// Fidelity of the damped state with a pure input:
/// `r11 (r11 + p r22) + (1 - p) r22^2 + 2 sqrt(1 - p) |r12|^2`.
pub fn ad_fidelity_pure(state: &PureQubit, p: f64) -> Result<f64> {
    let p = check_unit_closed("p", p)?;
    let (r11, r22) = (state.ground_population(), state.excited_population());
    let r12_sq = r11 * r22;
    Ok(r11 * (r11 + p * r22) + (1.0 - p) * r22 * r22 + 2.0 * (1.0 - p).sqrt() * r12_sq)
}

/// Fidelity of the protected state with a pure input, reversal strength set
/// by `reversal_strength(w, p)`.
pub fn protect_fidelity_pure(state: &PureQubit, w: f64, p: f64) -> Result<f64> {
    let terms = success_terms(&state.density(), w, p)?;
    if terms.n < 1e-12 {
        return Err(Error::ZeroTrace { trace: terms.n });
    }
    Ok((terms.n1 + terms.n2 * state.ground_population()) / terms.n)
}

/// Fidelity of the protected state against `rho0` for each reversal strength
/// in `grid`, at fixed `(w, p)`. Diagnostic only.
pub fn reversal_scan(
    rho0: &DensityState,
    w: f64,
    p: f64,
    grid: &[f64],
) -> Result<Vec<(f64, f64)>> {
    grid.iter()
        .map(|&wr| {
            let (rho, _) = rho_protect_analytic(rho0, w, p, wr)?;
            Ok((wr, uhlmann_fidelity(rho0, &rho)?))
        })
        .collect()
}
