use std::f64::consts::PI;

use serde::Serialize;

use crate::channels::{ad_kraus, apply_kraus, reversal_strength, rho_protect_analytic, PureQubit};
use crate::circuit::{build_protection_circuit, extract_protected, readout_reconstruct, run_circuit};
use crate::dilation::{gate_sequence, run_dilated, snd_unitary, FilterKind};
use crate::duality::{build_gadget, run_gadget, DualityGadget, GadgetKind};
use crate::error::{Error, Result};
use crate::qmat::{CMatrix, DensityState};

pub const GADGET_TOL: f64 = 1e-12;
pub const CIRCUIT_TOL: f64 = 1e-10;
pub const READOUT_TOL: f64 = 1e-8;

/// Deliberate corruption used to check that the suites can fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Fault {
    /// Negates `W[1][1]` in every gadget.
    FlipWSign,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyConfig {
    /// Gadget and dilation strengths.
    pub strengths: Vec<f64>,
    /// `(theta, phi)` input states.
    pub bloch_grid: Vec<(f64, f64)>,
    pub w_grid: Vec<f64>,
    pub p_grid: Vec<f64>,
    pub fault: Option<Fault>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        let bloch_grid = [
            (0.0, 0.0),
            (PI / 3.0, PI / 2.0),
            (PI / 2.0, PI / 2.0),
            (PI / 2.0, 0.0),
            (2.0 * PI / 3.0, PI / 4.0),
            (PI / 4.0, 5.0 * PI / 4.0),
            (0.9 * PI, 3.0 * PI / 2.0),
            (PI, 0.0),
        ];
        Self {
            strengths: (1..=99).map(|i| i as f64 / 100.0).collect(),
            bloch_grid: bloch_grid.to_vec(),
            w_grid: vec![0.05, 0.25, 0.5, 0.75, 0.95],
            p_grid: vec![0.05, 0.25, 0.5, 0.75, 0.95],
            fault: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub cases: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suites: Vec<SuiteResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }

    pub fn max_residual(&self) -> f64 {
        self.suites.iter().fold(0.0, |m, s| m.max(s.max_residual))
    }

    pub fn suite(&self, name: &str) -> Option<&SuiteResult> {
        self.suites.iter().find(|s| s.name == name)
    }
}

struct Tally {
    name: &'static str,
    tolerance: f64,
    cases: usize,
    max_residual: f64,
    broken: bool,
}

impl Tally {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            tolerance,
            cases: 0,
            max_residual: 0.0,
            broken: false,
        }
    }

    fn record(&mut self, residual: f64) {
        self.cases += 1;
        if residual.is_nan() {
            self.broken = true;
        }
        self.max_residual = self.max_residual.max(residual);
    }

    /// A case that could not be evaluated counts as a failure.
    fn record_result(&mut self, r: Result<f64>) {
        match r {
            Ok(x) => self.record(x),
            Err(_) => {
                self.cases += 1;
                self.broken = true;
                self.max_residual = f64::INFINITY;
            }
        }
    }

    fn finish(self) -> SuiteResult {
        SuiteResult {
            name: self.name,
            cases: self.cases,
            max_residual: self.max_residual,
            tolerance: self.tolerance,
            passed: !self.broken && self.cases > 0 && self.max_residual <= self.tolerance,
        }
    }
}

const KINDS: [GadgetKind; 3] = [
    GadgetKind::WeakMeasurement,
    GadgetKind::Damping,
    GadgetKind::Reversal,
];

fn gadget(kind: GadgetKind, strength: f64, fault: Option<Fault>) -> Result<DualityGadget> {
    let g = build_gadget(kind, strength)?;
    Ok(match fault {
        None => g,
        Some(Fault::FlipWSign) => {
            let w = g.w_mat();
            let bad = CMatrix::from_rows(&[
                vec![w.get(0, 0), w.get(0, 1)],
                vec![w.get(1, 0), -w.get(1, 1)],
            ])?;
            DualityGadget::from_parts(g.kind(), g.strength(), g.v().clone(), bad, g.post_x())
        }
    })
}

/// Kraus operators the gadget is meant to realize, success branch first.
fn target_kraus(kind: GadgetKind, strength: f64) -> Result<[CMatrix; 2]> {
    match kind {
        GadgetKind::Damping => ad_kraus(strength),
        GadgetKind::WeakMeasurement | GadgetKind::Reversal => {
            let filter = if kind == GadgetKind::WeakMeasurement {
                FilterKind::WeakMeasurement
            } else {
                FilterKind::Reversal
            };
            let k = filter.operator(strength)?;
            let fail = &CMatrix::identity(2) - &(&k.adjoint() * &k);
            Ok([k, crate::qmat::herm_sqrt(&fail)?])
        }
    }
}

fn states(cfg: &VerifyConfig) -> Result<Vec<DensityState>> {
    cfg.bloch_grid
        .iter()
        .map(|&(th, ph)| Ok(PureQubit::new(th, ph)?.density()))
        .collect()
}

fn completeness_suite(cfg: &VerifyConfig) -> SuiteResult {
    let mut t = Tally::new("completeness", GADGET_TOL);
    for kind in KINDS {
        for &s in &cfg.strengths {
            t.record_result(gadget(kind, s, cfg.fault).map(|g| g.check().completeness));
        }
    }
    t.finish()
}

fn unitarity_suite(cfg: &VerifyConfig) -> SuiteResult {
    let mut t = Tally::new("unitarity", GADGET_TOL);
    for kind in KINDS {
        for &s in &cfg.strengths {
            t.record_result(gadget(kind, s, cfg.fault).map(|g| {
                let c = g.check();
                c.v_unitarity.max(c.w_unitarity).max(g.circuit_unitary().unitarity_defect())
            }));
        }
    }
    for filter in [FilterKind::WeakMeasurement, FilterKind::Reversal] {
        for &s in &cfg.strengths {
            t.record_result(
                filter
                    .operator(s)
                    .and_then(|k| snd_unitary(&k))
                    .map(|u| u.matrix().unitarity_defect()),
            );
        }
    }
    for &w in &cfg.w_grid {
        for &p in &cfg.p_grid {
            t.record_result(
                reversal_strength(w, p)
                    .and_then(|wr| build_protection_circuit(w, p, wr))
                    .map(|c| c.unitary().unitarity_defect()),
            );
        }
    }
    t.finish()
}

fn duality_suite(cfg: &VerifyConfig, states: &[DensityState]) -> SuiteResult {
    let mut t = Tally::new("duality-vs-analytic", GADGET_TOL);
    for kind in KINDS {
        for &s in &cfg.strengths {
            t.record_result((|| {
                let g = gadget(kind, s, cfg.fault)?;
                let ks = target_kraus(kind, s)?;
                let mut worst = 0.0f64;
                for rho in states {
                    let branches = run_gadget(rho, &g)?;
                    for (branch, k) in branches.iter().zip(&ks) {
                        let want = apply_kraus(rho, std::slice::from_ref(k), false)?;
                        worst = worst.max(branch.matrix().max_abs_diff(want.matrix()));
                    }
                }
                Ok(worst)
            })());
        }
    }
    t.finish()
}

fn protection_suite(cfg: &VerifyConfig, states: &[DensityState]) -> SuiteResult {
    let mut t = Tally::new("circuit-vs-analytic", CIRCUIT_TOL);
    for rho in states {
        for &w in &cfg.w_grid {
            for &p in &cfg.p_grid {
                t.record_result((|| {
                    let wr = reversal_strength(w, p)?;
                    let sigma = run_circuit(&build_protection_circuit(w, p, wr)?, rho)?;
                    let (got, n) = extract_protected(&sigma)?;
                    let (want, n_want) = rho_protect_analytic(rho, w, p, wr)?;
                    Ok(got.matrix().max_abs_diff(want.matrix()).max((n - n_want).abs()))
                })());
            }
        }
    }
    t.finish()
}

fn snd_suite(cfg: &VerifyConfig, states: &[DensityState]) -> SuiteResult {
    let mut t = Tally::new("snd-vs-duality", GADGET_TOL);
    let pairs = [
        (FilterKind::WeakMeasurement, GadgetKind::WeakMeasurement),
        (FilterKind::Reversal, GadgetKind::Reversal),
    ];
    for (filter, kind) in pairs {
        for &s in &cfg.strengths {
            t.record_result((|| {
                let k = filter.operator(s)?;
                let g = gadget(kind, s, cfg.fault)?;
                let mut worst = 0.0f64;
                for rho in states {
                    let dilated = run_dilated(rho, &k)?;
                    let dual = run_gadget(rho, &g)?;
                    worst = worst.max(dilated[0].matrix().max_abs_diff(dual[0].matrix()));
                }
                worst = worst.max(gate_sequence(filter, s)?.max_residual);
                Ok(worst)
            })());
        }
    }
    t.finish()
}

fn readout_suite(cfg: &VerifyConfig, states: &[DensityState]) -> SuiteResult {
    let mut t = Tally::new("readout-vs-extraction", READOUT_TOL);
    for rho in states {
        for &w in &cfg.w_grid {
            for &p in &cfg.p_grid {
                t.record_result((|| {
                    let wr = reversal_strength(w, p)?;
                    let sigma = run_circuit(&build_protection_circuit(w, p, wr)?, rho)?;
                    let (direct, _) = extract_protected(&sigma)?;
                    let read = readout_reconstruct(sigma.matrix())?;
                    Ok(direct.matrix().max_abs_diff(read.matrix()))
                })());
            }
        }
    }
    t.finish()
}

pub fn verify_with(cfg: &VerifyConfig) -> Result<VerifyReport> {
    if cfg.strengths.is_empty()
        || cfg.bloch_grid.is_empty()
        || cfg.w_grid.is_empty()
        || cfg.p_grid.is_empty()
    {
        return Err(Error::Config("verification grids must be non-empty".into()));
    }
    let states = states(cfg)?;
    let suites = vec![
        completeness_suite(cfg),
        unitarity_suite(cfg),
        duality_suite(cfg, &states),
        snd_suite(cfg, &states),
        protection_suite(cfg, &states),
        readout_suite(cfg, &states),
    ];
    Ok(VerifyReport { suites })
}

/// All invariant suites on the default grids.
pub fn verify_all() -> VerifyReport {
    verify_with(&VerifyConfig::default()).expect("default grids are non-empty")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> VerifyConfig {
        VerifyConfig {
            strengths: vec![0.1, 0.5, 0.9],
            bloch_grid: vec![(0.3, 0.1), (PI / 2.0, PI / 2.0), (PI, 0.0)],
            w_grid: vec![0.1, 0.6],
            p_grid: vec![0.2, 0.8],
            fault: None,
        }
    }

    #[test]
    fn clean_build_passes() {
        let r = verify_with(&small()).unwrap();
        assert!(r.passed(), "{r:#?}");
        assert!(r.max_residual() < 1e-8);
        assert_eq!(r.suites.len(), 6);
    }

    #[test]
    fn flipped_w_fails_completeness() {
        let r = verify_with(&VerifyConfig {
            fault: Some(Fault::FlipWSign),
            ..small()
        })
        .unwrap();
        assert!(!r.passed());
        assert!(!r.suite("completeness").unwrap().passed);
        assert!(r.suite("readout-vs-extraction").unwrap().passed);
    }

    #[test]
    fn empty_grid_is_config_error() {
        let cfg = VerifyConfig {
            w_grid: vec![],
            ..small()
        };
        assert!(matches!(verify_with(&cfg), Err(Error::Config(_))));
    }
}
