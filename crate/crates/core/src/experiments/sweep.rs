use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{Mode, SweepConfig};
use crate::channels::{
    ad_fidelity_pure, protect_fidelity_pure, reversal_strength, success_terms, DampingParams,
    PureQubit,
};
use crate::circuit::{build_protection_circuit, extract_protected, run_circuit, WIRE_SYSTEM};
use crate::error::{Error, Result};
use crate::qmat::{partial_trace, uhlmann_fidelity};

/// Largest allowed theory/simulation gap in a sweep record.
pub const RECORD_TOL: f64 = 1e-8;
pub const BISECTION_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRecord {
    pub theta: f64,
    pub phi: f64,
    pub gamma: f64,
    pub t: f64,
    pub p: f64,
    pub w: f64,
    pub wr: f64,
    pub f_ad_theory: f64,
    pub f_ad_sim: f64,
    pub f_protect_theory: f64,
    pub f_protect_sim: f64,
    pub n_theory: f64,
    pub n_sim: f64,
    pub max_residual: f64,
}

impl SweepRecord {
    pub fn consistent(&self) -> bool {
        self.max_residual <= RECORD_TOL
    }
}

/// Closed forms and four-qubit circuit at one point.
pub fn sweep_point(theta: f64, phi: f64, gamma: f64, t: f64, w: f64) -> Result<SweepRecord> {
    let state = PureQubit::new(theta, phi)?;
    let rho0 = state.density();
    let p = DampingParams::from_rate(gamma, t)?.p;
    let wr = reversal_strength(w, p)?;

    let f_ad_theory = ad_fidelity_pure(&state, p)?;
    let f_protect_theory = protect_fidelity_pure(&state, w, p)?;
    let n_theory = success_terms(&rho0, w, p)?.n;

    let ad_only = run_circuit(&build_protection_circuit(0.0, p, 0.0)?, &rho0)?;
    let damped = partial_trace(&ad_only, &[WIRE_SYSTEM], &[2; 4])?;
    let f_ad_sim = uhlmann_fidelity(&rho0, &damped)?;

    let sigma = run_circuit(&build_protection_circuit(w, p, wr)?, &rho0)?;
    let (protected, n_sim) = extract_protected(&sigma)?;
    let f_protect_sim = uhlmann_fidelity(&rho0, &protected)?;

    let max_residual = [
        f_ad_theory - f_ad_sim,
        f_protect_theory - f_protect_sim,
        n_theory - n_sim,
    ]
    .iter()
    .fold(0.0f64, |m, d| m.max(d.abs()));

    Ok(SweepRecord {
        theta,
        phi: state.phi(),
        gamma,
        t,
        p,
        w,
        wr,
        f_ad_theory,
        f_ad_sim,
        f_protect_theory,
        f_protect_sim,
        n_theory,
        n_sim,
        max_residual,
    })
}

fn expect_mode(cfg: &SweepConfig, mode: Mode) -> Result<()> {
    if cfg.mode != mode {
        return Err(Error::Config(format!(
            "expected a {} config, got {}",
            mode.name(),
            cfg.mode.name()
        )));
    }
    cfg.validate()
}

/// Every (theta, t, w) combination, sorted by that key.
fn grid_records(cfg: &SweepConfig) -> Result<Vec<SweepRecord>> {
    let points: Vec<(f64, f64, f64)> = cfg
        .theta_grid
        .iter()
        .flat_map(|&th| {
            cfg.t_list
                .iter()
                .flat_map(move |&t| cfg.w_list.iter().map(move |&w| (th, t, w)))
        })
        .collect();
    let mut records = points
        .par_iter()
        .map(|&(th, t, w)| sweep_point(th, cfg.phi, cfg.gamma, t, w))
        .collect::<Result<Vec<_>>>()?;
    records.sort_by(|a, b| {
        a.theta
            .total_cmp(&b.theta)
            .then(a.t.total_cmp(&b.t))
            .then(a.w.total_cmp(&b.w))
    });
    Ok(records)
}

/// Fidelities along the time grid at fixed weak-measurement strength.
pub fn sweep_time(cfg: &SweepConfig) -> Result<Vec<SweepRecord>> {
    expect_mode(cfg, Mode::TimeSweep)?;
    grid_records(cfg)
}

/// Fidelities along the strength grid at fixed `t`.
pub fn sweep_w(cfg: &SweepConfig) -> Result<Vec<SweepRecord>> {
    expect_mode(cfg, Mode::WSweep)?;
    grid_records(cfg)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Monotonicity {
    pub f_non_decreasing: bool,
    pub n_strictly_decreasing: bool,
}

impl Monotonicity {
    pub fn holds(&self) -> bool {
        self.f_non_decreasing && self.n_strictly_decreasing
    }
}

/// Checks the trade-off along `w` within each `(theta, t)` run of sorted
/// records.
pub fn w_monotonicity(records: &[SweepRecord]) -> Monotonicity {
    let mut m = Monotonicity {
        f_non_decreasing: true,
        n_strictly_decreasing: true,
    };
    for pair in records.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if a.theta != b.theta || a.t != b.t {
            continue;
        }
        if b.f_protect_theory < a.f_protect_theory - 1e-12 {
            m.f_non_decreasing = false;
        }
        if b.n_theory >= a.n_theory {
            m.n_strictly_decreasing = false;
        }
    }
    m
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrontierPoint {
    pub theta: f64,
    pub w_star: f64,
    pub n: f64,
    pub f: f64,
}

/// Smallest `w` with protected fidelity at least `target`, by bisection.
pub fn min_strength(state: &PureQubit, p: f64, target: f64) -> Result<f64> {
    let f = |w| protect_fidelity_pure(state, w, p);
    if f(0.0)? >= target {
        return Ok(0.0);
    }
    let mut hi = 1.0 - BISECTION_TOL;
    let best = f(hi)?;
    if best < target {
        return Err(Error::Unreachable {
            theta: state.theta(),
            target,
            best,
        });
    }
    let mut lo = 0.0;
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if f(mid)? >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

pub fn frontier_point(theta: f64, phi: f64, p: f64, target: f64) -> Result<FrontierPoint> {
    let state = PureQubit::new(theta, phi)?;
    let w_star = min_strength(&state, p, target)?;
    Ok(FrontierPoint {
        theta,
        w_star,
        n: success_terms(&state.density(), w_star, p)?.n,
        f: protect_fidelity_pure(&state, w_star, p)?,
    })
}

/// Minimal strength and its success probability for each theta.
pub fn frontier(cfg: &SweepConfig) -> Result<Vec<FrontierPoint>> {
    expect_mode(cfg, Mode::Frontier)?;
    let p = DampingParams::from_rate(cfg.gamma, cfg.t_list[0])?.p;
    let mut points = cfg
        .theta_grid
        .par_iter()
        .map(|&th| frontier_point(th, cfg.phi, p, cfg.target_fidelity))
        .collect::<Result<Vec<_>>>()?;
    points.sort_by(|a, b| a.theta.total_cmp(&b.theta));
    Ok(points)
}

/// `w*` non-decreasing and `N` non-increasing along sorted points. Points
/// where no measurement is needed (`w* = 0`) are exempt from the `N` check.
pub fn frontier_monotone(points: &[FrontierPoint]) -> bool {
    points.windows(2).all(|pair| {
        let (a, b) = (&pair[0], &pair[1]);
        b.w_star >= a.w_star && (b.w_star == 0.0 || b.n <= a.n + 1e-12)
    })
}

pub fn theta_over_pi(theta: f64) -> f64 {
    theta / PI
}
