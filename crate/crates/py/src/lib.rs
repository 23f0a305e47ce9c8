//! Python bindings. Matrices cross the boundary as nested lists of
//! `complex`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use wmprotect::channels::{self, PureQubit};
use wmprotect::circuit;
use wmprotect::dilation;
use wmprotect::experiments::{self, Mode, SweepConfig};
use wmprotect::qmat::{self, CMatrix};

fn err(e: wmprotect::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_matrix(rows: Vec<Vec<Complex64>>) -> PyResult<CMatrix> {
    CMatrix::from_rows(&rows).map_err(err)
}

#[pyclass(name = "DensityState", module = "wmprotect_py", frozen)]
struct PyDensityState(qmat::DensityState);

#[pymethods]
impl PyDensityState {
    /// Validated trace-one density matrix.
    #[new]
    fn new(rows: Vec<Vec<Complex64>>) -> PyResult<Self> {
        qmat::DensityState::normalized(to_matrix(rows)?)
            .map(Self)
            .map_err(err)
    }

    /// `cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>`
    #[staticmethod]
    fn pure(theta: f64, phi: f64) -> PyResult<Self> {
        Ok(Self(PureQubit::new(theta, phi).map_err(err)?.density()))
    }

    fn matrix(&self) -> Vec<Vec<Complex64>> {
        self.0.matrix().to_rows()
    }

    fn trace(&self) -> f64 {
        self.0.trace()
    }

    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn fidelity(&self, other: &PyDensityState) -> PyResult<f64> {
        qmat::uhlmann_fidelity(&self.0, &other.0).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("DensityState(\n{:.6})", self.0.matrix())
    }
}

#[pyclass(name = "ProtectionCircuit", module = "wmprotect_py", frozen)]
struct PyProtectionCircuit(circuit::ProtectionCircuit);

#[pymethods]
impl PyProtectionCircuit {
    #[new]
    fn new(w: f64, p: f64, wr: f64) -> PyResult<Self> {
        circuit::build_protection_circuit(w, p, wr)
            .map(Self)
            .map_err(err)
    }

    fn gate_labels(&self) -> Vec<String> {
        self.0.gates().iter().map(|g| g.label().to_string()).collect()
    }

    fn __len__(&self) -> usize {
        self.0.gates().len()
    }

    /// 16x16 register state for a system qubit.
    fn run(&self, rho_sys: &PyDensityState) -> PyResult<PyDensityState> {
        circuit::run_circuit(&self.0, &rho_sys.0)
            .map(PyDensityState)
            .map_err(err)
    }
}

#[pyfunction]
fn ad_kraus(p: f64) -> PyResult<Vec<Vec<Vec<Complex64>>>> {
    Ok(channels::ad_kraus(p).map_err(err)?.iter().map(CMatrix::to_rows).collect())
}

#[pyfunction]
fn reversal_strength(w: f64, p: f64) -> PyResult<f64> {
    channels::reversal_strength(w, p).map_err(err)
}

#[pyfunction]
fn rho_ad(rho: &PyDensityState, p: f64) -> PyResult<PyDensityState> {
    channels::rho_ad(&rho.0, p).map(PyDensityState).map_err(err)
}

/// Returns `(state, N)`.
#[pyfunction]
fn rho_protect_analytic(rho: &PyDensityState, w: f64, p: f64, wr: f64) -> PyResult<(PyDensityState, f64)> {
    let (s, n) = channels::rho_protect_analytic(&rho.0, w, p, wr).map_err(err)?;
    Ok((PyDensityState(s), n))
}

#[pyfunction]
fn protect_fidelity_pure(theta: f64, phi: f64, w: f64, p: f64) -> PyResult<f64> {
    let s = PureQubit::new(theta, phi).map_err(err)?;
    channels::protect_fidelity_pure(&s, w, p).map_err(err)
}

#[pyfunction]
fn extract_protected(sigma: &PyDensityState) -> PyResult<(PyDensityState, f64)> {
    let (s, n) = circuit::extract_protected(&sigma.0).map_err(err)?;
    Ok((PyDensityState(s), n))
}

/// Accepts any 16x16 matrix, physical or not.
#[pyfunction]
fn readout_reconstruct(sigma: Vec<Vec<Complex64>>) -> PyResult<PyDensityState> {
    circuit::readout_reconstruct(&to_matrix(sigma)?)
        .map(PyDensityState)
        .map_err(err)
}

#[pyfunction]
fn nearest_physical(m: Vec<Vec<Complex64>>) -> PyResult<PyDensityState> {
    Ok(PyDensityState(qmat::nearest_physical(&to_matrix(m)?)))
}

#[pyfunction]
fn snd_unitary(k: Vec<Vec<Complex64>>) -> PyResult<Vec<Vec<Complex64>>> {
    let u = dilation::snd_unitary(&to_matrix(k)?).map_err(err)?;
    Ok(u.matrix().to_rows())
}

fn record_dict(r: &experiments::SweepRecord) -> BTreeMap<&'static str, f64> {
    BTreeMap::from([
        ("theta", r.theta),
        ("phi", r.phi),
        ("gamma", r.gamma),
        ("t", r.t),
        ("p", r.p),
        ("w", r.w),
        ("wr", r.wr),
        ("F_ad_theory", r.f_ad_theory),
        ("F_ad_sim", r.f_ad_sim),
        ("F_protect_theory", r.f_protect_theory),
        ("F_protect_sim", r.f_protect_sim),
        ("N_theory", r.n_theory),
        ("N_sim", r.n_sim),
        ("max_residual", r.max_residual),
    ])
}

fn sweep_config(
    mode: Mode,
    gamma: Option<f64>,
    t: Option<Vec<f64>>,
    w: Option<Vec<f64>>,
    theta: Option<Vec<f64>>,
    phi: Option<f64>,
    target_f: Option<f64>,
) -> PyResult<SweepConfig> {
    let mut cfg = SweepConfig::defaults(mode);
    cfg.gamma = gamma.unwrap_or(cfg.gamma);
    cfg.t_list = t.unwrap_or(cfg.t_list);
    cfg.w_list = w.unwrap_or(cfg.w_list);
    cfg.theta_grid = theta.unwrap_or(cfg.theta_grid);
    cfg.phi = phi.unwrap_or(cfg.phi);
    cfg.target_fidelity = target_f.unwrap_or(cfg.target_fidelity);
    cfg.validate().map_err(err)?;
    Ok(cfg)
}

#[pyfunction]
#[pyo3(signature = (gamma=None, t=None, w=None, theta=None, phi=None))]
fn sweep_time(
    gamma: Option<f64>,
    t: Option<Vec<f64>>,
    w: Option<Vec<f64>>,
    theta: Option<Vec<f64>>,
    phi: Option<f64>,
) -> PyResult<Vec<BTreeMap<&'static str, f64>>> {
    let cfg = sweep_config(Mode::TimeSweep, gamma, t, w, theta, phi, None)?;
    let recs = experiments::sweep_time(&cfg).map_err(err)?;
    Ok(recs.iter().map(record_dict).collect())
}

#[pyfunction]
#[pyo3(signature = (gamma=None, t=None, w=None, theta=None, phi=None))]
fn sweep_w(
    gamma: Option<f64>,
    t: Option<Vec<f64>>,
    w: Option<Vec<f64>>,
    theta: Option<Vec<f64>>,
    phi: Option<f64>,
) -> PyResult<Vec<BTreeMap<&'static str, f64>>> {
    let cfg = sweep_config(Mode::WSweep, gamma, t, w, theta, phi, None)?;
    let recs = experiments::sweep_w(&cfg).map_err(err)?;
    Ok(recs.iter().map(record_dict).collect())
}

/// Returns `(theta, w_star, N, F)` tuples.
#[pyfunction]
#[pyo3(signature = (gamma=None, t=None, theta=None, phi=None, target_f=None))]
fn frontier(
    gamma: Option<f64>,
    t: Option<f64>,
    theta: Option<Vec<f64>>,
    phi: Option<f64>,
    target_f: Option<f64>,
) -> PyResult<Vec<(f64, f64, f64, f64)>> {
    let cfg = sweep_config(Mode::Frontier, gamma, t.map(|t| vec![t]), None, theta, phi, target_f)?;
    let pts = experiments::frontier(&cfg).map_err(err)?;
    Ok(pts.iter().map(|p| (p.theta, p.w_star, p.n, p.f)).collect())
}

/// Returns `(passed, [(suite, passed, max_residual), ...])`.
#[pyfunction]
fn verify_all() -> (bool, Vec<(String, bool, f64)>) {
    let r = experiments::verify_all();
    let suites = r
        .suites
        .iter()
        .map(|s| (s.name.to_string(), s.passed, s.max_residual))
        .collect();
    (r.passed(), suites)
}

#[pymodule]
fn wmprotect_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDensityState>()?;
    m.add_class::<PyProtectionCircuit>()?;
    m.add_function(wrap_pyfunction!(ad_kraus, m)?)?;
    m.add_function(wrap_pyfunction!(reversal_strength, m)?)?;
    m.add_function(wrap_pyfunction!(rho_ad, m)?)?;
    m.add_function(wrap_pyfunction!(rho_protect_analytic, m)?)?;
    m.add_function(wrap_pyfunction!(protect_fidelity_pure, m)?)?;
    m.add_function(wrap_pyfunction!(extract_protected, m)?)?;
    m.add_function(wrap_pyfunction!(readout_reconstruct, m)?)?;
    m.add_function(wrap_pyfunction!(nearest_physical, m)?)?;
    m.add_function(wrap_pyfunction!(snd_unitary, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_time, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_w, m)?)?;
    m.add_function(wrap_pyfunction!(frontier, m)?)?;
    m.add_function(wrap_pyfunction!(verify_all, m)?)?;
    Ok(())
}
