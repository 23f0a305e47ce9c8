//! Parameter sweeps, the minimal-strength frontier, verification suites and
//! their CSV output.

mod config;
mod output;
mod sweep;
mod verify;

pub use config::{linspace, named_thetas, parse_list, parse_real, ConfigFile, Mode, Real, SweepConfig};
pub use output::{
    format_sig, with_output, write_frontier_csv, write_sweep_csv, FRONTIER_HEADER, SIG_DIGITS,
    SWEEP_HEADER,
};
pub use sweep::{
    frontier, frontier_monotone, frontier_point, min_strength, sweep_point, sweep_time, sweep_w,
    theta_over_pi, w_monotonicity, FrontierPoint, Monotonicity, SweepRecord, BISECTION_TOL,
    RECORD_TOL,
};
pub use verify::{
    verify_all, verify_with, Fault, SuiteResult, VerifyConfig, VerifyReport, CIRCUIT_TOL,
    GADGET_TOL, READOUT_TOL,
};
