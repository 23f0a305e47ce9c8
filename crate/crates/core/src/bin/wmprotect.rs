use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use wmprotect::channels::{
    ad_fidelity_pure, protect_fidelity_pure, reversal_strength, rho_ad, rho_protect_analytic,
    DampingParams, PureQubit,
};
use wmprotect::circuit::{build_protection_circuit, extract_protected, run_circuit};
use wmprotect::experiments::{
    frontier, frontier_monotone, parse_list, parse_real, sweep_time, sweep_w, verify_all,
    w_monotonicity, with_output, write_frontier_csv, write_sweep_csv, ConfigFile, Mode, Real,
    SweepConfig, SweepRecord,
};
use wmprotect::qmat::uhlmann_fidelity;
use wmprotect::Error;

#[derive(Parser)]
#[command(name = "wmprotect", version, about = "Weak-measurement protection against amplitude damping")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every invariant suite
    Verify(Flags),
    /// Fidelity versus time at fixed w
    SweepTime(Flags),
    /// Fidelity versus w at fixed t
    SweepW(Flags),
    /// Minimal w reaching the target fidelity, per theta
    Frontier(Flags),
    /// One point: density matrices and fidelities
    Protect(Flags),
}

#[derive(Clone, Debug)]
struct List(Vec<f64>);

fn list(s: &str) -> Result<List, Error> {
    parse_list(s).map(List)
}

#[derive(Args, Default)]
struct Flags {
    /// Damping rate in 1/s
    #[arg(long, value_parser = parse_real)]
    gamma: Option<f64>,
    /// Time or comma-separated times in s
    #[arg(long, value_parser = list)]
    t: Option<List>,
    /// Weak-measurement strength(s)
    #[arg(long, value_parser = list)]
    w: Option<List>,
    /// Polar angle(s); `pi` units accepted, e.g. 0.4225pi
    #[arg(long, value_parser = list)]
    theta: Option<List>,
    #[arg(long, value_parser = parse_real)]
    phi: Option<f64>,
    /// Frontier target fidelity
    #[arg(long = "target-f", value_parser = parse_real)]
    target_f: Option<f64>,
    /// Output file (stdout if omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON config; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Flags {
    fn overrides(&self) -> ConfigFile {
        let list = |v: &Option<List>| v.as_ref().map(|v| v.0.iter().map(|x| Real::Number(*x)).collect());
        ConfigFile {
            mode: None,
            gamma: self.gamma.map(Real::Number),
            t_list: list(&self.t),
            w_list: list(&self.w),
            theta_grid: list(&self.theta),
            phi: self.phi.map(Real::Number),
            target_fidelity: self.target_f.map(Real::Number),
            output: self.out.clone(),
        }
    }

    fn resolve(&self, mode: Mode) -> Result<SweepConfig, Error> {
        let file = self.config.as_deref().map(ConfigFile::load).transpose()?;
        SweepConfig::resolve(mode, file.as_ref(), &self.overrides())
    }
}

enum Outcome {
    Ok,
    InvariantFailure,
}

fn is_config_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Config(_)
            | Error::Range { .. }
            | Error::DegenerateStrength { .. }
            | Error::Unreachable { .. }
    )
}

fn report_records(records: &[SweepRecord]) -> Outcome {
    let worst = records.iter().fold(0.0f64, |m, r| m.max(r.max_residual));
    let bad = records.iter().filter(|r| !r.consistent()).count();
    eprintln!(
        "{} records, max |theory - sim| = {worst:.3e}, {bad} over tolerance",
        records.len()
    );
    if bad == 0 {
        Outcome::Ok
    } else {
        Outcome::InvariantFailure
    }
}

fn write_json<T: Serialize>(path: Option<&std::path::Path>, value: &T) -> Result<(), Error> {
    with_output(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w)?;
        Ok(())
    })
}

#[derive(Serialize)]
struct ProtectReport {
    theta: f64,
    phi: f64,
    gamma: f64,
    t: f64,
    p: f64,
    w: f64,
    wr: f64,
    rho_ad: [[[f64; 2]; 2]; 2],
    rho_protect: [[[f64; 2]; 2]; 2],
    f_ad_theory: f64,
    f_ad_sim: f64,
    f_protect_theory: f64,
    f_protect_sim: f64,
    n_theory: f64,
    n_sim: f64,
}

fn as_pairs(m: &wmprotect::qmat::CMatrix) -> [[[f64; 2]; 2]; 2] {
    let e = |i, j| {
        let z = m.get(i, j);
        [z.re, z.im]
    };
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

fn protect(cfg: &SweepConfig) -> Result<Outcome, Error> {
    let (theta, t, w) = (cfg.theta_grid[0], cfg.t_list[0], cfg.w_list[0]);
    let state = PureQubit::new(theta, cfg.phi)?;
    let rho0 = state.density();
    let p = DampingParams::from_rate(cfg.gamma, t)?.p;
    let wr = reversal_strength(w, p)?;
    let damped = rho_ad(&rho0, p)?;
    let (rho_p, n_theory) = rho_protect_analytic(&rho0, w, p, wr)?;
    let sigma = run_circuit(&build_protection_circuit(w, p, wr)?, &rho0)?;
    let (rho_sim, n_sim) = extract_protected(&sigma)?;
    let report = ProtectReport {
        theta,
        phi: state.phi(),
        gamma: cfg.gamma,
        t,
        p,
        w,
        wr,
        rho_ad: as_pairs(damped.matrix()),
        rho_protect: as_pairs(rho_p.matrix()),
        f_ad_theory: ad_fidelity_pure(&state, p)?,
        f_ad_sim: uhlmann_fidelity(&rho0, &damped)?,
        f_protect_theory: protect_fidelity_pure(&state, w, p)?,
        f_protect_sim: uhlmann_fidelity(&rho0, &rho_sim)?,
        n_theory,
        n_sim,
    };
    println!("theta = {theta:.6}  phi = {:.6}  p = {p:.6}  w = {w:.6}  wr = {wr:.6}", state.phi());
    println!("rho_AD =\n{:.6}", damped.matrix());
    println!("rho_protect =\n{:.6}", rho_p.matrix());
    println!("F_AD      = {:.6} (circuit {:.6})", report.f_ad_theory, report.f_ad_sim);
    println!("F_protect = {:.6} (circuit {:.6})", report.f_protect_theory, report.f_protect_sim);
    println!("N         = {:.6} (circuit {:.6})", n_theory, n_sim);
    if let Some(path) = &cfg.output {
        write_json(Some(path), &report)?;
    }
    let residual = rho_sim.matrix().max_abs_diff(rho_p.matrix()).max((n_sim - n_theory).abs());
    Ok(if residual <= 1e-8 {
        Outcome::Ok
    } else {
        Outcome::InvariantFailure
    })
}

fn run(cmd: Command) -> Result<Outcome, Error> {
    match cmd {
        Command::Verify(flags) => {
            let cfg = flags.resolve(Mode::Verify)?;
            let report = verify_all();
            for s in &report.suites {
                println!(
                    "{:<4} {:<24} cases={:<5} max_residual={:.3e} tol={:.0e}",
                    if s.passed { "PASS" } else { "FAIL" },
                    s.name,
                    s.cases,
                    s.max_residual,
                    s.tolerance
                );
            }
            if let Some(path) = &cfg.output {
                write_json(Some(path), &report)?;
            }
            Ok(if report.passed() {
                Outcome::Ok
            } else {
                Outcome::InvariantFailure
            })
        }
        Command::SweepTime(flags) => {
            let cfg = flags.resolve(Mode::TimeSweep)?;
            let records = sweep_time(&cfg)?;
            with_output(cfg.output.as_deref(), |w| write_sweep_csv(w, &records))?;
            Ok(report_records(&records))
        }
        Command::SweepW(flags) => {
            let cfg = flags.resolve(Mode::WSweep)?;
            let records = sweep_w(&cfg)?;
            with_output(cfg.output.as_deref(), |w| write_sweep_csv(w, &records))?;
            let mono = w_monotonicity(&records);
            eprintln!(
                "F non-decreasing: {}, N strictly decreasing: {}",
                mono.f_non_decreasing, mono.n_strictly_decreasing
            );
            match report_records(&records) {
                Outcome::Ok if mono.holds() => Ok(Outcome::Ok),
                _ => Ok(Outcome::InvariantFailure),
            }
        }
        Command::Frontier(flags) => {
            let cfg = flags.resolve(Mode::Frontier)?;
            let points = frontier(&cfg)?;
            with_output(cfg.output.as_deref(), |w| write_frontier_csv(w, &points))?;
            let monotone = frontier_monotone(&points);
            eprintln!("{} points, monotone: {monotone}", points.len());
            Ok(if monotone {
                Outcome::Ok
            } else {
                Outcome::InvariantFailure
            })
        }
        Command::Protect(flags) => protect(&flags.resolve(Mode::Protect)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::InvariantFailure) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if is_config_error(&e) { 2 } else { 1 })
        }
    }
}
