use std::io::Write;
use std::path::Path;

use super::sweep::{theta_over_pi, FrontierPoint, SweepRecord};
use crate::error::Result;

pub const SWEEP_HEADER: [&str; 13] = [
    "theta",
    "phi",
    "gamma",
    "t",
    "p",
    "w",
    "wr",
    "F_ad_theory",
    "F_ad_sim",
    "F_protect_theory",
    "F_protect_sim",
    "N_theory",
    "N_sim",
];

pub const FRONTIER_HEADER: [&str; 4] = ["theta_over_pi", "w_star", "N", "F"];

pub const SIG_DIGITS: usize = 12;

/// `%.{digits}g`: shortest of fixed and exponent notation, trailing zeros
/// dropped.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn g(x: f64) -> String {
    format_sig(x, SIG_DIGITS)
}

pub fn write_sweep_csv<W: Write>(out: W, records: &[SweepRecord]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(SWEEP_HEADER)?;
    for r in records {
        wtr.write_record(
            [
                r.theta,
                r.phi,
                r.gamma,
                r.t,
                r.p,
                r.w,
                r.wr,
                r.f_ad_theory,
                r.f_ad_sim,
                r.f_protect_theory,
                r.f_protect_sim,
                r.n_theory,
                r.n_sim,
            ]
            .map(g),
        )?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_frontier_csv<W: Write>(out: W, points: &[FrontierPoint]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(FRONTIER_HEADER)?;
    for pt in points {
        wtr.write_record([theta_over_pi(pt.theta), pt.w_star, pt.n, pt.f].map(g))?;
    }
    wtr.flush()?;
    Ok(())
}

/// Writes to `path`, or to stdout when `path` is `None`.
pub fn with_output<F>(path: Option<&Path>, f: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    match path {
        Some(p) => {
            let mut file = std::io::BufWriter::new(std::fs::File::create(p)?);
            f(&mut file)?;
            file.flush()?;
            Ok(())
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock)
        }
    }
}
