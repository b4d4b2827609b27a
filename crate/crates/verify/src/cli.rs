use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use epr_core::states::eval_poly;

use crate::checks;
use crate::error::{exit, CliError, Result};
use crate::formats::{read_json, read_points, read_polynomial, read_state, SearchConfigSpec, StateKindSpec, StateSpec};
use crate::report::VerificationReport;

/// Default battery sizes for `verify-all`.
pub const KERNEL_POINTS: usize = 64;
pub const KERNEL_BATTERIES: usize = 4;
pub const UNIQUENESS_MONOMIALS: usize = 200;
pub const PAIRS: usize = 100;
pub const FRAME_SIZE: usize = 16;
pub const DOUBLE_SAMPLES: usize = 20;

#[derive(Debug, Parser)]
#[command(name = "epr", version, about = "Verification engine for the EPR state on the Weyl algebra")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the state on a polynomial over R^4.
    Eval {
        #[arg(long)]
        state: Option<PathBuf>,
        polynomial: PathBuf,
    },
    /// Kernel positivity and support structure on a point set.
    Psd {
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(long, default_value_t = epr_core::states::PSD_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        points: PathBuf,
    },
    /// Lower-bound search for the Bell value.
    Bell {
        #[arg(long)]
        state: Option<PathBuf>,
        /// Overrides the seed in the config file.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        config: PathBuf,
    },
    /// CHSH value, correlations and doubles in the matrix model.
    Surrogate {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Every check, at the default battery sizes.
    VerifyAll {
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `args` and runs the command.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE } else { exit::PASS });
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn run(cmd: Command) -> Result<u8> {
    match cmd {
        Command::Eval { state, polynomial } => {
            let spec = read_state(state.as_deref())?;
            let st = spec.functional()?;
            let p = read_polynomial(&polynomial)?;
            let v = eval_poly(&st, &p)?;
            println!("({}, {})", sig15(v.re), sig15(v.im));
            Ok(exit::PASS)
        }
        Command::Psd { state, tol, out, points } => {
            if !(tol >= 0.0) {
                return Err(CliError::Format("--tol must be non-negative".into()));
            }
            let spec = read_state(state.as_deref())?;
            let st = spec.functional()?;
            let pts = read_points(&points)?;
            let mut report = VerificationReport::new("psd", Some(spec.clone()), None);
            report.push(checks::kernel_psd("kernel_psd", &spec, &st, &pts, tol)?);
            finish(&report, out.as_deref())
        }
        Command::Bell { state, seed, out, config } => {
            let spec = read_state(state.as_deref())?;
            let st = spec.functional()?;
            let mut cfg_spec: SearchConfigSpec = read_json(&config)?;
            if let Some(s) = seed {
                cfg_spec.seed = s;
            }
            let cfg = cfg_spec.config()?;
            let result = checks::run_search(&st, &cfg)?;
            let mut report = VerificationReport::new("bell", Some(spec.clone()), Some(cfg.seed));
            let cfg_json = serde_json::to_value(&cfg_spec).expect("config serializes");
            report.push(checks::search_record("bell_search", &spec, &cfg_json, &result)?);
            finish(&report, out.as_deref())
        }
        Command::Surrogate { dim, seed, out } => {
            epr_core::surrogate::build_model(dim)?;
            let mut report = VerificationReport::new("surrogate", None, Some(seed));
            report.push(checks::surrogate_model(dim)?);
            report.push(checks::correlation_grid(dim)?);
            report.push(checks::surrogate_chsh(&[dim])?);
            report.push(checks::surrogate_doubles(&[dim], seed, DOUBLE_SAMPLES)?);
            finish(&report, out.as_deref())
        }
        Command::VerifyAll { state, seed, out } => {
            let spec = read_state(state.as_deref())?;
            let report = verify_all(&spec, seed)?;
            finish(&report, out.as_deref())
        }
    }
}

/// The full battery. Needs an EPR state; `corrupt_kernel` is honored so the
/// kernel records can be driven to failure.
pub fn verify_all(spec: &StateSpec, seed: u64) -> Result<VerificationReport> {
    if spec.kind != StateKindSpec::Epr {
        return Err(CliError::Format("verify-all needs an EPR state".into()));
    }
    let st = spec.functional()?;
    let tol = epr_core::states::PSD_TOL;
    let dims: Vec<usize> = (2..=epr_core::surrogate::MAX_DIM).step_by(2).collect();
    let mut r = VerificationReport::new("verify-all", Some(spec.clone()), Some(seed));
    r.push(checks::kernel_battery(spec, &st, seed, KERNEL_BATTERIES, KERNEL_POINTS, tol)?);
    r.push(checks::uniqueness_battery(spec, &st, seed, UNIQUENESS_MONOMIALS)?);
    r.push(checks::multiplicativity_battery(spec, &st, seed, PAIRS)?);
    r.push(checks::traciality_battery(spec, &st, seed, PAIRS)?);
    r.push(checks::collinearity_battery(spec, &st, seed, PAIRS)?);
    r.push(checks::gram_orthonormality(spec, &st, seed, 2 * FRAME_SIZE)?);
    r.push(checks::gram_form_battery(spec, &st, seed, PAIRS)?);
    r.push(checks::bell_family(spec, &st, seed)?);
    r.push(checks::surrogate_model(16)?);
    r.push(checks::correlation_grid(2)?);
    r.push(checks::surrogate_chsh(&dims)?);
    r.push(checks::surrogate_doubles(&[2, 4, 8], seed, DOUBLE_SAMPLES)?);
    r.push(checks::weyl_doubles(spec, &st, seed, PAIRS)?);
    Ok(r)
}

fn finish(report: &VerificationReport, out: Option<&Path>) -> Result<u8> {
    let text = report.to_json();
    match out {
        Some(path) => fs::write(path, &text).map_err(|source| CliError::Write { path: path.to_path_buf(), source })?,
        None => print!("{text}"),
    }
    if report.pass {
        eprintln!("{}: pass", report.command);
        Ok(exit::PASS)
    } else {
        eprintln!("{}: FAIL: {}", report.command, report.failing().join(", "));
        Ok(exit::FAIL)
    }
}

/// `x` with 15 significant digits.
pub fn sig15(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{:.14}", x.abs());
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (14 - mag).clamp(0, 30) as usize;
    format!("{x:.decimals$}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig15(1f64.cos()), "0.540302305868140");
        assert_eq!(sig15(1.0), "1.00000000000000");
        assert_eq!(sig15(0.0), "0.00000000000000");
        assert_eq!(sig15(-0.0), "0.00000000000000");
        assert_eq!(sig15(-123.456), "-123.456000000000");
        assert_eq!(sig15(2.5e-3), "0.00250000000000000");
    }
}
