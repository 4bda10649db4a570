//! Command-line front end: coefficient export, partial sums, distances,
//! L-values, zeros and the verification checks.

// `!(x > 0.0)` guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod criteria;
pub mod output;

use clap::{Parser, Subcommand};
use commands::{CoeffKind, SumsArgs, VerifyArgs};
use config::{ConfigArgs, ConfigError, RunConfig};
use cuspsum_core::verify::CheckArgs;
use cuspsum_core::Error as CoreError;
use std::ffi::OsString;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "cuspsum", version, about = "Partial sums and L-functions of level-1 cusp forms")]
pub struct Cli {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fourier coefficients of the eigenform
    Coeffs {
        #[arg(long, value_enum, default_value = "a")]
        what: CoeffKind,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// S(x, f, phi) at one x or on a log grid up to --x-max
    Sums {
        #[arg(long)]
        x: Option<f64>,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        phi: f64,
        #[arg(long = "x-max")]
        x_max: Option<f64>,
        #[arg(long, default_value_t = 50)]
        points: usize,
        /// Adds |S|/x^e and its running maximum
        #[arg(long)]
        exponent: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Squared pretentious distance to n^{it} up to x
    Distance {
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        t: f64,
        #[arg(long)]
        x: f64,
        /// eigenform, one or mobius
        #[arg(long, default_value = "eigenform")]
        function: String,
        /// Include every prime term in JSON output
        #[arg(long)]
        terms: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The maximizing twist phi at scale x
    Phi {
        #[arg(long)]
        x: f64,
        #[arg(long, default_value = "eigenform")]
        function: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// L(sigma + it, f)
    Lvalue {
        #[arg(long, allow_negative_numbers = true)]
        sigma: f64,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        /// auto, dirichlet, afe or euler
        #[arg(long, default_value = "auto")]
        method: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Zeros on the critical line up to --tmax
    Zeros {
        #[arg(long)]
        tmax: Option<f64>,
        /// Reference table to match against
        #[arg(long)]
        compare: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One verification check, or its sweep with --grid
    Verify {
        /// plancherel, lemma21, explicit, prop43, theorem1, cor12 or lemma41
        check: String,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long = "T")]
        big_t: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        phi: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        t: Option<f64>,
        #[arg(long)]
        y0: Option<f64>,
        #[arg(long)]
        x: Option<f64>,
        #[arg(long = "L")]
        big_l: Option<f64>,
        #[arg(long)]
        radius: Option<f64>,
        /// Run the sweep over the configured grids
        #[arg(long)]
        grid: bool,
        /// T values of the plancherel sweep
        #[arg(long = "T-grid", default_value = "0.5,1")]
        t_values: String,
        /// phi values of the plancherel sweep
        #[arg(long = "phi-grid", default_value = "0,1.5")]
        phi_values: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Every acceptance criterion, with artifacts and a summary table
    ReportAll,
}

/// Exit status of an error: 1 for configuration problems, 2 otherwise.
pub fn exit_code(e: &anyhow::Error) -> i32 {
    for cause in e.chain() {
        if cause.downcast_ref::<ConfigError>().is_some() {
            return 1;
        }
        if let Some(ce) = cause.downcast_ref::<CoreError>() {
            return match ce {
                CoreError::InvalidArgument(_)
                | CoreError::UnknownCheck(_)
                | CoreError::UnknownEvaluator(_)
                | CoreError::InsufficientCoefficients { .. }
                | CoreError::UnsupportedWeight(_)
                | CoreError::UnsupportedEisensteinWeight(_)
                | CoreError::OutsideAbsoluteConvergence(_)
                | CoreError::WeightMismatch { .. }
                | CoreError::Parse { .. } => 1,
                _ => 2,
            };
        }
    }
    2
}

fn dispatch(cfg: &RunConfig, command: Command) -> anyhow::Result<i32> {
    match command {
        Command::Coeffs { what, out } => commands::coeffs(cfg, what, out.as_deref())?,
        Command::Sums {
            x,
            phi,
            x_max,
            points,
            exponent,
            out,
        } => commands::sums(
            cfg,
            &SumsArgs {
                x,
                phi,
                x_max,
                points,
                exponent,
            },
            out.as_deref(),
        )?,
        Command::Distance {
            t,
            x,
            function,
            terms,
            out,
        } => commands::distance(cfg, t, x, &function, terms, out.as_deref())?,
        Command::Phi { x, function, out } => commands::phi(cfg, x, &function, out.as_deref())?,
        Command::Lvalue { sigma, t, method, out } => commands::lvalue(cfg, sigma, t, &method, out.as_deref())?,
        Command::Zeros { tmax, compare, tol, out } => {
            commands::zeros(cfg, tmax, compare.as_deref(), tol, out.as_deref())?
        }
        Command::Verify {
            check,
            gamma,
            big_t,
            phi,
            t,
            y0,
            x,
            big_l,
            radius,
            grid,
            t_values,
            phi_values,
            out,
        } => {
            let values: CheckArgs = [
                ("gamma", gamma),
                ("T", big_t),
                ("phi", phi),
                ("t", t),
                ("y0", y0),
                ("x", x),
                ("L", big_l),
                ("radius", radius),
            ]
            .into_iter()
            .filter_map(|(k, v)| v.map(|v| (k.to_string(), v)))
            .collect();
            let args = VerifyArgs {
                check,
                values,
                grid,
                t_values,
                phi_values,
            };
            commands::verify(cfg, &args, out.as_deref())?
        }
        Command::ReportAll => {
            let mut cfg = cfg.clone();
            if cfg.cache_dir.is_none() {
                cfg.cache_dir = Some(cfg.out_dir.join("cache"));
            }
            let summary = criteria::report_all(&cfg)?;
            print!("{}", criteria::summary_table(&summary));
            return Ok(if summary.all_pass() { 0 } else { 2 });
        }
    }
    Ok(0)
}

/// Parses `argv`, runs the command and returns the exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let cfg = match RunConfig::resolve(&cli.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("cuspsum: {e:#}");
            return exit_code(&e);
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cfg.threads {
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("cuspsum: worker pool: {e}");
            return 2;
        }
    };
    match pool.install(|| dispatch(&cfg, cli.command)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("cuspsum: {e:#}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["cuspsum", "--bogus"]), 1);
        assert_eq!(run(["cuspsum", "--help"]), 0);
        let e: anyhow::Error = CoreError::UnknownCheck("x".into()).into();
        assert_eq!(exit_code(&e), 1);
        let e: anyhow::Error = CoreError::Checksum.into();
        assert_eq!(exit_code(&e), 2);
        let e: anyhow::Error = ConfigError("bad".into()).into();
        assert_eq!(exit_code(&e.context("while reading")), 1);
    }
}
