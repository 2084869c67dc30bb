//! Command-line front end: `generate`, `analyze`, `sweep`, `chsh`, `selftest`.
//!
//! Exit codes: 0 success, 1 usage or configuration error or a failed
//! statistical battery / check, 2 I/O, format or integrity errors.

pub mod commands;
pub mod config;
pub mod report;
pub mod selftest;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use commands::{cmd_analyze, cmd_chsh, cmd_generate, cmd_sweep, sweep_csv, write_json, ChshConfig, SweepConfig};
use config::{PayloadFormat, ProtocolArgs, DEFAULT_BLOCK_SIZE};

#[derive(Parser, Debug)]
#[command(name = "beamsplit", version, about = "Quantum random bit generation by simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a protocol and write payload, sidecar and report.
    Generate {
        #[command(flatten)]
        args: ProtocolArgs,
        /// Payload path; `<out>.meta.json` and `<out>.report.json` are written next to it.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "raw")]
        format: PayloadFormat,
    },
    /// Verify a stored stream against its sidecar and run the full battery.
    Analyze {
        path: PathBuf,
        #[arg(long, default_value_t = crate::statkit::DEFAULT_SIGNIFICANCE)]
        significance: f64,
        /// Also write the report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// XOR bias over a grid of relative angles and detector biases (spin-1/2).
    Sweep {
        /// Relative angles in degrees, comma separated.
        #[arg(long, default_value = "0,30,60,90,120,150,180", allow_hyphen_values = true)]
        angles: String,
        /// Marginal detector biases, comma separated.
        #[arg(long, default_value = "0,0.05")]
        biases: String,
        #[arg(long, default_value_t = 0.0)]
        no_click_prob: f64,
        /// Pairs per grid cell.
        #[arg(long)]
        events: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_BLOCK_SIZE)]
        block_size: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: TableFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate the CHSH value of spin-1/2 singlets.
    Chsh {
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, default_value_t = 90.0, allow_negative_numbers = true)]
        alpha_prime: f64,
        #[arg(long, default_value_t = 45.0, allow_negative_numbers = true)]
        beta: f64,
        #[arg(long, default_value_t = 135.0, allow_negative_numbers = true)]
        beta_prime: f64,
        /// Trials per setting pair.
        #[arg(long)]
        events: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 3.0)]
        sigmas: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reduced-size invariant checks.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Sample size multiplier.
        #[arg(long, default_value_t = 1)]
        scale: u64,
    },
}

fn parse_list(field: &str, s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Error::config(field, format!("bad number `{t}`"))))
        .collect()
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) | Error::Integrity(_) | Error::Format(_) | Error::Json(_) => 2,
        _ => 1,
    }
}

fn execute(command: Command) -> Result<i32> {
    match command {
        Command::Generate { args, out, format } => {
            let cfg = args.resolve(format, Some(out))?;
            let report = cmd_generate(&cfg)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(0)
        }
        Command::Analyze {
            path,
            significance,
            report,
        } => {
            let doc = cmd_analyze(&path, significance)?;
            println!("{}", write_json(report.as_ref(), &doc)?);
            Ok(if doc.suite.as_ref().is_some_and(|s| s.overall) {
                0
            } else {
                1
            })
        }
        Command::Sweep {
            angles,
            biases,
            no_click_prob,
            events,
            seed,
            block_size,
            workers,
            format,
            out,
        } => {
            if block_size == 0 {
                return Err(Error::config("block-size", "must be at least 1"));
            }
            if workers == 0 {
                return Err(Error::config("workers", "must be at least 1"));
            }
            let cfg = SweepConfig {
                angles_deg: parse_list("angles", &angles)?,
                biases: parse_list("biases", &biases)?,
                no_click_prob,
                events,
                seed,
                block_size,
                workers,
            };
            let rows = cmd_sweep(&cfg)?;
            let text = match format {
                TableFormat::Csv => sweep_csv(&rows),
                TableFormat::Json => serde_json::to_string_pretty(&rows)?,
            };
            if let Some(p) = out {
                std::fs::write(p, &text)?;
            }
            print!("{text}");
            Ok(0)
        }
        Command::Chsh {
            alpha,
            alpha_prime,
            beta,
            beta_prime,
            events,
            seed,
            sigmas,
            out,
        } => {
            let cfg = ChshConfig {
                alpha_deg: alpha,
                alpha_prime_deg: alpha_prime,
                beta_deg: beta,
                beta_prime_deg: beta_prime,
                events,
                seed,
                sigmas,
            };
            let doc = cmd_chsh(&cfg)?;
            println!("{}", write_json(out.as_ref(), &doc)?);
            Ok(0)
        }
        Command::Selftest { seed, scale } => {
            let results = selftest::run_selftest(seed, scale)?;
            let mut ok = true;
            for r in &results {
                ok &= r.passed;
                println!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
            }
            Ok(if ok { 0 } else { 1 })
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
