//! Command-line front end. `main` only forwards to [`run`].

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{ArgAction, Args, Parser, Subcommand};

use crate::config::{ConfigOverrides, SimConfig};
use crate::regions::{compute_regions, regions_to_csv};
use crate::report::{complexity_csv, complexity_table, run_complexity};
use crate::run::{records_to_csv, run_simulate, run_verify, VerifyReport};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Tones per sweep point used by the verification pass that precedes `simulate`.
pub const VERIFY_FIRST_TONE_CAP: usize = 1000;

#[derive(Parser, Debug)]
#[command(
    name = "sisodet",
    version,
    about = "Exact max-log-MAP detection for two-layer MIMO"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compare the detector against brute force on random tones.
    Verify(CommonArgs),
    /// Monte-Carlo BER sweep over SNR and prior reliability.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        /// Run `verify` on the same configuration first and stop if it fails.
        #[arg(long, default_value_t = true, action = ArgAction::Set)]
        verify_first: bool,
    },
    /// Dump the decision regions of all four slicer axes.
    Regions {
        #[command(flatten)]
        common: CommonArgs,
        /// 2q a-priori LLRs, first layer then second (default: all zero).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        llrs: Option<Vec<f64>>,
        /// Use this gain for both layers instead of a drawn channel.
        #[arg(long)]
        gain: Option<f64>,
    },
    /// Closed-form operation counts for the three detectors.
    Complexity {
        /// Constellation sizes.
        #[arg(long = "M", value_delimiter = ',', default_value = "256")]
        orders: Vec<usize>,
        #[arg(long, default_value_t = 2)]
        nr: usize,
        /// Write the CSV here; the table always goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Default)]
struct CommonArgs {
    /// Constellation size (4, 16, 64, ...).
    #[arg(long = "M")]
    order: Option<usize>,
    #[arg(long)]
    nr: Option<usize>,
    #[arg(long)]
    nt: Option<usize>,
    /// Comma-separated SNR points in dB.
    #[arg(long = "snr-db", value_delimiter = ',', allow_hyphen_values = true)]
    snr_db: Option<Vec<f64>>,
    /// Comma-separated prior reliabilities.
    #[arg(long, value_delimiter = ',')]
    mu: Option<Vec<f64>>,
    /// Tones per (snr, mu) point.
    #[arg(long)]
    tones: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Noise correlation between receive antennas (0 = white).
    #[arg(long, allow_hyphen_values = true)]
    rho: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// key = value file whose entries override the flags above.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl CommonArgs {
    fn resolve(self) -> Result<SimConfig> {
        let flags = ConfigOverrides {
            order: self.order,
            receive_antennas: self.nr,
            transmit_antennas: self.nt,
            snr_db: self.snr_db,
            mu: self.mu,
            tones: self.tones,
            seed: self.seed,
            rho: self.rho,
            out: self.out,
        };
        let merged = match &self.config {
            Some(path) => flags.merge(ConfigOverrides::from_file(path)?),
            None => flags,
        };
        merged.resolve()
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn report_failure(report: &VerifyReport, out: Option<&Path>) -> Result<()> {
    eprintln!(
        "verify: FAIL (max discrepancy {:e})",
        report.max_discrepancy()
    );
    if let Some(dump) = &report.failure {
        let json = serde_json::to_string_pretty(dump)?;
        eprintln!("offending tone:\n{json}");
        if let Some(path) = out {
            let mut name = path.as_os_str().to_owned();
            name.push(".failure.json");
            std::fs::write(PathBuf::from(name), json)?;
        }
    }
    Ok(())
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Verify(args) => {
            let config = args.resolve()?;
            let report = run_verify(&config)?;
            emit(config.out.as_deref(), &report.to_csv())?;
            if report.passed() {
                eprintln!(
                    "verify: PASS (max discrepancy {:e})",
                    report.max_discrepancy()
                );
                Ok(EXIT_PASS)
            } else {
                report_failure(&report, config.out.as_deref())?;
                Ok(EXIT_VERIFY_FAILED)
            }
        }
        Command::Simulate {
            common,
            verify_first,
        } => {
            let config = common.resolve()?;
            if verify_first {
                let check = SimConfig {
                    tones: config.tones.min(VERIFY_FIRST_TONE_CAP),
                    ..config.clone()
                };
                let report = run_verify(&check)?;
                if !report.passed() {
                    report_failure(&report, config.out.as_deref())?;
                    return Ok(EXIT_VERIFY_FAILED);
                }
            }
            emit(
                config.out.as_deref(),
                &records_to_csv(&run_simulate(&config)?),
            )?;
            Ok(EXIT_PASS)
        }
        Command::Regions { common, llrs, gain } => {
            let config = common.resolve()?;
            let q = config.order.trailing_zeros() as usize;
            let llrs = llrs.unwrap_or_else(|| vec![0.0; 2 * q]);
            emit(
                config.out.as_deref(),
                &regions_to_csv(&compute_regions(&config, &llrs, gain)?),
            )?;
            Ok(EXIT_PASS)
        }
        Command::Complexity { orders, nr, out } => {
            let rows = run_complexity(&orders, nr)?;
            if let Some(path) = &out {
                emit(Some(path), &complexity_csv(&rows))?;
            }
            emit(None, &complexity_table(&rows))?;
            Ok(EXIT_PASS)
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_PASS
            };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_USAGE
        }
    }
}
