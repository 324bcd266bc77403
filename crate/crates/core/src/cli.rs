//! Command-line front end.
//!
//! Exit statuses: 0 on success, 2 for usage errors, 1 for runtime failures.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use thiserror::Error;

use crate::adaption::AdaptionConfig;
use crate::harness::{run_all, ExperimentConfig, FidelityCurve, Strategy};
use crate::output::{emit_csv, emit_json, emit_runs_csv, OutputDocument};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Simulation(#[from] crate::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Adaptive,
    Random,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Adaptive => Strategy::Adaptive,
            StrategyArg::Random => Strategy::Random,
        }
    }
}

/// Monte Carlo fidelity curves for adaptive and random single-copy qudit
/// estimation.
#[derive(Debug, Parser)]
#[command(name = "qudit-tomo", version, about, allow_negative_numbers = true)]
struct Args {
    /// Hilbert space dimension d
    #[arg(long = "dim", default_value_t = 2, value_parser = clap::value_parser!(u64).range(2..))]
    dim: u64,

    /// Measurements (copies) per run
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(1..))]
    copies: u64,

    /// Independent runs to average
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    runs: u64,

    #[arg(long, value_enum, default_value_t = StrategyArg::Adaptive)]
    strategy: StrategyArg,

    /// Master seed for all random streams
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Random restarts of the basis search per adaption
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
    restarts: u64,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Output file (stdout if omitted)
    #[arg(long)]
    out: Option<PathBuf>,

    /// Also write per-run fidelity traces as CSV to this file
    #[arg(long = "dump-runs")]
    dump_runs: Option<PathBuf>,
}

/// A parsed command line.
#[derive(Clone, Debug, PartialEq)]
pub struct Invocation {
    pub config: ExperimentConfig,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub dump_runs: Option<PathBuf>,
}

/// Parses flags (without the program name).
pub fn parse_config<I, T>(argv: I) -> Result<Invocation, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv =
        std::iter::once(OsString::from("qudit-tomo")).chain(argv.into_iter().map(Into::into));
    let args = Args::try_parse_from(argv)?;
    let config = ExperimentConfig {
        dimension: args.dim as usize,
        copies: args.copies as usize,
        runs: args.runs as usize,
        strategy: args.strategy.into(),
        master_seed: args.seed,
        adaption: AdaptionConfig {
            restarts: args.restarts as usize,
            ..AdaptionConfig::default()
        },
    };
    Ok(Invocation {
        config,
        format: args.format,
        out: args.out,
        dump_runs: args.dump_runs,
    })
}

fn write_to(
    path: Option<&PathBuf>,
    f: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> io::Result<()> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            f(&mut w)?;
            w.flush()
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock)
        }
    }
}

/// Runs the campaign and writes every requested artifact.
pub fn execute(inv: &Invocation) -> Result<(), CliError> {
    let runs = run_all(&inv.config)?;
    let curve = FidelityCurve::from_runs(&runs, inv.config.dimension);
    let doc = OutputDocument::new(inv.config.clone(), curve);

    write_to(inv.out.as_ref(), |w| match inv.format {
        Format::Csv => emit_csv(&doc, w),
        Format::Json => emit_json(&doc, w),
    })?;
    if let Some(path) = &inv.dump_runs {
        write_to(Some(path), |w| emit_runs_csv(&runs, w))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::error::ErrorKind;

    #[test]
    fn explicit_flags() {
        let inv = parse_config([
            "--dim",
            "6",
            "--copies",
            "50",
            "--runs",
            "1000",
            "--strategy",
            "adaptive",
            "--seed",
            "42",
        ])
        .unwrap();
        assert_eq!(inv.config.dimension, 6);
        assert_eq!(inv.config.copies, 50);
        assert_eq!(inv.config.runs, 1000);
        assert_eq!(inv.config.strategy, Strategy::Adaptive);
        assert_eq!(inv.config.master_seed, 42);
    }

    #[test]
    fn defaults() {
        let inv = parse_config(Vec::<String>::new()).unwrap();
        assert_eq!(inv.config, ExperimentConfig::default());
        assert_eq!(inv.config.adaption.restarts, 8);
        assert_eq!(inv.format, Format::Csv);
        assert!(inv.out.is_none());
        assert!(inv.dump_runs.is_none());
    }

    #[test]
    fn usage_errors_name_the_flag() {
        for (argv, flag) in [
            (vec!["--dim", "1"], "--dim"),
            (vec!["--copies", "0"], "--copies"),
            (vec!["--runs", "0"], "--runs"),
            (vec!["--dim", "six"], "--dim"),
            (vec!["--strategy", "mub"], "--strategy"),
            (vec!["--restarts", "0"], "--restarts"),
        ] {
            let err = parse_config(argv).unwrap_err();
            assert_eq!(err.exit_code(), 2);
            assert!(err.to_string().contains(flag), "{err}");
        }
        let err = parse_config(["--bogus"]).unwrap_err();
        assert_eq!(err.kind(), ErrorKind::UnknownArgument);
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("--bogus"));
    }

    #[test]
    fn random_strategy_and_json() {
        let inv = parse_config([
            "--strategy",
            "random",
            "--format",
            "json",
            "--restarts",
            "3",
        ])
        .unwrap();
        assert_eq!(inv.config.strategy, Strategy::Random);
        assert_eq!(inv.format, Format::Json);
        assert_eq!(inv.config.adaption.restarts, 3);
    }
}
