//! Argument parsing and dispatch.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use streamcount::analysis::XiQuadrature;

use crate::commands::{self, ConstantOptions, ConstantTarget, CountOptions, SampleOptions};
use crate::config::{Algorithm, RunConfig};
use crate::simulate::{self, Scenario, SimulateConfig};
use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "streamcount", version, about = "Probabilistic counting, cardinality estimation and distinct sampling")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct AlgoArgs {
    /// Defaults to pcsa for `count` and adaptive for `sample`.
    #[arg(long = "algo", value_enum)]
    pub algorithm: Option<Algorithm>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// PCSA substreams (power of two) or adaptive cache capacity.
    #[arg(long)]
    pub m: Option<usize>,
    /// log2 of the PCSA substream count.
    #[arg(long)]
    pub k: Option<u32>,
    /// Base of the morris-q counter.
    #[arg(long)]
    pub q: Option<f64>,
    /// Significand bits of the morris-fp counter.
    #[arg(long)]
    pub d: Option<u32>,
}

impl AlgoArgs {
    fn config(&self, default: Algorithm) -> RunConfig {
        RunConfig {
            algorithm: self.algorithm.unwrap_or(default),
            seed: self.seed,
            m: self.m,
            k: self.k,
            q: self.q,
            d: self.d,
        }
    }
}

#[derive(Debug, Args)]
pub struct IoArgs {
    /// Newline-delimited tokens; standard input when omitted.
    pub input: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the count (counters) or cardinality (sketches) of a token stream.
    Count {
        #[command(flatten)]
        algo: AlgoArgs,
        #[command(flatten)]
        io: IoArgs,
        /// Also print internal state.
        #[arg(long, short)]
        verbose: bool,
        /// Write the final sketch or sample in binary form.
        #[arg(long)]
        save: Option<PathBuf>,
    },
    /// Run seeded Monte Carlo experiments and emit CSV.
    Simulate {
        #[arg(value_enum)]
        scenario: Scenario,
        #[arg(long = "algo", value_enum)]
        algorithm: Option<Algorithm>,
        /// Distinct elements, or increments for counters.
        #[arg(long, default_value_t = 10_000)]
        n: u64,
        #[arg(long, default_value_t = 100)]
        runs: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        k: Option<u32>,
        /// Counter bases (morris-variance); repeatable.
        #[arg(long)]
        q: Vec<f64>,
        /// Significand widths (morris-variance); repeatable.
        #[arg(long)]
        d: Vec<u32>,
        /// Checkpoint spacing for the distortion scenario.
        #[arg(long, default_value_t = 64)]
        step: u64,
        /// Occurrences of each synthetic element.
        #[arg(long, default_value_t = 1)]
        dup: u64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Compute the bias-correction constant by product and integral routes.
    Constants {
        #[arg(value_enum, default_value = "all")]
        target: ConstantTarget,
        /// Factors of the grouped product.
        #[arg(long, default_value_t = 1 << 16)]
        terms: u64,
        /// Factors of the ungrouped product.
        #[arg(long, default_value_t = 1 << 24)]
        slow_terms: u64,
        /// Upper limit of the integral.
        #[arg(long, default_value_t = 50.0)]
        max_x: f64,
        /// Absolute tolerance of the integral.
        #[arg(long, default_value_t = 1e-12)]
        tolerance: f64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Emit an adaptive distinct sample with frequencies and class fractions.
    Sample {
        #[command(flatten)]
        algo: AlgoArgs,
        #[command(flatten)]
        io: IoArgs,
        /// Mice are elements seen at most this many times.
        #[arg(long, default_value_t = 1)]
        mice_max: u64,
        /// Elephants are elements seen more than this many times.
        #[arg(long, default_value_t = 10)]
        elephant_min: u64,
    },
    /// Merge saved sketches or samples and print the merged estimate.
    Merge {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Write the merged file.
        #[arg(long)]
        save: Option<PathBuf>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

fn open_output(path: Option<&PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn with_input<T>(path: Option<&PathBuf>, f: impl FnOnce(&mut dyn io::BufRead) -> Result<T, CliError>) -> Result<T, CliError> {
    match path {
        Some(p) => f(&mut BufReader::new(File::open(p)?)),
        None => f(&mut io::stdin().lock()),
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Count { algo, io, verbose, save } => {
            let cfg = algo.config(Algorithm::Pcsa);
            cfg.params()?;
            let opts = CountOptions { verbose, save };
            with_input(io.input.as_ref(), |input| {
                commands::count(&cfg, &opts, input, open_output(io.output.as_ref())?)
            })
        }
        Command::Simulate {
            scenario,
            algorithm,
            n,
            runs,
            seed,
            m,
            k,
            q,
            d,
            step,
            dup,
            output,
        } => {
            let cfg = SimulateConfig {
                scenario,
                algorithm,
                n,
                runs,
                seed,
                m,
                k,
                q,
                d,
                step,
                dup,
            };
            eprintln!("simulating {} ({runs} runs, n = {n})", scenario.name());
            let rows = simulate::simulate(&cfg)?;
            simulate::write_csv(open_output(output.as_ref())?, &rows)
        }
        Command::Constants {
            target,
            terms,
            slow_terms,
            max_x,
            tolerance,
            output,
        } => {
            let opts = ConstantOptions {
                terms,
                slow_terms,
                quadrature: XiQuadrature {
                    max_x,
                    tolerance,
                    ..XiQuadrature::default()
                },
            };
            commands::constants(target, &opts, open_output(output.as_ref())?)
        }
        Command::Sample {
            algo,
            io,
            mice_max,
            elephant_min,
        } => {
            let cfg = algo.config(Algorithm::Adaptive);
            cfg.params()?;
            let opts = SampleOptions { mice_max, elephant_min };
            with_input(io.input.as_ref(), |input| {
                commands::sample(&cfg, &opts, input, open_output(io.output.as_ref())?)
            })
        }
        Command::Merge { inputs, save, output } => {
            commands::merge(&inputs, save.as_deref(), open_output(output.as_ref())?)
        }
    }
}

/// Parses `args` and runs; 0 on success, 1 on usage errors, 2 on I/O errors.
pub fn main<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
