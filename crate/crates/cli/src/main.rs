//! `tunneltime` experiment runner.
//!
//! Exit codes: 0 ok, 1 invalid configuration, 2 numerical failure,
//! 3 partial success (some sweep points failed).

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use tunneltime::experiment::{self, gnuplot_script, write_rows, write_trace, ExperimentConfig, ExperimentKind};

/// Thread count override for the sweep pool.
const THREADS_ENV: &str = "TUNNELTIME_THREADS";

const EXIT_INVALID: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_PARTIAL: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "tunneltime",
    version,
    about = "Tunneling phase times for a rectangular barrier"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Peak arrival time and transit velocity against barrier width
    Table1(RunArgs),
    /// Transit velocity curves for several barrier heights
    Fig1(RunArgs),
    /// Standard, moment and numerical times against barrier height
    Fig2(RunArgs),
    /// One configuration, optionally with the exit density trace
    Single(RunArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Config file of `key = value` lines
    #[arg(long)]
    config: Option<PathBuf>,
    /// k_M L values, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    lambda: Option<Vec<f64>>,
    /// sqrt(V0/E_M) values, comma separated
    #[arg(long = "w-ratio", value_delimiter = ',', allow_hyphen_values = true)]
    w_ratio: Option<Vec<f64>>,
    /// Spectrum centre k0/k_M
    #[arg(long, allow_hyphen_values = true)]
    kappa0: Option<f64>,
    /// Spectrum width parameter
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    /// CSV destination (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the exit density trace (single only)
    #[arg(long)]
    trace: bool,
    /// Write a gnuplot script for the CSV here
    #[arg(long)]
    plot: Option<PathBuf>,
}

impl Command {
    fn split(self) -> (ExperimentKind, RunArgs) {
        match self {
            Command::Table1(a) => (ExperimentKind::Table1, a),
            Command::Fig1(a) => (ExperimentKind::Fig1, a),
            Command::Fig2(a) => (ExperimentKind::Fig2, a),
            Command::Single(a) => (ExperimentKind::Single, a),
        }
    }
}

struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn invalid(error: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: EXIT_INVALID,
        error: error.into(),
    }
}

fn from_lib(error: tunneltime::Error) -> Failure {
    let code = if error.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_INVALID
    };
    Failure {
        code,
        error: error.into(),
    }
}

fn build_config(kind: ExperimentKind, args: RunArgs) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))
                .map_err(invalid)?;
            ExperimentConfig::parse(kind, &text)
                .with_context(|| format!("in {}", path.display()))
                .map_err(invalid)?
        }
        None => ExperimentConfig::defaults(kind),
    };
    if let Some(l) = args.lambda {
        cfg.lambda = l;
    }
    if let Some(w) = args.w_ratio {
        cfg.w = w;
    }
    if let Some(k) = args.kappa0 {
        cfg.kappa0 = k;
    }
    if let Some(d) = args.delta {
        cfg.delta = d;
    }
    if args.out.is_some() {
        cfg.out = args.out;
    }
    if args.trace {
        cfg.trace = true;
    }
    if args.plot.is_some() {
        cfg.plot = args.plot;
    }
    if cfg.trace && kind != ExperimentKind::Single {
        return Err(invalid(anyhow::anyhow!("--trace is only available for `single`")));
    }
    if cfg.plot.is_some() && cfg.out.is_none() {
        return Err(invalid(anyhow::anyhow!(
            "a plot script needs --out so it can refer to the data"
        )));
    }
    cfg.validate().map_err(from_lib)?;
    Ok(cfg)
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| invalid(anyhow::anyhow!("{THREADS_ENV} must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring thread pool")
        .map_err(invalid)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(invalid)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    configure_threads()?;
    let (kind, args) = cli.command.split();
    let cfg = build_config(kind, args)?;
    let (sweep, trace) = experiment::run(&cfg).map_err(from_lib)?;

    let mut csv = Vec::new();
    write_rows(&mut csv, &sweep.rows).map_err(from_lib)?;
    match &cfg.out {
        Some(path) => write_file(path, &csv)?,
        None => io::stdout()
            .write_all(&csv)
            .context("writing stdout")
            .map_err(invalid)?,
    }
    if let Some(trace) = trace {
        let mut buf = Vec::new();
        write_trace(&mut buf, &trace).map_err(from_lib)?;
        write_file(&cfg.trace_path(), &buf)?;
    }
    if let (Some(plot), Some(out)) = (&cfg.plot, &cfg.out) {
        let script = gnuplot_script(&cfg, &out.display().to_string());
        write_file(plot, script.as_bytes())?;
    }

    for row in sweep.rows.iter().filter(|r| r.is_failure()) {
        eprintln!("lambda = {}, w = {}: {}", row.lambda, row.w, row.note);
    }
    Ok(if sweep.failures == 0 {
        0
    } else if sweep.all_failed() {
        EXIT_NUMERICAL
    } else {
        EXIT_PARTIAL
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
