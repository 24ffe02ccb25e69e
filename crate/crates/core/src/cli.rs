//! Command-line front end. Parsing and dispatch only; all behavior lives in
//! [`crate::harness`].

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::harness::output::{write_per_slot, write_run_summary, write_sweep_summary};
use crate::harness::verify::run_verification;
use crate::harness::{sweep, synthetic_trace, ExperimentConfig, TraceSource};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_TRACE: i32 = 4;
pub const EXIT_VERIFY: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "edgeplacer", version, about = "Edge service placement simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one experiment and write its summary CSV.
    Run(ExperimentArgs),
    /// Run the config's sweep and write one CSV row per (value, policy).
    Sweep(ExperimentArgs),
    /// Check the frame solver and online policy against exhaustive oracles.
    Verify(VerifyArgs),
    /// Write a synthetic `slot,region` trace.
    GenTrace(GenTraceArgs),
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// Output CSV; stdout when omitted and the config names no output.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Override a config field, e.g. `--set policy.v=900`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Also write `<out stem>.slots.csv` with per-slot records.
    #[arg(long)]
    pub per_slot: bool,
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub instances: usize,
}

#[derive(Debug, Args)]
pub struct GenTraceArgs {
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
    /// Take region count, length and stickiness from this config.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
    #[arg(long)]
    pub regions: Option<usize>,
    #[arg(long)]
    pub length: Option<usize>,
    #[arg(long)]
    pub stickiness: Option<f64>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Lib(Error),
    Verify(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Lib(e.into())
    }
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Verify(_) => EXIT_VERIFY,
            CliError::Lib(e) if e.is_config() => EXIT_CONFIG,
            CliError::Lib(e) if e.is_trace() => EXIT_TRACE,
            CliError::Lib(_) => EXIT_FAILURE,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Verify(m) => f.write_str(m),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

/// Parses `args` (program name first) and executes; returns the process exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(stderr, "{e}") } else { write!(stdout, "{e}") };
            return code;
        }
    };
    match execute(cli.command, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.code()
        }
    }
}

fn load_config(args: &ExperimentArgs) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    for kv in &args.overrides {
        let (key, value) =
            kv.split_once('=').ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        cfg.apply_override(key.trim(), value.trim())?;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn output_target(args: &ExperimentArgs, cfg: &ExperimentConfig) -> Option<PathBuf> {
    args.out.clone().or_else(|| {
        cfg.output.as_ref().map(|p| match &cfg.base_dir {
            Some(dir) if p.is_relative() => dir.join(p),
            _ => p.clone(),
        })
    })
}

/// `results/run.csv` -> `results/run.slots.csv`.
pub fn per_slot_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.slots.csv"))
}

fn with_output(
    target: Option<&Path>,
    stdout: &mut dyn Write,
    f: impl FnOnce(&mut dyn Write) -> crate::Result<()>,
) -> Result<(), CliError> {
    match target {
        Some(path) => {
            let file = File::create(path).map_err(|e| {
                CliError::Lib(Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
            })?;
            let mut w = BufWriter::new(file);
            f(&mut w)?;
            w.flush()?;
        }
        None => f(stdout)?,
    }
    Ok(())
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Run(args) => {
            let cfg = load_config(&args)?;
            let target = output_target(&args, &cfg);
            if args.per_slot && target.is_none() {
                return Err(CliError::Usage("--per-slot requires --out".into()));
            }
            let rec = cfg.run()?;
            with_output(target.as_deref(), stdout, |w| write_run_summary(w, &rec))?;
            if let (true, Some(out)) = (args.per_slot, target.as_deref()) {
                with_output(Some(&per_slot_path(out)), stdout, |w| write_per_slot(w, &rec))?;
            }
            Ok(())
        }
        Command::Sweep(args) => {
            let cfg = load_config(&args)?;
            if args.per_slot {
                return Err(CliError::Usage("--per-slot is only supported by `run`".into()));
            }
            let target = output_target(&args, &cfg);
            let points = sweep(&cfg)?;
            with_output(target.as_deref(), stdout, |w| write_sweep_summary(w, &points))
        }
        Command::Verify(args) => {
            let report = run_verification(args.seed, args.instances)?;
            for line in report.lines() {
                writeln!(stdout, "{line}")?;
            }
            if report.passed() {
                Ok(())
            } else {
                Err(CliError::Verify("oracle verification failed".into()))
            }
        }
        Command::GenTrace(args) => {
            let (mut regions, mut length, mut stickiness, mut seed) = (6, 1400, 0.5, 1);
            if let Some(path) = &args.config {
                let cfg = ExperimentConfig::load(path)?;
                let params = cfg.scenario_params()?;
                regions = params.node_count;
                length = params.horizon;
                seed = cfg.seed;
                if let TraceSource::Synthetic { stickiness: s, .. } = cfg.trace {
                    stickiness = s;
                }
            }
            regions = args.regions.unwrap_or(regions);
            length = args.length.unwrap_or(length);
            stickiness = args.stickiness.unwrap_or(stickiness);
            seed = args.seed.unwrap_or(seed);
            let trace = synthetic_trace(seed, regions, length, stickiness)?;
            with_output(Some(&args.out), stdout, |w| trace.write_csv(w))
        }
    }
}
