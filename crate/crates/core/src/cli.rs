//! Command-line front end.

use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::gf::FieldCtx;
use crate::harness;
use crate::oracle::Mode;
use crate::selftest;
use crate::solver::{Backend, SolverConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "hidden-borel", version, about = "Simulate and solve the hidden Borel subgroup problem over finite fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate random instances and solve them.
    Solve(RunArgs),
    /// Solve instances over an (n, q) grid and compare round counts with the prediction.
    Sweep(SweepArgs),
    /// Dump the exact outcome law of one random coset state.
    ExactDist(RunArgs),
    /// Run the invariant suite.
    Selftest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Gl,
    Sl,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Gl => Mode::Gl,
            ModeArg::Sl => Mode::Sl,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Exact,
    Brute,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Exact => Backend::Exact,
            BackendArg::Brute => Backend::Brute,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Field characteristic.
    #[arg(long, default_value_t = 3)]
    pub p: u64,
    /// Extension degree.
    #[arg(long, default_value_t = 1)]
    pub r: u32,
    /// Matrix size.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Gl)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
    /// Guess rounds allowed per level (default: 50 d (q/(q-1))^{2n}).
    #[arg(long)]
    pub max_rounds: Option<u64>,
    #[arg(long, value_enum, default_value_t = BackendArg::Exact)]
    pub backend: BackendArg,
    /// Output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Matrix sizes in the grid.
    #[arg(long, value_delimiter = ',', default_value = "2,3")]
    pub ns: Vec<usize>,
    /// Field orders in the grid.
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,5")]
    pub qs: Vec<u64>,
}

impl RunArgs {
    fn validate(&self) -> anyhow::Result<()> {
        if self.n == 0 {
            bail!("--n must be at least 1");
        }
        if self.trials == 0 {
            bail!("--trials must be at least 1");
        }
        if self.max_rounds == Some(0) {
            bail!("--max-rounds must be at least 1");
        }
        Ok(())
    }

    fn solver_config(&self) -> SolverConfig {
        SolverConfig { max_rounds: self.max_rounds, seed: self.seed, backend: self.backend.into() }
    }
}

/// Error that should map to the usage exit code.
#[derive(Debug)]
struct Usage(anyhow::Error);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for Usage {}

fn usage<T>(r: anyhow::Result<T>) -> anyhow::Result<T> {
    r.map_err(|e| anyhow::Error::new(Usage(e)))
}

fn emit(out: &Option<PathBuf>, bytes: &[u8]) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn cmd_solve(args: &RunArgs) -> anyhow::Result<i32> {
    usage(args.validate())?;
    let field = usage(FieldCtx::new(args.p, args.r).map_err(Into::into))?;
    let mode: Mode = args.mode.into();
    let trials = harness::run_trials(&field, args.n, mode, args.seed, args.trials, &args.solver_config())?;
    let summary = harness::summarize(&field, args.n, mode, args.seed, &trials)?;
    let mut buf = Vec::new();
    match args.format {
        Format::Csv => harness::write_solve_csv(&mut buf, args.seed, &trials)?,
        Format::Json => harness::write_solve_json(&mut buf, &summary, &trials)?,
    }
    emit(&args.out, &buf)?;
    eprintln!(
        "success_rate={:.4} mean_rounds={:.3} mean_queries={:.3} predicted_rounds={:.3}",
        summary.success_rate, summary.mean_rounds, summary.mean_queries, summary.predicted_rounds
    );
    Ok(if summary.successes == summary.trials { EXIT_OK } else { EXIT_FAILURE })
}

fn cmd_sweep(args: &SweepArgs) -> anyhow::Result<i32> {
    usage(args.run.validate())?;
    if args.ns.iter().any(|&n| n < 2) {
        usage(Err(anyhow::anyhow!("sweep sizes must be at least 2")))?;
    }
    for &q in &args.qs {
        usage(FieldCtx::of_order(q).map_err(|e| anyhow::anyhow!("q={q}: {e}")))?;
    }
    let run = &args.run;
    let rows = harness::sweep(&args.ns, &args.qs, run.mode.into(), run.seed, run.trials, &run.solver_config())?;
    let mut buf = Vec::new();
    match run.format {
        Format::Csv => harness::write_sweep_csv(&mut buf, &rows)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut buf, &rows)?;
            buf.push(b'\n');
        }
    }
    emit(&run.out, &buf)?;
    Ok(if rows.iter().all(|r| r.success_rate == 1.0) { EXIT_OK } else { EXIT_FAILURE })
}

fn cmd_exact_dist(args: &RunArgs) -> anyhow::Result<i32> {
    usage(args.validate())?;
    if args.mode == ModeArg::Sl {
        usage(Err(anyhow::anyhow!("exact-dist supports --mode gl only")))?;
    }
    let field = usage(FieldCtx::new(args.p, args.r).map_err(Into::into))?;
    let dump = usage(harness::exact_dist(&field, args.n, args.seed))?;
    let mut buf = Vec::new();
    match args.format {
        Format::Csv => harness::write_exact_dist_csv(&mut buf, &dump)?,
        Format::Json => harness::write_exact_dist_json(&mut buf, &dump)?,
    }
    emit(&args.out, &buf)?;
    Ok(EXIT_OK)
}

fn cmd_selftest() -> anyhow::Result<i32> {
    let outcomes = selftest::run_all();
    print!("{}", selftest::render_table(&outcomes));
    Ok(if outcomes.iter().all(|o| o.result.is_ok()) { EXIT_OK } else { EXIT_FAILURE })
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match &cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::ExactDist(args) => cmd_exact_dist(args),
        Command::Selftest => cmd_selftest(),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.downcast_ref::<Usage>().is_some() {
                EXIT_USAGE
            } else {
                EXIT_FAILURE
            }
        }
    }
}

/// Parses `args` and runs; clap usage errors exit with [`EXIT_USAGE`].
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(err) => {
            let code = if err.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = err.print();
            code
        }
    }
}
