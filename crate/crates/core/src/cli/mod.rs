// SPDX-License-Identifier: MIT OR Apache-2.0

//! Command-line front end for the `strongseg` binary.

pub mod bench;
pub mod ingest;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::approx::solve_approx;
use crate::cumulative::{all_dp, all_ms};
use crate::error::SegError;
use crate::exact_dp::bellman_all;
use crate::maxseg::{ms_fast, reconstruct_maxseg};
use crate::penalty::{Counted, PenaltyKind, PenaltySource, Series};
use crate::segmentation::Segmentation;

pub use bench::{BenchConfig, Generator};
pub use ingest::{ingest, ColumnSelector, IngestError};
pub use report::{Objective, RunReport, TableRow};

pub const DEFAULT_EPSILON: f64 = 0.1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Contract(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Contract(_) => 3,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Input(_) => "input",
            CliError::Contract(_) => "contract",
        }
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Body<'a> {
            kind: &'a str,
            code: i32,
            message: String,
        }
        #[derive(Serialize)]
        struct Wrapper<'a> {
            error: Body<'a>,
        }
        serde_json::to_string(&Wrapper {
            error: Body {
                kind: self.kind(),
                code: self.exit_code(),
                message: self.to_string(),
            },
        })
        .expect("error serializes")
    }
}

impl From<SegError> for CliError {
    fn from(e: SegError) -> Self {
        match e {
            SegError::EmptySeries | SegError::NonFinite { .. } => CliError::Input(e.to_string()),
            _ => CliError::Contract(e.to_string()),
        }
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        CliError::Input(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PenaltyArg {
    L2,
    Range,
}

impl From<PenaltyArg> for PenaltyKind {
    fn from(p: PenaltyArg) -> Self {
        match p {
            PenaltyArg::L2 => PenaltyKind::L2,
            PenaltyArg::Range => PenaltyKind::Range,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Json,
    Tsv,
}

/// Solver behind a `run` invocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum)]
pub enum Algorithm {
    Solve,
    Exact,
    Maxseg,
    Cumulative,
    CumulativeMax,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Solve => "solve",
            Algorithm::Exact => "exact",
            Algorithm::Maxseg => "maxseg",
            Algorithm::Cumulative => "cumulative",
            Algorithm::CumulativeMax => "cumulative-max",
        }
    }

    pub fn uses_epsilon(self) -> bool {
        matches!(self, Algorithm::Solve | Algorithm::Cumulative)
    }

    pub fn objective(self) -> Objective {
        match self {
            Algorithm::Maxseg | Algorithm::CumulativeMax => Objective::Max,
            _ => Objective::Sum,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "strongseg", version, about = "Segment a numeric series into k pieces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// (1+ε)-approximate sum-of-penalties segmentation.
    Solve(EpsilonArgs),
    /// Exact sum-of-penalties segmentation (quadratic in m).
    Exact(InputArgs),
    /// Exact min-max segmentation.
    Maxseg(InputArgs),
    /// Approximate costs for every prefix and level.
    Cumulative(CumulativeArgs),
    /// Exact min-max costs for every prefix and level.
    CumulativeMax(CumulativeMaxArgs),
    /// Benchmark the solvers on synthetic series, emitting TSV.
    Bench(bench::BenchArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// CSV file with the series, or `-` for standard input.
    #[arg(long, short)]
    pub input: PathBuf,
    /// Column by 0-based index or header name.
    #[arg(long)]
    pub column: Option<String>,
    /// Number of segments.
    #[arg(long, short)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = PenaltyArg::L2)]
    pub penalty: PenaltyArg,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct EpsilonArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, short, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
}

#[derive(Debug, Args)]
pub struct CumulativeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, short, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    /// Emit the table row of this prefix instead of the final one.
    #[arg(long)]
    pub row: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CumulativeMaxArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Emit only this prefix's row instead of the whole table.
    #[arg(long)]
    pub row: Option<usize>,
}

/// Everything needed to run one solver on one input.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub k: usize,
    pub epsilon: Option<f64>,
    pub penalty: PenaltyKind,
    pub input: PathBuf,
    pub column: Option<ColumnSelector>,
    pub format: OutputFormat,
    pub row: Option<usize>,
}

impl RunConfig {
    fn from_input(algorithm: Algorithm, a: InputArgs, epsilon: Option<f64>, row: Option<usize>) -> Self {
        RunConfig {
            algorithm,
            k: a.k,
            epsilon,
            penalty: a.penalty.into(),
            input: a.input,
            column: a.column.as_deref().map(ColumnSelector::parse),
            format: a.format,
            row,
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.k == 0 {
            return Err(CliError::Usage("--k must be at least 1".into()));
        }
        match (self.algorithm.uses_epsilon(), self.epsilon) {
            (true, Some(e)) if !(e > 0.0 && e.is_finite()) => {
                Err(CliError::Usage(format!("--epsilon must be positive, got {e}")))
            }
            (true, None) => Err(CliError::Usage(format!("{} needs --epsilon", self.algorithm.name()))),
            (false, Some(_)) => Err(CliError::Usage(format!(
                "{} does not take --epsilon",
                self.algorithm.name()
            ))),
            _ => Ok(()),
        }
    }
}

/// Loads the input named by `config` and runs its solver.
pub fn run(config: &RunConfig) -> Result<RunReport, CliError> {
    config.validate()?;
    let series = ingest(&config.input, config.column.as_ref())?;
    run_on(config, &series)
}

/// Runs the configured solver on an in-memory series.
pub fn run_on(config: &RunConfig, series: &Series) -> Result<RunReport, CliError> {
    config.validate()?;
    let p = Counted::new(PenaltySource::build(config.penalty, series));
    let (k, m) = (config.k, series.len());
    if let Some(row) = config.row {
        if row > m {
            return Err(CliError::Usage(format!("--row {row} exceeds m = {m}")));
        }
    }

    let started = Instant::now();
    let (seg, estimate_iterations, table): (Segmentation, Option<usize>, Option<Vec<TableRow>>) =
        match config.algorithm {
            Algorithm::Solve => {
                let out = solve_approx(&p, k, config.epsilon.unwrap_or(DEFAULT_EPSILON))?;
                (out.segmentation, Some(out.estimate_iterations), None)
            }
            Algorithm::Exact => {
                let table = bellman_all(&p, k)?;
                (table.reconstruct(m, k)?, None, None)
            }
            Algorithm::Maxseg => {
                let delta = ms_fast(&p, k)?.value;
                (reconstruct_maxseg(&p, k, delta)?, None, None)
            }
            Algorithm::Cumulative => {
                let table = all_dp(&p, k, config.epsilon.unwrap_or(DEFAULT_EPSILON))?;
                let prefix = config.row.unwrap_or(m);
                let row = TableRow {
                    prefix,
                    costs: table.row(prefix),
                };
                (table.reconstruct(m, k)?, None, Some(vec![row]))
            }
            Algorithm::CumulativeMax => {
                let table = all_ms(&p, k)?;
                let rows = match config.row {
                    Some(i) => i..=i,
                    None => 1..=m,
                };
                let rows = rows
                    .map(|prefix| TableRow {
                        prefix,
                        costs: table.row(prefix),
                    })
                    .collect();
                (reconstruct_maxseg(&p, k, table.get(m, k))?, None, Some(rows))
            }
        };
    let wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
    let eval_count = p.evals();

    let objective = config.algorithm.objective();
    let segment_costs = seg.segment_costs(p.inner());
    Ok(RunReport {
        algorithm: config.algorithm.name().to_owned(),
        m,
        k,
        epsilon: config.epsilon.filter(|_| config.algorithm.uses_epsilon()),
        cost: objective.aggregate(&segment_costs),
        boundaries: seg.into_boundaries(),
        segment_costs,
        wall_time_ms,
        eval_count,
        estimate_iterations,
        objective,
        table,
    })
}

impl RunConfig {
    /// Config for a solver subcommand; `None` for `bench`.
    pub fn from_command(command: Command) -> Option<Self> {
        Some(match command {
            Command::Solve(a) => Self::from_input(Algorithm::Solve, a.input, Some(a.epsilon), None),
            Command::Exact(a) => Self::from_input(Algorithm::Exact, a, None, None),
            Command::Maxseg(a) => Self::from_input(Algorithm::Maxseg, a, None, None),
            Command::Cumulative(a) => {
                Self::from_input(Algorithm::Cumulative, a.input, Some(a.epsilon), a.row)
            }
            Command::CumulativeMax(a) => {
                Self::from_input(Algorithm::CumulativeMax, a.input, None, a.row)
            }
            Command::Bench(_) => return None,
        })
    }
}

/// Parses `args`, runs the command, and writes its output. Returns the exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = write!(out, "{e}");
            return 0;
        }
        Err(e) => {
            let e = CliError::Usage(e.to_string().trim_end().to_owned());
            let _ = writeln!(err, "{}", e.to_json());
            return e.exit_code();
        }
    };
    let result = match cli.command {
        Command::Bench(args) => args
            .into_config()
            .and_then(|cfg| bench::bench(&cfg, err))
            .map(|table| table.to_tsv()),
        command => {
            let config = RunConfig::from_command(command).expect("solver subcommand");
            run(&config).map(|report| match config.format {
                OutputFormat::Json => format!("{}\n", report.to_json()),
                OutputFormat::Tsv => report.to_tsv(),
            })
        }
    };
    match result {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            0
        }
        Err(e) => {
            let _ = writeln!(err, "{}", e.to_json());
            e.exit_code()
        }
    }
}
