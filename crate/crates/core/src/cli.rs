//! Command-line front end.
//!
//! Exit status: 0 on success, 1 on bad input, 2 when a verified claim does
//! not hold.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::algorithms::builtin_algorithm;
use crate::bounds::{
    replay_theorem1_cases, verify_lemma2, verify_lemma4, verify_theorem2, EqualLengthFamily,
    VerificationVerdict,
};
use crate::engine::{simulate, EngineConfig, OnlineAlgorithm};
use crate::enumerate::DEFAULT_BUDGET;
use crate::generate::{generate, GeneratorSpec};
use crate::io::{parse_instance, parse_schedule, parse_script, serialize_instance, serialize_schedule, ReportFile};
use crate::metrics::{fairness_report, optimum_makespan_bound, MetricsConfig, Objective, OptimumMode};
use crate::model::{ProblemInstance, Schedule, Time};
use crate::oracle::{exact_optimal_makespan_with_limit, DEFAULT_ORACLE_LIMIT};
use crate::scalar::Rational;

pub const BUDGET_ENV: &str = "FAIRSCHED_BUDGET";

#[derive(Debug, Parser)]
#[command(name = "fairsched", version, about = "Multi-user online scheduling simulator and fairness analyzer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an online algorithm over an instance and write the schedule JSON.
    Simulate(SimulateArgs),
    /// Compute the fairness report of a schedule.
    Metrics(MetricsArgs),
    /// Write a synthetic instance.
    #[command(subcommand)]
    Generate(GenerateKind),
    /// Check a bound by replay or exhaustive enumeration.
    VerifyBounds(VerifyArgs),
    /// Exact optimal makespan of a job list.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
struct AlgorithmArgs {
    /// greedy | rr-user | dedicated | scripted:<file>
    #[arg(long)]
    algorithm: Option<String>,
    /// Honour explicit start times (implied by scripts that carry them).
    #[arg(long)]
    allow_idling: bool,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    instance: PathBuf,
    #[command(flatten)]
    algorithm: AlgorithmArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Makespan,
    #[value(alias = "sum_completion")]
    SumCompletion,
    #[value(alias = "weighted_completion")]
    WeightedCompletion,
    #[value(alias = "sum_flow")]
    SumFlow,
}

impl From<ObjectiveArg> for Objective {
    fn from(value: ObjectiveArg) -> Self {
        match value {
            ObjectiveArg::Makespan => Objective::Makespan,
            ObjectiveArg::SumCompletion => Objective::SumCompletion,
            ObjectiveArg::WeightedCompletion => Objective::WeightedCompletion,
            ObjectiveArg::SumFlow => Objective::SumFlow,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct MetricsArgs {
    /// Schedule written by `simulate`.
    #[arg(long, conflicts_with = "instance")]
    schedule: Option<PathBuf>,
    /// Simulate this instance first (needs --algorithm).
    #[arg(long)]
    instance: Option<PathBuf>,
    #[command(flatten)]
    algorithm: AlgorithmArgs,
    #[arg(long, value_enum, default_value = "makespan")]
    objective: ObjectiveArg,
    /// Use the exact single-user optimum instead of total processing / m.
    #[arg(long)]
    oracle: bool,
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Format for stdout when neither --json nor --csv is given.
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum GenerateKind {
    /// Every user has `y` jobs of length `x`.
    EqualLength {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        x: Time,
        #[arg(long)]
        y: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Uniform random processing times.
    Uniform {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        m: u32,
        /// One count for all users or a comma list with one per user.
        #[arg(long, value_delimiter = ',', required = true)]
        jobs_per_user: Vec<u32>,
        #[arg(long, default_value_t = 1)]
        p_min: Time,
        #[arg(long)]
        p_max: Time,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ClaimArg {
    Theorem1,
    Lemma2,
    Lemma4,
    Theorem2,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    claim: ClaimArg,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    x: Option<Time>,
    #[arg(long)]
    y: Option<u32>,
    /// Enumeration budget; overrides FAIRSCHED_BUDGET.
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OracleArgs {
    /// Comma-separated processing times.
    #[arg(long, value_delimiter = ',', required = true)]
    jobs: Vec<Time>,
    #[arg(long)]
    m: u32,
    #[arg(long, default_value_t = DEFAULT_ORACLE_LIMIT)]
    limit: usize,
    /// Print total processing / m instead of searching.
    #[arg(long)]
    bound_only: bool,
}

enum Outcome {
    Ok,
    ClaimFailed,
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit status.
pub fn run_pipeline<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = write!(stderr, "{e}");
            return 1;
        }
        Err(e) => {
            let _ = write!(stdout, "{e}");
            return 0;
        }
    };
    match run(cli.command, stdout) {
        Ok(Outcome::Ok) => 0,
        Ok(Outcome::ClaimFailed) => 2,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            1
        }
    }
}

fn run(command: Command, stdout: &mut dyn Write) -> Result<Outcome> {
    match command {
        Command::Simulate(args) => {
            let instance = Arc::new(read_instance(&args.instance)?);
            let (schedule, name) = run_algorithm(instance, &args.algorithm)?;
            emit(stdout, args.out.as_deref(), &serialize_schedule(&schedule, &name))?;
        }
        Command::Metrics(args) => metrics(args, stdout)?,
        Command::Generate(kind) => {
            let (spec, out) = match kind {
                GenerateKind::EqualLength { k, m, x, y, out } => {
                    (GeneratorSpec::EqualLength { k, m, x, y }, out)
                }
                GenerateKind::Uniform {
                    k,
                    m,
                    jobs_per_user,
                    p_min,
                    p_max,
                    seed,
                    out,
                } => (
                    GeneratorSpec::UniformRandom {
                        k,
                        m,
                        jobs_per_user,
                        p_min,
                        p_max,
                        seed,
                    },
                    out,
                ),
            };
            let instance = generate(&spec)?;
            emit(stdout, out.as_deref(), &serialize_instance(&instance))?;
        }
        Command::VerifyBounds(args) => return verify(args, stdout),
        Command::Oracle(args) => {
            if args.bound_only {
                let bound: Rational = optimum_makespan_bound(&args.jobs, args.m)?;
                writeln!(stdout, "{bound}")?;
            } else {
                let opt = exact_optimal_makespan_with_limit(&args.jobs, args.m, args.limit)?;
                writeln!(stdout, "{opt}")?;
            }
        }
    }
    Ok(Outcome::Ok)
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_instance(path: &Path) -> Result<ProblemInstance> {
    parse_instance(&read_text(path)?).with_context(|| format!("in {}", path.display()))
}

fn emit(stdout: &mut dyn Write, out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => Ok(stdout.write_all(text.as_bytes())?),
    }
}

fn run_algorithm(instance: Arc<ProblemInstance>, args: &AlgorithmArgs) -> Result<(Schedule, String)> {
    let name = args
        .algorithm
        .clone()
        .ok_or_else(|| anyhow!("--algorithm is required (greedy, rr-user, dedicated, scripted:<file>)"))?;
    let mut config = EngineConfig {
        idling_allowed: args.allow_idling,
    };
    let algorithm: Box<dyn OnlineAlgorithm> = match name.strip_prefix("scripted:") {
        Some(path) => {
            let script = parse_script(&read_text(Path::new(path))?, name.clone())
                .with_context(|| format!("in {path}"))?;
            config.idling_allowed |= script.has_explicit_starts();
            Box::new(script)
        }
        None => builtin_algorithm(&name)?,
    };
    let schedule = simulate(instance, algorithm.as_ref(), config)?;
    Ok((schedule, name))
}

fn metrics(args: MetricsArgs, stdout: &mut dyn Write) -> Result<()> {
    let (schedule, algorithm) = match (&args.schedule, &args.instance) {
        (Some(path), _) => parse_schedule(&read_text(path)?).with_context(|| format!("in {}", path.display()))?,
        (None, Some(path)) => run_algorithm(Arc::new(read_instance(path)?), &args.algorithm)?,
        (None, None) => bail!("give --schedule, or --instance with --algorithm"),
    };
    let config = MetricsConfig {
        optimum: if args.oracle {
            OptimumMode::ExactOracle
        } else {
            OptimumMode::FairBound
        },
        ..MetricsConfig::default()
    };
    let report = fairness_report::<Rational>(&schedule, args.objective.into(), &config)?;
    let file = ReportFile::new(&report, schedule.instance(), &algorithm, &config);
    if let Some(path) = &args.json {
        emit(stdout, Some(path), &file.to_json())?;
    }
    if let Some(path) = &args.csv {
        emit(stdout, Some(path), &file.to_csv()?)?;
    }
    if args.json.is_none() && args.csv.is_none() {
        match args.format {
            Format::Json => emit(stdout, None, &file.to_json())?,
            Format::Csv => emit(stdout, None, &file.to_csv()?)?,
        }
    }
    Ok(())
}

fn budget(flag: Option<u64>) -> Result<u64> {
    if let Some(b) = flag {
        return Ok(b);
    }
    match std::env::var(BUDGET_ENV) {
        Ok(text) => text
            .trim()
            .parse()
            .with_context(|| format!("{BUDGET_ENV}={text} is not a non-negative integer")),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn verify(args: VerifyArgs, stdout: &mut dyn Write) -> Result<Outcome> {
    let verdicts: Vec<VerificationVerdict> = match args.claim {
        ClaimArg::Theorem1 => replay_theorem1_cases()?,
        claim => {
            let (Some(k), Some(m), Some(x), Some(y)) = (args.k, args.m, args.x, args.y) else {
                bail!("--k, --m, --x and --y are required for this claim");
            };
            let family = EqualLengthFamily::new(k, m, x, y)?;
            let budget = budget(args.budget)?;
            vec![match claim {
                ClaimArg::Lemma2 => verify_lemma2(&family, budget)?,
                ClaimArg::Lemma4 => verify_lemma4(&family, budget)?,
                ClaimArg::Theorem2 => verify_theorem2(&family, budget)?,
                ClaimArg::Theorem1 => unreachable!(),
            }]
        }
    };
    let mut text = if verdicts.len() == 1 {
        serde_json::to_string_pretty(&verdicts[0])?
    } else {
        serde_json::to_string_pretty(&verdicts)?
    };
    text.push('\n');
    emit(stdout, args.out.as_deref(), &text)?;
    Ok(if verdicts.iter().all(|v| v.holds) {
        Outcome::Ok
    } else {
        Outcome::ClaimFailed
    })
}
