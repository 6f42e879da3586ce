//! The `smtpart` command line.
//!
//! Exit codes: 0 success, 1 parse error, 2 no partitions could be made,
//! 3 runtime error, 64 usage error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use crate::harness::{par2_score, run_plan, write_csv, Benchmark, Executor, HarnessError, RunConfig};
use crate::partition::{
    partition, write_partition_files, Family, Outcome, PartitionType, Residual, StrategyConfig, TimingHeuristic,
};
use crate::portfolio::{self, PortfolioPlan};
use crate::solver::{self, AtomSource, SelectionHeuristic, SolveResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_NO_PARTITIONS: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "smtpart", version, about = "Partition, solve and benchmark QF_UF / QF_IDL problems")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Split a problem into subproblem files plus a manifest.
    Partition {
        file: PathBuf,
        #[command(flatten)]
        strategy: StrategyArgs,
        /// Budget for the partitioning solver, seconds.
        #[arg(long, default_value_t = 60.0)]
        timeout: f64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run a plan over a file or a directory of `.smt2` files.
    Run {
        path: PathBuf,
        #[command(flatten)]
        plan: PlanArgs,
        #[command(flatten)]
        strategy: StrategyArgs,
        /// Per-run timeout, seconds.
        #[arg(long, default_value_t = 60.0)]
        timeout: f64,
        /// External solver invoked as `<solver> <file.smt2>`.
        #[arg(long)]
        solver: Option<PathBuf>,
        /// Flag passed to the external solver, e.g. `--memory-limit=2048`.
        #[arg(long)]
        memory_flag: Option<String>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Solve one file with the built-in solver.
    Solve {
        file: PathBuf,
        #[arg(long)]
        timeout: Option<f64>,
    },
    /// Print a plan manifest as JSON.
    Plan {
        #[command(flatten)]
        plan: PlanArgs,
        #[command(flatten)]
        strategy: StrategyArgs,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PlanKind {
    Single,
    Portfolio,
    Graduated,
    Hybrid,
    Multijob,
    Scramble,
    Sequential,
}

#[derive(clap::Args, Debug)]
struct PlanArgs {
    /// Plan kind, or a path to a JSON plan manifest.
    #[arg(long, default_value = "single")]
    plan: String,
    #[arg(long, default_value_t = 4)]
    cores: u32,
    /// Ranked families for portfolio, graduated and multijob plans.
    #[arg(long, value_delimiter = ',')]
    families: Vec<Family>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Theur {
    Time,
    Check,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Source {
    Heap,
    Decision,
    Cl,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Heur {
    Rand,
    Spec,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Ptype {
    Cube,
    Scatter,
}

#[derive(clap::Args, Debug)]
struct StrategyArgs {
    /// Named strategy family; --source and --ptype override its parts.
    #[arg(long, default_value = "decision-cube")]
    strategy: Family,
    /// Partition count (a power of two), or the budget for budgeted plans.
    #[arg(short = 'n', default_value_t = 4)]
    n: u32,
    #[arg(long, value_enum, default_value_t = Theur::Time)]
    theur: Theur,
    #[arg(long, default_value_t = 3.0)]
    t1: f64,
    #[arg(long, default_value_t = 0.1)]
    t2: f64,
    #[arg(long, value_enum)]
    source: Option<Source>,
    #[arg(long, value_enum, default_value_t = Heur::Spec)]
    heur: Heur,
    #[arg(long, value_enum)]
    ptype: Option<Ptype>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

struct Usage(String);

impl StrategyArgs {
    fn config(&self, n: u32) -> Result<StrategyConfig, Usage> {
        let u = |e: &dyn std::fmt::Display| Usage(e.to_string());
        let timing = match self.theur {
            Theur::Time => TimingHeuristic::Time,
            Theur::Check => TimingHeuristic::Check,
        };
        let mut c = StrategyConfig::for_family(self.strategy, n)
            .map_err(|e| u(&e))?
            .with_timing(timing, self.t1, self.t2)
            .map_err(|e| u(&e))?;
        if let Some(s) = self.source {
            c.source = match s {
                Source::Heap => AtomSource::Heap,
                Source::Decision => AtomSource::Decision,
                Source::Cl => AtomSource::Cl,
            };
        }
        if let Some(p) = self.ptype {
            c.ptype = match p {
                Ptype::Cube => PartitionType::Cube,
                Ptype::Scatter => PartitionType::Scatter,
            };
        }
        c.heuristic = match self.heur {
            Heur::Rand => SelectionHeuristic::Rand,
            Heur::Spec => SelectionHeuristic::Spec,
        };
        c.seed = self.seed;
        Ok(c)
    }
}

fn build_plan(p: &PlanArgs, s: &StrategyArgs) -> Result<PortfolioPlan, Usage> {
    let u = |e: &dyn std::fmt::Display| Usage(e.to_string());
    let path = Path::new(&p.plan);
    if p.plan.ends_with(".json") {
        let text = fs::read_to_string(path).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
        return PortfolioPlan::from_json(&text).map_err(|e| u(&e));
    }
    let kind = PlanKind::from_str(&p.plan, true).map_err(Usage)?;
    let families: Vec<Family> = if p.families.is_empty() {
        match kind {
            PlanKind::Multijob => portfolio::RECOMMENDED.to_vec(),
            _ => Family::DEFAULT_RANK.to_vec(),
        }
    } else {
        p.families.clone()
    };
    match kind {
        PlanKind::Single => portfolio::single_plan(s.strategy, s.n).map_err(|e| u(&e)),
        PlanKind::Portfolio => portfolio::split_plan(s.n, &families).map_err(|e| u(&e)),
        PlanKind::Graduated => portfolio::graduated_plan(s.n, &families).map_err(|e| u(&e)),
        PlanKind::Hybrid => portfolio::hybrid_plan(p.cores).map_err(|e| u(&e)),
        PlanKind::Multijob => Ok(portfolio::multijob_plan(&families)),
        PlanKind::Scramble => Ok(portfolio::scramble_plan(p.cores)),
        PlanKind::Sequential => Ok(portfolio::sequential_plan()),
    }
}

fn seconds(v: f64) -> Result<Duration, Usage> {
    Duration::try_from_secs_f64(v).map_err(|_| Usage(format!("invalid duration {v}")))
}

/// Parse `args` (including the program name) and run. Output goes to
/// `out` and `err`; the return value is the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.cmd, out, err) {
        Ok(code) => code,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Parse(m)) => {
            let _ = writeln!(err, "parse error: {m}");
            EXIT_PARSE
        }
        Err(Failure::Runtime(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_RUNTIME
        }
    }
}

enum Failure {
    Usage(String),
    Parse(String),
    Runtime(String),
}

impl From<Usage> for Failure {
    fn from(u: Usage) -> Self {
        Failure::Usage(u.0)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Parse { .. } => Failure::Parse(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

fn load(file: &Path) -> Result<Benchmark, Failure> {
    Benchmark::load(file).map_err(Failure::from)
}

fn dispatch(cmd: Cmd, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Cmd::Solve { file, timeout } => {
            let bench = load(&file)?;
            let budget = timeout.map(seconds).transpose()?;
            let r = solver::solve(&bench.script, budget).map_err(|e| Failure::Runtime(e.to_string()))?;
            let word = match r {
                SolveResult::Sat(_) => "sat",
                SolveResult::Unsat => "unsat",
                _ => "unknown",
            };
            writeln!(out, "{word}")?;
            Ok(EXIT_OK)
        }
        Cmd::Plan { plan, strategy } => {
            let p = build_plan(&plan, &strategy)?;
            writeln!(out, "{}", p.to_json())?;
            Ok(EXIT_OK)
        }
        Cmd::Partition { file, strategy, timeout, out: dir } => {
            let config = strategy.config(strategy.n)?;
            let budget = seconds(timeout)?;
            let bench = load(&file)?;
            let run = partition(&bench.script, &config, Some(budget)).map_err(|e| Failure::Runtime(e.to_string()))?;
            let secs = run.elapsed.as_secs_f64();
            match &run.outcome {
                Outcome::Sat(_) => {
                    writeln!(out, "sat")?;
                    Ok(EXIT_OK)
                }
                Outcome::Unsat => {
                    writeln!(out, "unsat")?;
                    Ok(EXIT_OK)
                }
                Outcome::Unknown => {
                    writeln!(out, "unknown")?;
                    writeln!(err, "no partitions within {timeout}s")?;
                    Ok(EXIT_NO_PARTITIONS)
                }
                Outcome::Partitioned { partitions, residual } => {
                    let paths = write_partition_files(&bench.script, partitions, &dir, &bench.name)?;
                    writeln!(out, "partitions: {}", paths.len())?;
                    writeln!(out, "partition_time: {secs:.3}")?;
                    match residual {
                        Residual::Complete => {}
                        Residual::RemainderUnsat => writeln!(out, "remainder: unsat")?,
                        Residual::Truncated => writeln!(out, "truncated: {} of {}", paths.len(), config.n())?,
                    }
                    Ok(EXIT_OK)
                }
            }
        }
        Cmd::Run { path, plan, strategy, timeout, solver, memory_flag, out: dir } => {
            let p = build_plan(&plan, &strategy)?;
            let mut cfg = RunConfig::new(seconds(timeout)?, plan.cores.max(1) as usize);
            cfg.strategy = strategy.config(2)?;
            if let Some(binary) = solver {
                cfg.executor = Executor::External { binary, memory_flag };
            }
            fs::create_dir_all(&dir)?;
            cfg.scratch = Some(dir.join("work"));
            fs::write(dir.join("plan.json"), p.to_json())?;
            let benches = Benchmark::load_corpus(&path)?;
            let mut records = Vec::new();
            let mut results = Vec::new();
            for b in &benches {
                let report = run_plan(&p, b, &cfg)?;
                writeln!(
                    out,
                    "{}: {} {:.3}s{}",
                    b.name,
                    report.result.verdict,
                    report.result.time,
                    if report.jobs.iter().any(|j| !j.eligible) { " (ineligible jobs)" } else { "" }
                )?;
                if let Some((s, tasks)) = &report.schedule {
                    writeln!(
                        out,
                        "  schedule: {} cores, makespan {:.3}s, dropped {}",
                        s.core_count(),
                        s.makespan(),
                        s.dropped.len()
                    )?;
                    for &i in &s.dropped {
                        let t = &tasks[i];
                        writeln!(out, "  dropped: {} partition {}", t.job, t.key.2)?;
                    }
                }
                records.extend(report.records);
                results.push(report.result);
            }
            let csv_path = dir.join("results.csv");
            let file = fs::File::create(&csv_path)?;
            write_csv(file, &records).map_err(|e| Failure::Runtime(e.to_string()))?;
            writeln!(
                out,
                "PAR-2: {:.3} ({} benchmarks, timeout {timeout}s)",
                par2_score(&results, timeout),
                benches.len()
            )?;
            writeln!(out, "results: {}", csv_path.display())?;
            Ok(EXIT_OK)
        }
    }
}
