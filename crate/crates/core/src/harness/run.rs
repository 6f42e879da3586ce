//! Executing a portfolio plan on one benchmark.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::{mpsc, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::frontend::{parse_script, print_script, scramble, ParseError, Script};
use crate::partition::{
    self, write_partition_files, Outcome as PartitionOutcome, PartitionRun, Residual, StrategyConfig,
};
use crate::portfolio::{JobKind, PortfolioPlan};
use crate::solver::SolverError;

use super::aggregate::{aggregate_job, aggregate_portfolio, Aggregate, IntegrityError};
use super::executor::Executor;
use super::record::{RunRecord, Verdict};
use super::schedule::{multijob_outcome, multijob_schedule, CoreSchedule, ScheduleError, Task};

/// Environment variable naming the directory for subproblem files.
pub const SCRATCH_ENV: &str = "SMTPART_SCRATCH";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}:{source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("{0}")]
    Executor(String),
    #[error(transparent)]
    Integrity(#[from] IntegrityError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io { path: path.to_path_buf(), source }
}

#[derive(Clone, Debug)]
pub struct Benchmark {
    pub name: String,
    pub script: Script,
}

impl Benchmark {
    pub fn new(name: impl Into<String>, script: Script) -> Self {
        Benchmark { name: name.into(), script }
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        let mut script =
            parse_script(&text).map_err(|source| HarnessError::Parse { path: path.to_path_buf(), source })?;
        script.source = Some(path.display().to_string());
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "benchmark".into());
        Ok(Benchmark { name, script })
    }

    /// A single file, or every `*.smt2` in a directory in name order.
    pub fn load_corpus(path: &Path) -> Result<Vec<Self>, HarnessError> {
        if !path.is_dir() {
            return Ok(vec![Benchmark::load(path)?]);
        }
        let mut files: Vec<PathBuf> = fs::read_dir(path)
            .map_err(io_err(path))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e == "smt2"))
            .collect();
        files.sort();
        files.iter().map(|p| Benchmark::load(p)).collect()
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    /// Per-run timeout; also the per-core budget of multijob plans.
    pub timeout: Duration,
    pub cores: usize,
    pub executor: Executor,
    /// Timing, selection and seed for partition jobs. Its family and size
    /// are replaced by each job's.
    pub strategy: StrategyConfig,
    /// Where subproblem files go. Falls back to `$SMTPART_SCRATCH`, then a
    /// temporary directory.
    pub scratch: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(timeout: Duration, cores: usize) -> Self {
        RunConfig {
            timeout,
            cores,
            executor: Executor::Embedded,
            strategy: StrategyConfig::new(2).expect("2 is valid"),
            scratch: None,
        }
    }

    fn job_strategy(&self, family: partition::Family, n: u32) -> StrategyConfig {
        let t = &self.strategy;
        let mut c = StrategyConfig::for_family(family, n).expect("plans hold valid sizes");
        c.heuristic = t.heuristic;
        c.timing = t.timing;
        c.t1 = t.t1;
        c.t2 = t.t2;
        c.seed = t.seed;
        c.reset_cl = t.reset_cl;
        c.exclude_used_atoms = t.exclude_used_atoms;
        c
    }
}

#[derive(Clone, Debug)]
pub struct JobSummary {
    pub job: String,
    pub result: Aggregate,
    pub partition_time: f64,
    pub partitions: usize,
    /// False when the partitioning solver made no partitions.
    pub eligible: bool,
    pub residual: Option<Residual>,
}

#[derive(Clone, Debug)]
pub struct PlanReport {
    pub benchmark: String,
    pub records: Vec<RunRecord>,
    pub jobs: Vec<JobSummary>,
    /// Simulated-parallel portfolio result.
    pub result: Aggregate,
    /// Present for multijob plans.
    pub schedule: Option<(CoreSchedule, Vec<Task>)>,
    /// Wall-clock seconds for the whole plan.
    pub elapsed: f64,
}

/// Run `items` through `f` on up to `workers` threads. Results come back
/// through a channel and are returned in input order.
pub fn parallel_map<T: Send, R: Send>(items: Vec<T>, workers: usize, f: impl Fn(T) -> R + Sync) -> Vec<R> {
    let n = items.len();
    let queue = Mutex::new(items.into_iter().enumerate());
    let (tx, rx) = mpsc::channel();
    thread::scope(|scope| {
        for _ in 0..workers.max(1).min(n) {
            let tx = tx.clone();
            let (queue, f) = (&queue, &f);
            scope.spawn(move || loop {
                let next = queue.lock().unwrap().next();
                let Some((i, item)) = next else { break };
                tx.send((i, f(item))).unwrap();
            });
        }
    });
    drop(tx);
    let mut out: Vec<(usize, R)> = rx.into_iter().collect();
    out.sort_by_key(|(i, _)| *i);
    out.into_iter().map(|(_, r)| r).collect()
}

enum Prepared {
    Partitioned(PartitionRun),
    Whole(Script),
}

struct SubRun {
    job: usize,
    label: String,
    index: usize,
    script: Script,
    file: PathBuf,
}

fn scratch_dir(cfg: &RunConfig) -> io::Result<(PathBuf, Option<tempfile::TempDir>)> {
    if let Some(p) = cfg.scratch.clone().or_else(|| std::env::var_os(SCRATCH_ENV).map(PathBuf::from)) {
        fs::create_dir_all(&p)?;
        return Ok((p, None));
    }
    let t = tempfile::Builder::new().prefix("smtpart-").tempdir()?;
    Ok((t.path().to_path_buf(), Some(t)))
}

/// Execute every job of `plan` on `bench`.
pub fn run_plan(plan: &PortfolioPlan, bench: &Benchmark, cfg: &RunConfig) -> Result<PlanReport, HarnessError> {
    cfg.executor.check().map_err(HarnessError::Executor)?;
    let started = Instant::now();
    let (scratch, _guard) = scratch_dir(cfg).map_err(io_err(Path::new("scratch")))?;
    let dir = scratch.join(&bench.name);
    fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    let timeout = cfg.timeout.as_secs_f64();

    let prepared = parallel_map(plan.jobs.iter().collect(), cfg.cores, |job| -> Result<Prepared, HarnessError> {
        Ok(match job.kind {
            JobKind::PartitionRun { family, n, .. } => {
                let strategy = cfg.job_strategy(family, n);
                Prepared::Partitioned(partition::partition(&bench.script, &strategy, Some(cfg.timeout))?)
            }
            JobKind::ScrambleRun { seed } => Prepared::Whole(scramble(&bench.script, seed)),
            JobKind::SequentialRun => Prepared::Whole(bench.script.clone()),
        })
    });
    let prepared: Vec<Prepared> = prepared.into_iter().collect::<Result<_, _>>()?;

    let mut runs = Vec::new();
    for (j, (job, prep)) in plan.jobs.iter().zip(&prepared).enumerate() {
        let base = format!("{}.{}", bench.name, job.id);
        match prep {
            Prepared::Partitioned(run) => {
                let parts = run.partitions();
                let files = write_partition_files(&bench.script, parts, &dir, &base).map_err(io_err(&dir))?;
                for (p, file) in parts.iter().zip(files) {
                    runs.push(SubRun {
                        job: j,
                        label: p.index.to_string(),
                        index: p.index,
                        script: partition::subproblem(&bench.script, &p.formula),
                        file,
                    });
                }
            }
            Prepared::Whole(script) => {
                let file = dir.join(format!("{base}.smt2"));
                fs::write(&file, print_script(script)).map_err(io_err(&file))?;
                let label = match job.kind {
                    JobKind::ScrambleRun { seed } => format!("seed={seed}"),
                    _ => "-".into(),
                };
                runs.push(SubRun { job: j, label, index: 0, script: script.clone(), file });
            }
        }
    }

    let outcomes =
        parallel_map(runs.iter().collect(), cfg.cores, |r| cfg.executor.run(&r.script, &r.file, cfg.timeout));

    let mut records = Vec::new();
    let mut jobs = Vec::new();
    let mut tasks = Vec::new();
    let mut early = Vec::new();
    for (j, (job, prep)) in plan.jobs.iter().zip(&prepared).enumerate() {
        let partition_time = match prep {
            Prepared::Partitioned(run) => run.elapsed.as_secs_f64(),
            Prepared::Whole(_) => 0.0,
        };
        let mut job_records = Vec::new();
        for (r, o) in runs.iter().zip(&outcomes).filter(|(r, _)| r.job == j) {
            job_records.push(RunRecord {
                benchmark: bench.name.clone(),
                job: job.id.clone(),
                partition: r.label.clone(),
                verdict: o.verdict,
                wall_time: o.wall_time,
                partition_time,
                diagnostic: o.diagnostic.clone(),
            });
            if let JobKind::PartitionRun { n, rank, .. } = job.kind {
                tasks.push(Task {
                    key: (n, rank, r.index),
                    job: job.id.clone(),
                    duration: if o.verdict.is_decisive() { o.wall_time } else { timeout },
                    verdict: o.verdict,
                    partition_time,
                });
            }
        }
        let summary = match prep {
            Prepared::Whole(_) => JobSummary {
                job: job.id.clone(),
                result: aggregate_job(&job_records, 0.0, timeout),
                partition_time,
                partitions: 0,
                eligible: true,
                residual: None,
            },
            Prepared::Partitioned(run) => match &run.outcome {
                PartitionOutcome::Partitioned { partitions, residual } => JobSummary {
                    job: job.id.clone(),
                    result: aggregate_job(&job_records, partition_time, timeout),
                    partition_time,
                    partitions: partitions.len(),
                    eligible: true,
                    residual: Some(*residual),
                },
                other => {
                    let verdict = match other {
                        PartitionOutcome::Sat(_) => Verdict::Sat,
                        PartitionOutcome::Unsat => Verdict::Unsat,
                        _ => Verdict::Timeout,
                    };
                    let result = if verdict.is_decisive() {
                        Aggregate { verdict, time: partition_time }
                    } else {
                        Aggregate::timeout(timeout)
                    };
                    job_records.push(RunRecord {
                        benchmark: bench.name.clone(),
                        job: job.id.clone(),
                        partition: "-".into(),
                        verdict,
                        wall_time: partition_time,
                        partition_time,
                        diagnostic: None,
                    });
                    early.push(result);
                    JobSummary {
                        job: job.id.clone(),
                        result,
                        partition_time,
                        partitions: 0,
                        eligible: false,
                        residual: None,
                    }
                }
            },
        };
        records.extend(job_records);
        jobs.push(summary);
    }

    let (result, schedule) = if plan.multijob {
        let s = multijob_schedule(&tasks, cfg.cores, timeout)?;
        let mut parts = early;
        parts.push(multijob_outcome(&tasks, &s, timeout)?);
        parts.extend(
            jobs.iter()
                .zip(&plan.jobs)
                .filter(|(_, j)| !matches!(j.kind, JobKind::PartitionRun { .. }))
                .map(|(s, _)| s.result),
        );
        (aggregate_portfolio(&parts, timeout)?, Some((s, tasks)))
    } else {
        let all: Vec<Aggregate> = jobs.iter().map(|j| j.result).collect();
        (aggregate_portfolio(&all, timeout)?, None)
    };
    Ok(PlanReport {
        benchmark: bench.name.clone(),
        records,
        jobs,
        result,
        schedule,
        elapsed: started.elapsed().as_secs_f64(),
    })
}
