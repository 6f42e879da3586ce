//! Running one SMT-LIB file to a verdict.

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use crate::frontend::Script;
use crate::solver::{SolveResult, Solver, SolverOptions};

use super::record::Verdict;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Executor {
    /// The built-in solver, in a worker thread.
    Embedded,
    /// `<binary> [memory flag] <file.smt2>`; the first stdout line is the verdict.
    External {
        binary: PathBuf,
        /// Passed before the file name, e.g. `--memory-limit=2048`.
        memory_flag: Option<String>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub verdict: Verdict,
    pub wall_time: f64,
    pub diagnostic: Option<String>,
}

impl Outcome {
    fn error(start: Instant, msg: String) -> Self {
        Outcome { verdict: Verdict::Error, wall_time: start.elapsed().as_secs_f64(), diagnostic: Some(msg) }
    }
}

impl Executor {
    pub fn external(binary: impl Into<PathBuf>) -> Self {
        Executor::External { binary: binary.into(), memory_flag: None }
    }

    /// Whether the executor can run at all.
    pub fn check(&self) -> Result<(), String> {
        match self {
            Executor::Embedded => Ok(()),
            Executor::External { binary, .. } => {
                if binary.is_file() || binary.components().count() == 1 && which(binary).is_some() {
                    Ok(())
                } else {
                    Err(format!("solver binary {} not found", binary.display()))
                }
            }
        }
    }

    /// Solve `script`, whose printed form is at `file`, within `timeout`.
    pub fn run(&self, script: &Script, file: &Path, timeout: Duration) -> Outcome {
        match self {
            Executor::Embedded => run_embedded(script, timeout),
            Executor::External { binary, memory_flag } => run_external(binary, memory_flag.as_deref(), file, timeout),
        }
    }

    /// Whether `run` reads the file (so it must be written first).
    pub fn needs_file(&self) -> bool {
        matches!(self, Executor::External { .. })
    }
}

fn which(name: &Path) -> Option<PathBuf> {
    std::env::var_os("PATH").and_then(|paths| std::env::split_paths(&paths).map(|d| d.join(name)).find(|p| p.is_file()))
}

pub fn run_embedded(script: &Script, timeout: Duration) -> Outcome {
    let start = Instant::now();
    let result = Solver::new(script, SolverOptions::default()).and_then(|mut s| s.solve(None, Some(timeout)));
    let wall_time = start.elapsed().as_secs_f64();
    match result {
        Ok(SolveResult::Sat(_)) => Outcome { verdict: Verdict::Sat, wall_time, diagnostic: None },
        Ok(SolveResult::Unsat) => Outcome { verdict: Verdict::Unsat, wall_time, diagnostic: None },
        Ok(_) => Outcome { verdict: Verdict::Timeout, wall_time: timeout.as_secs_f64(), diagnostic: None },
        Err(e) => Outcome::error(start, e.to_string()),
    }
}

fn run_external(binary: &Path, memory_flag: Option<&str>, file: &Path, timeout: Duration) -> Outcome {
    let start = Instant::now();
    let mut cmd = Command::new(binary);
    cmd.args(memory_flag).arg(file);
    let mut child = match cmd.stdin(Stdio::null()).stdout(Stdio::piped()).stderr(Stdio::piped()).spawn() {
        Ok(c) => c,
        Err(e) => return Outcome::error(start, format!("spawn {}: {e}", binary.display())),
    };
    let mut stdout = child.stdout.take().expect("piped");
    let reader = thread::spawn(move || {
        let mut s = String::new();
        let _ = stdout.read_to_string(&mut s);
        s
    });
    let status = loop {
        match child.try_wait() {
            Ok(Some(status)) => break status,
            Ok(None) if start.elapsed() >= timeout => {
                let _ = child.kill();
                let _ = child.wait();
                let _ = reader.join();
                return Outcome { verdict: Verdict::Timeout, wall_time: timeout.as_secs_f64(), diagnostic: None };
            }
            Ok(None) => thread::sleep(Duration::from_millis(2)),
            Err(e) => return Outcome::error(start, format!("wait: {e}")),
        }
    };
    let wall_time = start.elapsed().as_secs_f64();
    let out = reader.join().unwrap_or_default();
    if !status.success() {
        return Outcome::error(start, format!("exit status {status}"));
    }
    let verdict = match out.lines().next().map(str::trim) {
        Some("sat") => Verdict::Sat,
        Some("unsat") => Verdict::Unsat,
        Some("unknown") => Verdict::Timeout,
        other => return Outcome::error(start, format!("unexpected output {other:?}")),
    };
    Outcome { verdict, wall_time, diagnostic: None }
}
