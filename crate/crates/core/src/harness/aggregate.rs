use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::record::{RunRecord, Verdict};

/// Outcome of a job or a whole portfolio.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub verdict: Verdict,
    pub time: f64,
}

impl Aggregate {
    pub fn timeout(timeout: f64) -> Self {
        Aggregate { verdict: Verdict::Timeout, time: timeout }
    }

    pub fn is_decisive(&self) -> bool {
        self.verdict.is_decisive()
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
#[error("integrity error: both sat and unsat reported ({detail})")]
pub struct IntegrityError {
    pub detail: String,
}

/// Combine the runs of one partition job. Unsat needs every partition;
/// the fastest sat partition decides sat. Unsat partitions next to sat
/// ones are expected: they cover regions without models.
pub fn aggregate_job(records: &[RunRecord], partition_time: f64, timeout: f64) -> Aggregate {
    let sat = records.iter().filter(|r| r.verdict == Verdict::Sat).map(|r| r.wall_time).min_by(f64::total_cmp);
    if let Some(t) = sat {
        return Aggregate { verdict: Verdict::Sat, time: partition_time + t };
    }
    if records.is_empty() || records.iter().any(|r| r.verdict != Verdict::Unsat) {
        return Aggregate::timeout(timeout);
    }
    let max = records.iter().map(|r| r.wall_time).fold(0.0, f64::max);
    Aggregate { verdict: Verdict::Unsat, time: partition_time + max }
}

/// First decisive job wins, as if all jobs ran in parallel.
pub fn aggregate_portfolio(jobs: &[Aggregate], timeout: f64) -> Result<Aggregate, IntegrityError> {
    let has = |v| jobs.iter().any(|j| j.verdict == v);
    if has(Verdict::Sat) && has(Verdict::Unsat) {
        return Err(IntegrityError { detail: "jobs of one portfolio disagree".into() });
    }
    Ok(jobs
        .iter()
        .filter(|j| j.is_decisive())
        .min_by(|a, b| a.time.total_cmp(&b.time))
        .copied()
        .unwrap_or(Aggregate::timeout(timeout)))
}

/// Sum of solved times plus twice the timeout per unsolved benchmark.
pub fn par2_score(results: &[Aggregate], timeout: f64) -> f64 {
    results.iter().map(|r| if r.is_decisive() { r.time } else { 2.0 * timeout }).sum()
}
