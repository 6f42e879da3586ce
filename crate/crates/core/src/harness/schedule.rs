//! List scheduling of many partitions onto few cores.

use std::collections::BTreeMap;

use thiserror::Error;

use super::aggregate::{aggregate_portfolio, Aggregate, IntegrityError};
use super::record::Verdict;
use crate::portfolio::TaskKey;

/// A partition to be run, with its measured (or simulated) runtime.
#[derive(Clone, Debug, PartialEq)]
pub struct Task {
    pub key: TaskKey,
    pub job: String,
    pub duration: f64,
    pub verdict: Verdict,
    /// Partitioning time of the task's job.
    pub partition_time: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Placed {
    /// Index into the task list.
    pub task: usize,
    pub start: f64,
    pub end: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoreSchedule {
    pub budget: f64,
    pub per_core: Vec<Vec<Placed>>,
    pub per_core_time: Vec<f64>,
    /// Tasks that fit on no core, in key order.
    pub dropped: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ScheduleError {
    #[error("at least one core is required")]
    NoCores,
}

impl CoreSchedule {
    pub fn core_count(&self) -> usize {
        self.per_core.len()
    }

    pub fn makespan(&self) -> f64 {
        self.per_core_time.iter().copied().fold(0.0, f64::max)
    }

    pub fn placement(&self, task: usize) -> Option<Placed> {
        self.per_core.iter().flatten().find(|p| p.task == task).copied()
    }
}

/// Indices of `tasks` sorted by key; equal keys keep input order.
pub fn key_order(tasks: &[Task]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..tasks.len()).collect();
    order.sort_by_key(|&i| tasks[i].key);
    order
}

/// Place tasks in key order, each on the earliest-available core (lowest
/// index on ties) that can finish it within `budget`. Tasks that fit
/// nowhere are dropped.
pub fn multijob_schedule(tasks: &[Task], cores: usize, budget: f64) -> Result<CoreSchedule, ScheduleError> {
    if cores == 0 {
        return Err(ScheduleError::NoCores);
    }
    let mut s = CoreSchedule {
        budget,
        per_core: vec![Vec::new(); cores],
        per_core_time: vec![0.0; cores],
        dropped: Vec::new(),
    };
    for i in key_order(tasks) {
        let mut by_avail: Vec<usize> = (0..cores).collect();
        by_avail.sort_by(|&a, &b| s.per_core_time[a].total_cmp(&s.per_core_time[b]).then(a.cmp(&b)));
        let d = tasks[i].duration;
        match by_avail.into_iter().find(|&c| s.per_core_time[c] + d <= budget) {
            Some(c) => {
                let start = s.per_core_time[c];
                let end = start + d;
                s.per_core[c].push(Placed { task: i, start, end });
                s.per_core_time[c] = end;
            }
            None => s.dropped.push(i),
        }
    }
    Ok(s)
}

/// Portfolio outcome of a multijob schedule: each job finishes when its
/// fastest sat partition ends, or when its last partition ends if all are
/// unsat and none was dropped. Partitioning time is added per job.
pub fn multijob_outcome(tasks: &[Task], schedule: &CoreSchedule, timeout: f64) -> Result<Aggregate, IntegrityError> {
    let mut jobs: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, t) in tasks.iter().enumerate() {
        jobs.entry(&t.job).or_default().push(i);
    }
    let mut results = Vec::new();
    for members in jobs.into_values() {
        let placed: Vec<(usize, Option<Placed>)> = members.iter().map(|&i| (i, schedule.placement(i))).collect();
        let pt = tasks[members[0]].partition_time;
        let sat_end = placed
            .iter()
            .filter(|(i, p)| tasks[*i].verdict == Verdict::Sat && p.is_some())
            .map(|(_, p)| p.unwrap().end)
            .min_by(f64::total_cmp);
        let result = if let Some(end) = sat_end {
            Aggregate { verdict: Verdict::Sat, time: pt + end }
        } else if placed.iter().all(|(i, p)| tasks[*i].verdict == Verdict::Unsat && p.is_some()) {
            let end = placed.iter().map(|(_, p)| p.unwrap().end).fold(0.0, f64::max);
            Aggregate { verdict: Verdict::Unsat, time: pt + end }
        } else {
            Aggregate::timeout(timeout)
        };
        results.push(result);
    }
    aggregate_portfolio(&results, timeout)
}
