//! Composition of partitioning strategies and scrambles into job plans.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::partition::Family;

/// A family parameterized by its partition count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StrategyId {
    pub family: Family,
    pub n: u32,
}

impl fmt::Display for StrategyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.family, self.n)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum JobKind {
    PartitionRun {
        family: Family,
        n: u32,
        /// Position of the family in the plan's ranking.
        rank: usize,
    },
    ScrambleRun {
        seed: u64,
    },
    SequentialRun,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Job {
    pub id: String,
    #[serde(flatten)]
    pub kind: JobKind,
    /// Cores the job occupies when every run gets its own core.
    pub cores: u32,
}

impl Job {
    fn partition(family: Family, n: u32, rank: usize) -> Job {
        Job { id: StrategyId { family, n }.to_string(), kind: JobKind::PartitionRun { family, n, rank }, cores: n }
    }

    fn scramble(seed: u64) -> Job {
        Job { id: format!("scramble-{seed}"), kind: JobKind::ScrambleRun { seed }, cores: 1 }
    }

    pub fn strategy(&self) -> Option<StrategyId> {
        match self.kind {
            JobKind::PartitionRun { family, n, .. } => Some(StrategyId { family, n }),
            _ => None,
        }
    }

    pub fn partitions(&self) -> u32 {
        self.strategy().map_or(0, |s| s.n)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PortfolioPlan {
    pub jobs: Vec<Job>,
    pub total_partition_budget: u32,
    /// Partitions are list-scheduled onto cores instead of one core each.
    #[serde(default)]
    pub multijob: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PlanError {
    #[error("partition budget {0} is below the smallest strategy (2)")]
    BudgetTooSmall(u32),
    #[error("no strategy families given")]
    NoFamilies,
    #[error("hybrid portfolios need an even core count >= 4, got {0}")]
    BadHybrid(u32),
    #[error("{0} is not a power of two >= 2")]
    NotPowerOfTwo(u32),
}

/// Ordering key for multijob tasks: strategy size, family rank, then
/// partition index.
pub type TaskKey = (u32, usize, usize);

impl PortfolioPlan {
    pub fn partition_count(&self) -> u32 {
        self.jobs.iter().map(Job::partitions).sum()
    }

    pub fn strategy_sizes(&self) -> Vec<u32> {
        self.jobs.iter().filter_map(|j| j.strategy().map(|s| s.n)).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plans serialize")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

/// Pack as many family×size strategies as fit into `budget` partitions.
/// Strategies are taken in order (size ascending, then family rank) and
/// packing stops at the first one that would overflow. The budget need not
/// be a power of two.
pub fn graduated_plan(budget: u32, families: &[Family]) -> Result<PortfolioPlan, PlanError> {
    if families.is_empty() {
        return Err(PlanError::NoFamilies);
    }
    if budget < 2 {
        return Err(PlanError::BudgetTooSmall(budget));
    }
    let mut jobs = Vec::new();
    let mut used = 0;
    'sizes: for n in (1..).map(|k| 1u32 << k).take_while(|&n| n <= budget) {
        for (rank, &family) in families.iter().enumerate() {
            if used + n > budget {
                break 'sizes;
            }
            used += n;
            jobs.push(Job::partition(family, n, rank));
        }
    }
    Ok(PortfolioPlan { jobs, total_partition_budget: budget, multijob: false })
}

/// `n/2` scrambles (seed 0 is the unmodified input) plus the recommended
/// graduated portfolio over the other `n/2` cores.
pub fn hybrid_plan(n: u32) -> Result<PortfolioPlan, PlanError> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(PlanError::BadHybrid(n));
    }
    let half = n / 2;
    let mut plan = graduated_plan(half, &RECOMMENDED)?;
    let mut jobs: Vec<Job> = (0..half as u64).map(Job::scramble).collect();
    jobs.append(&mut plan.jobs);
    plan.jobs = jobs;
    Ok(plan)
}

/// The two families of the recommended portfolio.
pub const RECOMMENDED: [Family; 2] = [Family::DecisionScatter, Family::DecisionCube];

/// Every family at every size 2..=128, for multijob scheduling.
pub fn multijob_plan(families: &[Family]) -> PortfolioPlan {
    let mut jobs = Vec::new();
    for n in (1..=7).map(|k| 1u32 << k) {
        for (rank, &family) in families.iter().enumerate() {
            jobs.push(Job::partition(family, n, rank));
        }
    }
    let total = jobs.iter().map(Job::partitions).sum();
    PortfolioPlan { jobs, total_partition_budget: total, multijob: true }
}

/// One strategy on its own.
pub fn single_plan(family: Family, n: u32) -> Result<PortfolioPlan, PlanError> {
    if n < 2 || !n.is_power_of_two() {
        return Err(PlanError::NotPowerOfTwo(n));
    }
    Ok(PortfolioPlan { jobs: vec![Job::partition(family, n, 0)], total_partition_budget: n, multijob: false })
}

/// Families splitting `budget` evenly, each at the largest power of two
/// that fits its share.
pub fn split_plan(budget: u32, families: &[Family]) -> Result<PortfolioPlan, PlanError> {
    if families.is_empty() {
        return Err(PlanError::NoFamilies);
    }
    let share = budget / families.len() as u32;
    if share < 2 {
        return Err(PlanError::BudgetTooSmall(budget));
    }
    let n = 1u32 << (31 - share.leading_zeros());
    Ok(PortfolioPlan {
        jobs: families.iter().enumerate().map(|(rank, &f)| Job::partition(f, n, rank)).collect(),
        total_partition_budget: budget,
        multijob: false,
    })
}

/// `n` scrambles with seeds `0..n`.
pub fn scramble_plan(n: u32) -> PortfolioPlan {
    PortfolioPlan { jobs: (0..n as u64).map(Job::scramble).collect(), total_partition_budget: 0, multijob: false }
}

/// The plain solver on the unmodified input.
pub fn sequential_plan() -> PortfolioPlan {
    PortfolioPlan {
        jobs: vec![Job { id: "sequential".into(), kind: JobKind::SequentialRun, cores: 1 }],
        total_partition_budget: 0,
        multijob: false,
    }
}
