use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::solver::{AtomSource, SelectionHeuristic};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum PartitionType {
    Cube,
    Scatter,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum TimingHeuristic {
    /// Count callback invocations.
    Check,
    /// Wall-clock seconds.
    Time,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("partition count {0} is not a power of two >= 2")]
    NotPowerOfTwo(u32),
    #[error("timing parameters must be finite and non-negative")]
    BadTiming,
    #[error("unknown {what} `{value}`")]
    Unknown { what: &'static str, value: String },
}

/// Full description of one partitioning strategy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyConfig {
    n: u32,
    pub source: AtomSource,
    pub heuristic: SelectionHeuristic,
    pub ptype: PartitionType,
    pub timing: TimingHeuristic,
    /// Wait before the first partition (seconds or callback count).
    pub t1: f64,
    /// Wait between partitions.
    pub t2: f64,
    pub seed: u64,
    /// Clear the conflict-atom counters after each scatter emission.
    pub reset_cl: bool,
    /// Keep atoms of earlier scatter cubes out of later ones.
    pub exclude_used_atoms: bool,
}

impl StrategyConfig {
    /// TIME-DECISION-CUBE-SPEC with t1=3s, t2=0.1s.
    pub fn new(n: u32) -> Result<Self, ConfigError> {
        if n < 2 || !n.is_power_of_two() {
            return Err(ConfigError::NotPowerOfTwo(n));
        }
        Ok(StrategyConfig {
            n,
            source: AtomSource::Decision,
            heuristic: SelectionHeuristic::Spec,
            ptype: PartitionType::Cube,
            timing: TimingHeuristic::Time,
            t1: 3.0,
            t2: 0.1,
            seed: 0,
            reset_cl: true,
            exclude_used_atoms: true,
        })
    }

    pub fn for_family(family: Family, n: u32) -> Result<Self, ConfigError> {
        let (source, ptype) = family.parts();
        Ok(StrategyConfig { source, ptype, ..StrategyConfig::new(n)? })
    }

    pub fn with_timing(mut self, timing: TimingHeuristic, t1: f64, t2: f64) -> Result<Self, ConfigError> {
        if !(t1.is_finite() && t2.is_finite() && t1 >= 0.0 && t2 >= 0.0) {
            return Err(ConfigError::BadTiming);
        }
        self.timing = timing;
        self.t1 = t1;
        self.t2 = t2;
        Ok(self)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn cube_size(&self) -> usize {
        self.n.trailing_zeros() as usize
    }

    /// e.g. `TIME-DECISION-SCATTER-SPEC-8`
    pub fn tag(&self) -> String {
        format!(
            "{}-{}-{}-{}-{}",
            upper(&self.timing),
            upper(&self.source),
            upper(&self.ptype),
            upper(&self.heuristic),
            self.n
        )
    }
}

fn upper<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

/// Named (source, partition type) pairs. Selection is always SPEC.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    DecisionScatter,
    DecisionCube,
    ClCube,
    HeapCube,
    HeapScatter,
    ClScatter,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::DecisionScatter,
        Family::DecisionCube,
        Family::ClCube,
        Family::HeapCube,
        Family::HeapScatter,
        Family::ClScatter,
    ];

    /// Default ranking used by graduated portfolios.
    pub const DEFAULT_RANK: [Family; 3] = [Family::DecisionScatter, Family::DecisionCube, Family::ClCube];

    pub fn parts(self) -> (AtomSource, PartitionType) {
        use AtomSource::*;
        use PartitionType::*;
        match self {
            Family::DecisionScatter => (Decision, Scatter),
            Family::DecisionCube => (Decision, Cube),
            Family::ClCube => (Cl, Cube),
            Family::HeapCube => (Heap, Cube),
            Family::HeapScatter => (Heap, Scatter),
            Family::ClScatter => (Cl, Scatter),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::DecisionScatter => "decision-scatter",
            Family::DecisionCube => "decision-cube",
            Family::ClCube => "cl-cube",
            Family::HeapCube => "heap-cube",
            Family::HeapScatter => "heap-scatter",
            Family::ClScatter => "cl-scatter",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| ConfigError::Unknown { what: "strategy family", value: s.to_string() })
    }
}
