use std::fmt;
use std::io;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Sat,
    Unsat,
    Timeout,
    Error,
}

impl Verdict {
    pub fn is_decisive(self) -> bool {
        matches!(self, Verdict::Sat | Verdict::Unsat)
    }

    pub fn name(self) -> &'static str {
        match self {
            Verdict::Sat => "sat",
            Verdict::Unsat => "unsat",
            Verdict::Timeout => "timeout",
            Verdict::Error => "error",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Verdict {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sat" => Ok(Verdict::Sat),
            "unsat" => Ok(Verdict::Unsat),
            "timeout" => Ok(Verdict::Timeout),
            "error" => Ok(Verdict::Error),
            _ => Err(format!("unknown verdict `{s}`")),
        }
    }
}

/// One solver run. `partition` holds the partition index, `seed=<k>` for
/// scramble runs, or `-` when a job made no subproblem runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub benchmark: String,
    pub job: String,
    pub partition: String,
    pub verdict: Verdict,
    /// Seconds.
    pub wall_time: f64,
    /// Seconds spent by this job's partitioning solver.
    pub partition_time: f64,
    #[serde(skip)]
    pub diagnostic: Option<String>,
}

pub const CSV_HEADER: &str = "benchmark,job,partition,verdict,wall_time,partition_time";

/// Write records as CSV with a header row.
pub fn write_csv<W: io::Write>(out: W, records: &[RunRecord]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if records.is_empty() {
        w.write_record(CSV_HEADER.split(','))?;
    }
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: io::Read>(input: R) -> csv::Result<Vec<RunRecord>> {
    csv::Reader::from_reader(input).deserialize().collect()
}
