//! Running plans, aggregating their results and scoring them.
//!
//! Partition jobs run the partitioning solver first, write one `.smt2` file
//! per partition and then solve every subproblem on the chosen
//! [`Executor`]. Job results combine as "all partitions unsat" or "some
//! partition sat"; a portfolio takes its fastest decisive job.

mod aggregate;
mod executor;
mod record;
mod run;
mod schedule;

pub use aggregate::{aggregate_job, aggregate_portfolio, par2_score, Aggregate, IntegrityError};
pub use executor::{run_embedded, Executor, Outcome};
pub use record::{read_csv, write_csv, RunRecord, Verdict, CSV_HEADER};
pub use run::{parallel_map, run_plan, Benchmark, HarnessError, JobSummary, PlanReport, RunConfig, SCRATCH_ENV};
pub use schedule::{key_order, multijob_outcome, multijob_schedule, CoreSchedule, Placed, ScheduleError, Task};
