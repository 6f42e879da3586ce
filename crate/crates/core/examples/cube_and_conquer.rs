//! Split an unsatisfiable pigeonhole instance into 8 cubes and solve each.

use smtpart::frontend::parse_script;
use smtpart::harness::{aggregate_job, run_embedded, RunRecord};
use smtpart::partition::{partition, subproblem, Family, Outcome, StrategyConfig, TimingHeuristic};
use std::time::Duration;

const INPUT: &str = include_str!("../data/php_6_5.smt2");

pub fn run_example() -> String {
    let script = parse_script(INPUT).unwrap();
    // open the gate after 20 decisions instead of waiting 3 seconds
    let config = StrategyConfig::for_family(Family::DecisionCube, 8)
        .unwrap()
        .with_timing(TimingHeuristic::Check, 20.0, 1.0)
        .unwrap();
    let run = partition(&script, &config, Some(Duration::from_secs(60))).unwrap();
    let Outcome::Partitioned { partitions, .. } = &run.outcome else {
        return format!("solved during partitioning: {:?}\n", run.outcome);
    };

    let mut out = String::new();
    let mut records = Vec::new();
    for p in partitions {
        let o = run_embedded(&subproblem(&script, &p.formula), Duration::from_secs(60));
        out += &format!("{:>2} {:<6} {}\n", p.index, o.verdict.name(), p.formula);
        records.push(RunRecord {
            benchmark: "php_6_5".into(),
            job: config.tag(),
            partition: p.index.to_string(),
            verdict: o.verdict,
            wall_time: o.wall_time,
            partition_time: run.elapsed.as_secs_f64(),
            diagnostic: None,
        });
    }
    let total = aggregate_job(&records, run.elapsed.as_secs_f64(), 60.0);
    out += &format!("{}: {}\n", config.tag(), total.verdict.name());
    out
}

#[allow(dead_code)]
fn main() {
    print!("{}", run_example());
}
