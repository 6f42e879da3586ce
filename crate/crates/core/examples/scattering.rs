//! Scattering: each partition is a new cube minus every earlier cube.

use smtpart::frontend::parse_script;
use smtpart::partition::{partition, Family, Outcome, StrategyConfig, TimingHeuristic};

const INPUT: &str = include_str!("../data/idl_php_6_5.smt2");

pub fn run_example() -> String {
    let script = parse_script(INPUT).unwrap();
    let config = StrategyConfig::for_family(Family::HeapScatter, 8)
        .unwrap()
        .with_timing(TimingHeuristic::Check, 10.0, 10.0)
        .unwrap();
    let run = partition(&script, &config, None).unwrap();
    let mut out = format!("{} after {} partitioner calls\n", config.tag(), run.calls);
    if let Outcome::Partitioned { partitions, residual } = &run.outcome {
        for p in partitions {
            out += &format!("{}: {}\n", p.index, p.formula);
        }
        out += &format!("residual: {residual:?}\n");
    } else {
        out += &format!("{:?}\n", run.outcome);
    }
    out
}

#[allow(dead_code)]
fn main() {
    print!("{}", run_example());
}
