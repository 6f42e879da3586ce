//! Run a hybrid portfolio on every sample benchmark with the built-in solver.

use std::path::Path;
use std::time::Duration;

use smtpart::harness::{par2_score, run_plan, write_csv, Benchmark, RunConfig};
use smtpart::partition::TimingHeuristic;
use smtpart::portfolio::hybrid_plan;

pub fn run_example() -> String {
    let corpus = Benchmark::load_corpus(&Path::new(env!("CARGO_MANIFEST_DIR")).join("data")).unwrap();
    let plan = hybrid_plan(4).unwrap();
    let mut cfg = RunConfig::new(Duration::from_secs(30), 4);
    cfg.strategy = cfg.strategy.with_timing(TimingHeuristic::Check, 20.0, 5.0).unwrap();

    let mut out = String::new();
    let mut results = Vec::new();
    let mut records = Vec::new();
    for bench in &corpus {
        let report = run_plan(&plan, bench, &cfg).unwrap();
        out += &format!("{}: {} {:.3}s\n", bench.name, report.result.verdict.name(), report.result.time);
        results.push(report.result);
        records.extend(report.records);
    }
    out += &format!("PAR-2: {:.3}\n", par2_score(&results, 30.0));
    let mut csv = Vec::new();
    write_csv(&mut csv, &records).unwrap();
    out += &String::from_utf8(csv).unwrap();
    out
}

#[allow(dead_code)]
fn main() {
    print!("{}", run_example());
}
