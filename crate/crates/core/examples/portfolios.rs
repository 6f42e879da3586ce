//! The portfolio constructors and their partition budgets.

use smtpart::partition::Family;
use smtpart::portfolio::{graduated_plan, hybrid_plan, multijob_plan, split_plan, PortfolioPlan, RECOMMENDED};

fn describe(name: &str, plan: &PortfolioPlan) -> String {
    let jobs: Vec<&str> = plan.jobs.iter().map(|j| j.id.as_str()).collect();
    format!("{name}: {} partitions\n  {}\n", plan.partition_count(), jobs.join(" "))
}

pub fn run_example() -> String {
    let mut out = String::new();
    out += &describe("graduated 32", &graduated_plan(32, &Family::DEFAULT_RANK).unwrap());
    out += &describe("hybrid 16", &hybrid_plan(16).unwrap());
    out += &describe("split 16", &split_plan(16, &[Family::DecisionCube, Family::HeapScatter]).unwrap());
    let multi = multijob_plan(&RECOMMENDED);
    out += &format!("multijob: {} jobs, {} partitions\n", multi.jobs.len(), multi.partition_count());
    out
}

#[allow(dead_code)]
fn main() {
    print!("{}", run_example());
}
