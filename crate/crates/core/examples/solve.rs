//! Solve a small job-shop instance and print the start times.

use smtpart::frontend::parse_script;
use smtpart::solver::{solve, SolveResult};

const INPUT: &str = include_str!("../data/jobshop.smt2");

pub fn run_example() -> String {
    let script = parse_script(INPUT).unwrap();
    match solve(&script, None).unwrap() {
        SolveResult::Sat(model) => {
            assert!(model.satisfies(&script).unwrap());
            let mut out = String::from("sat\n");
            for (name, value) in &model.consts {
                out += &format!("  {name} = {value}\n");
            }
            out
        }
        other => format!("{other:?}\n"),
    }
}

#[allow(dead_code)]
fn main() {
    print!("{}", run_example());
}
