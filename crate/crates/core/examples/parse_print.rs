//! Parse a script, print it back, and scramble it.

use smtpart::frontend::{parse_script, print_script, scramble};

const INPUT: &str = include_str!("../data/euf_chain.smt2");

pub fn run_example() -> String {
    let script = parse_script(INPUT).expect("sample parses");
    let printed = print_script(&script);
    assert_eq!(parse_script(&printed).unwrap(), script);

    let scrambled = print_script(&scramble(&script, 7));
    format!("{printed}\n; scrambled with seed 7\n{scrambled}")
}

#[allow(dead_code)]
fn main() {
    print!("{}", run_example());
}
