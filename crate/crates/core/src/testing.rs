//! Small instance generators shared by tests and examples.

use std::fmt::Write;

/// Pigeonhole principle as QF_UF: `pigeons` pigeons into `holes` holes.
/// Unsatisfiable when `pigeons > holes`.
pub fn pigeonhole(pigeons: usize, holes: usize) -> String {
    let mut s = String::from("(set-logic QF_UF)\n");
    for p in 0..pigeons {
        for h in 0..holes {
            writeln!(s, "(declare-const p{p}_{h} Bool)").unwrap();
        }
    }
    for p in 0..pigeons {
        let lits: Vec<String> = (0..holes).map(|h| format!("p{p}_{h}")).collect();
        writeln!(s, "(assert (or {}))", lits.join(" ")).unwrap();
    }
    for h in 0..holes {
        for a in 0..pigeons {
            for b in a + 1..pigeons {
                writeln!(s, "(assert (or (not p{a}_{h}) (not p{b}_{h})))").unwrap();
            }
        }
    }
    s.push_str("(check-sat)\n");
    s
}

/// Pigeonhole over integers: each pigeon `x_i` picks a hole in
/// `[0, holes)` and pigeons are pairwise distinct.
pub fn idl_pigeonhole(pigeons: usize, holes: usize) -> String {
    let mut s = String::from("(set-logic QF_IDL)\n");
    for p in 0..pigeons {
        writeln!(s, "(declare-const x{p} Int)").unwrap();
        writeln!(s, "(assert (and (>= x{p} 0) (< x{p} {holes})))").unwrap();
    }
    for a in 0..pigeons {
        for b in a + 1..pigeons {
            writeln!(s, "(assert (or (< x{a} x{b}) (> x{a} x{b})))").unwrap();
        }
    }
    s.push_str("(check-sat)\n");
    s
}
