//! Seeded, satisfiability-preserving perturbation of a script.
//!
//! Three transformations are applied, all purely structural: assertion order
//! is shuffled, every declared symbol is renamed injectively, and the
//! arguments of `and`, `or`, `=` and `+` are permuted.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::parse::{Declaration, Script};
use super::term::{Sort, Term};

/// Scramble `s` with `seed`. Seed 0 returns the script unchanged.
pub fn scramble(s: &Script, seed: u64) -> Script {
    if seed == 0 {
        return s.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let renaming = fresh_names(&s.declarations, &mut rng);

    let declarations = s
        .declarations
        .iter()
        .map(|d| match d {
            Declaration::Sort { name } => Declaration::Sort { name: renaming[name].clone() },
            Declaration::Fun { name, args, ret } => Declaration::Fun {
                name: renaming[name].clone(),
                args: args.iter().map(|a| rename_sort(a, &renaming)).collect(),
                ret: rename_sort(ret, &renaming),
            },
        })
        .collect();

    let mut assertions: Vec<Term> = s.assertions.iter().map(|a| permute(a, &renaming, &mut rng)).collect();
    assertions.shuffle(&mut rng);

    Script { logic: s.logic, declarations, assertions, source: s.source.clone() }
}

/// Injective renaming of every declared symbol. Sorts and functions get
/// disjoint name families, so the map stays injective across namespaces.
pub fn fresh_names(decls: &[Declaration], rng: &mut impl Rng) -> HashMap<String, String> {
    let mut order: Vec<usize> = (0..decls.len()).collect();
    order.shuffle(rng);
    decls
        .iter()
        .zip(order)
        .map(|(d, k)| {
            let fresh = match d {
                Declaration::Sort { .. } => format!("S{k}"),
                Declaration::Fun { .. } => format!("x{k}"),
            };
            (d.name().to_string(), fresh)
        })
        .collect()
}

fn rename_sort(s: &Sort, renaming: &HashMap<String, String>) -> Sort {
    match s {
        Sort::Uninterpreted(name) => Sort::Uninterpreted(renaming[name].clone()),
        other => other.clone(),
    }
}

fn permute(t: &Term, renaming: &HashMap<String, String>, rng: &mut impl Rng) -> Term {
    let mut rec = |t: &Term| permute(t, renaming, rng);
    match t {
        Term::Var(name, sort) => Term::Var(renaming[name].clone(), rename_sort(sort, renaming)),
        Term::App { func, args, sort } => Term::App {
            func: renaming[func].clone(),
            args: args.iter().map(&mut rec).collect(),
            sort: rename_sort(sort, renaming),
        },
        Term::BoolConst(_) | Term::IntConst(_) => t.clone(),
        Term::And(ts) | Term::Or(ts) => {
            let mut kids: Vec<Term> = ts.iter().map(&mut rec).collect();
            kids.shuffle(rng);
            if matches!(t, Term::And(_)) {
                Term::And(kids)
            } else {
                Term::Or(kids)
            }
        }
        Term::Eq(a, b) | Term::Plus(a, b) => {
            let (a, b) = (rec(a), rec(b));
            let (a, b) = if rng.gen_bool(0.5) { (b, a) } else { (a, b) };
            if matches!(t, Term::Eq(..)) {
                Term::eq(a, b)
            } else {
                Term::plus(a, b)
            }
        }
        Term::Not(a) => Term::not(rec(a)),
        Term::Neg(a) => Term::Neg(Box::new(rec(a))),
        Term::Implies(a, b) => Term::implies(rec(a), rec(b)),
        Term::Ite(c, a, b) => Term::ite(rec(c), rec(a), rec(b)),
        Term::Leq(a, b) => Term::leq(rec(a), rec(b)),
        Term::Lt(a, b) => Term::lt(rec(a), rec(b)),
        Term::Geq(a, b) => Term::geq(rec(a), rec(b)),
        Term::Gt(a, b) => Term::gt(rec(a), rec(b)),
        Term::Minus(a, b) => Term::minus(rec(a), rec(b)),
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse::parse_script;
    use super::super::print::print_script;
    use super::*;

    const SRC: &str = "(set-logic QF_UF)(declare-sort U 0)(declare-fun f (U) U)
        (declare-const a U)(declare-const b U)(declare-const p Bool)
        (assert (= (f a) b))(assert (or p (= a b) (not p)))(assert (not (= (f b) a)))";

    #[test]
    fn seed_zero_is_identity() {
        let s = parse_script(SRC).unwrap();
        assert_eq!(scramble(&s, 0), s);
    }

    #[test]
    fn renaming_is_injective_and_total() {
        let s = parse_script(SRC).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let names = fresh_names(&s.declarations, &mut rng);
        assert_eq!(names.len(), s.declarations.len());
        let mut images: Vec<_> = names.values().collect();
        images.sort();
        images.dedup();
        assert_eq!(images.len(), names.len());
    }

    #[test]
    fn scrambled_script_is_well_formed_and_deterministic() {
        let s = parse_script(SRC).unwrap();
        for seed in 1..6 {
            let a = scramble(&s, seed);
            assert_eq!(a, scramble(&s, seed));
            assert_eq!(a.assertions.len(), s.assertions.len());
            let reparsed = parse_script(&print_script(&a)).unwrap();
            assert_eq!(reparsed, a);
            assert!(a.declarations.iter().all(|d| !s.declared_symbols().contains(d.name())));
        }
    }
}
