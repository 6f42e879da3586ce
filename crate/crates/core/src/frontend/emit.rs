//! Subproblem emission: the original script plus one partitioning formula.

use thiserror::Error;

use super::parse::Script;
use super::print::print_with;
use super::term::Term;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EmitError {
    #[error("partitioning formula uses undeclared symbol `{0}`")]
    UndeclaredSymbol(String),
}

/// Render `s` with `formula` asserted after all original assertions.
pub fn emit_subproblem(s: &Script, formula: &Term) -> Result<String, EmitError> {
    let declared = s.declared_symbols();
    if let Some(sym) = formula.symbols().into_iter().find(|x| !declared.contains(x.as_str())) {
        return Err(EmitError::UndeclaredSymbol(sym));
    }
    Ok(print_with(s, &[formula]))
}

/// `<base>.partition-<index>.smt2`
pub fn subproblem_file_name(base: &str, index: usize) -> String {
    format!("{base}.partition-{index}.smt2")
}

#[cfg(test)]
mod tests {
    use super::super::parse::parse_script;
    use super::*;

    #[test]
    fn appends_cube_before_check_sat() {
        let s = parse_script(
            "(set-logic QF_UF)(declare-const x1 Bool)(declare-const x2 Bool)(declare-const a Bool)(assert a)",
        )
        .unwrap();
        let cube = Term::And(vec![Term::bool_var("x1"), Term::bool_var("x2")]);
        let text = emit_subproblem(&s, &cube).unwrap();
        let tail: Vec<&str> = text.lines().rev().take(4).collect();
        assert_eq!(tail, vec!["(exit)", "(check-sat)", "(assert (and x1 x2))", "(assert a)"]);
        let re = parse_script(&text).unwrap();
        assert_eq!(re.assertions, vec![Term::bool_var("a"), cube]);
    }

    #[test]
    fn rejects_solver_symbols() {
        let s = parse_script("(set-logic QF_UF)(declare-const a Bool)(assert a)").unwrap();
        let err = emit_subproblem(&s, &Term::bool_var("k!0")).unwrap_err();
        assert_eq!(err, EmitError::UndeclaredSymbol("k!0".into()));
    }

    #[test]
    fn file_names() {
        assert_eq!(subproblem_file_name("bench", 3), "bench.partition-3.smt2");
    }
}
