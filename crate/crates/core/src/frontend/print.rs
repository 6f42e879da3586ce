//! SMT-LIB v2 printer. Output re-parses to an identical [`Script`].

use std::fmt::{self, Write as _};

use super::parse::{is_reserved, Declaration, Script};
use super::term::Term;

fn is_simple_symbol(s: &str) -> bool {
    const EXTRA: &str = "~!@$%^&*_-+=<>.?/";
    !s.is_empty()
        && !s.starts_with(|c: char| c.is_ascii_digit())
        && s.chars().all(|c| c.is_ascii_alphanumeric() || EXTRA.contains(c))
}

pub(crate) fn write_symbol(f: &mut impl fmt::Write, name: &str) -> fmt::Result {
    if is_simple_symbol(name) && !is_reserved(name) {
        f.write_str(name)
    } else {
        write!(f, "|{name}|")
    }
}

fn write_app(f: &mut impl fmt::Write, op: &str, args: &[&Term]) -> fmt::Result {
    write!(f, "({op}")?;
    for a in args {
        f.write_char(' ')?;
        write_term(f, a)?;
    }
    f.write_char(')')
}

pub(crate) fn write_term(f: &mut impl fmt::Write, t: &Term) -> fmt::Result {
    match t {
        Term::Var(name, _) => write_symbol(f, name),
        Term::BoolConst(b) => write!(f, "{b}"),
        Term::IntConst(k) if *k < 0 => write!(f, "(- {})", k.unsigned_abs()),
        Term::IntConst(k) => write!(f, "{k}"),
        Term::App { func, args, .. } => {
            f.write_char('(')?;
            write_symbol(f, func)?;
            for a in args {
                f.write_char(' ')?;
                write_term(f, a)?;
            }
            f.write_char(')')
        }
        Term::Eq(a, b) => write_app(f, "=", &[a, b]),
        Term::Not(a) => write_app(f, "not", &[a]),
        Term::And(ts) => write_app(f, "and", &ts.iter().collect::<Vec<_>>()),
        Term::Or(ts) => write_app(f, "or", &ts.iter().collect::<Vec<_>>()),
        Term::Implies(a, b) => write_app(f, "=>", &[a, b]),
        Term::Ite(c, a, b) => write_app(f, "ite", &[c, a, b]),
        Term::Leq(a, b) => write_app(f, "<=", &[a, b]),
        Term::Lt(a, b) => write_app(f, "<", &[a, b]),
        Term::Geq(a, b) => write_app(f, ">=", &[a, b]),
        Term::Gt(a, b) => write_app(f, ">", &[a, b]),
        Term::Plus(a, b) => write_app(f, "+", &[a, b]),
        Term::Minus(a, b) => write_app(f, "-", &[a, b]),
        Term::Neg(a) => write_app(f, "-", &[a]),
    }
}

pub fn term_to_string(t: &Term) -> String {
    let mut s = String::new();
    write_term(&mut s, t).expect("writing to a String cannot fail");
    s
}

fn write_declaration(out: &mut String, d: &Declaration) -> fmt::Result {
    match d {
        Declaration::Sort { name } => {
            out.push_str("(declare-sort ");
            write_symbol(out, name)?;
            out.push_str(" 0)\n");
        }
        Declaration::Fun { name, args, ret } => {
            out.push_str("(declare-fun ");
            write_symbol(out, name)?;
            out.push_str(" (");
            for (i, s) in args.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                write!(out, "{s}")?;
            }
            writeln!(out, ") {ret})")?;
        }
    }
    Ok(())
}

/// Print a script followed by extra assertions, then `(check-sat)` and `(exit)`.
pub(crate) fn print_with(s: &Script, extra: &[&Term]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "(set-logic {})", s.logic.name());
    for d in &s.declarations {
        write_declaration(&mut out, d).expect("writing to a String cannot fail");
    }
    for a in s.assertions.iter().chain(extra.iter().copied()) {
        out.push_str("(assert ");
        write_term(&mut out, a).expect("writing to a String cannot fail");
        out.push_str(")\n");
    }
    out.push_str("(check-sat)\n(exit)\n");
    out
}

/// Render `s` as SMT-LIB v2 text.
pub fn print_script(s: &Script) -> String {
    print_with(s, &[])
}
