//! SMT-LIB v2 reader for the QF_UF / QF_IDL subset.

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use super::diff::{self, Cmp, DiffError};
use super::sexp::{read_all, Atom, SExpr};
use super::term::{Sort, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    Sort(String),
    Undeclared(String),
    UnsupportedLogic(String),
    Unsupported(String),
    NonDifference(String),
    Overflow(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{pos}: {}", describe(.kind))]
pub struct ParseError {
    pub pos: Pos,
    pub kind: ParseErrorKind,
}

fn describe(kind: &ParseErrorKind) -> String {
    match kind {
        ParseErrorKind::Syntax(m) => format!("syntax error: {m}"),
        ParseErrorKind::Sort(m) => format!("sort error: {m}"),
        ParseErrorKind::Undeclared(s) => format!("undeclared symbol `{s}`"),
        ParseErrorKind::UnsupportedLogic(l) => format!("unsupported logic `{l}`"),
        ParseErrorKind::Unsupported(m) => format!("unsupported: {m}"),
        ParseErrorKind::NonDifference(m) => format!("non-difference arithmetic: {m}"),
        ParseErrorKind::Overflow(m) => format!("integer out of range: {m}"),
    }
}

impl ParseError {
    pub fn new(pos: Pos, kind: ParseErrorKind) -> Self {
        ParseError { pos, kind }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Logic {
    QfUf,
    QfIdl,
}

impl Logic {
    pub fn name(self) -> &'static str {
        match self {
            Logic::QfUf => "QF_UF",
            Logic::QfIdl => "QF_IDL",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Declaration {
    Sort { name: String },
    Fun { name: String, args: Vec<Sort>, ret: Sort },
}

impl Declaration {
    pub fn name(&self) -> &str {
        match self {
            Declaration::Sort { name } | Declaration::Fun { name, .. } => name,
        }
    }
}

/// A parsed benchmark: logic, declarations and assertions in source order.
#[derive(Clone, Debug)]
pub struct Script {
    pub logic: Logic,
    pub declarations: Vec<Declaration>,
    pub assertions: Vec<Term>,
    /// File the script was read from, if any. Not part of script equality.
    pub source: Option<String>,
}

impl PartialEq for Script {
    fn eq(&self, other: &Self) -> bool {
        self.logic == other.logic && self.declarations == other.declarations && self.assertions == other.assertions
    }
}

impl Eq for Script {}

impl Script {
    pub fn new(logic: Logic) -> Self {
        Script { logic, declarations: Vec::new(), assertions: Vec::new(), source: None }
    }

    /// Every declared sort and function symbol.
    pub fn declared_symbols(&self) -> HashSet<&str> {
        self.declarations.iter().map(|d| d.name()).collect()
    }
}

struct Parser {
    logic: Option<Logic>,
    sorts: HashSet<String>,
    funs: HashMap<String, (Vec<Sort>, Sort)>,
    lets: Vec<HashMap<String, Term>>,
    script_decls: Vec<Declaration>,
    assertions: Vec<Term>,
}

type PResult<T> = Result<T, ParseError>;

fn err<T>(pos: Pos, kind: ParseErrorKind) -> PResult<T> {
    Err(ParseError::new(pos, kind))
}

fn syntax<T>(pos: Pos, msg: impl Into<String>) -> PResult<T> {
    err(pos, ParseErrorKind::Syntax(msg.into()))
}

fn sort_err<T>(pos: Pos, msg: impl Into<String>) -> PResult<T> {
    err(pos, ParseErrorKind::Sort(msg.into()))
}

impl Parser {
    fn logic(&self, pos: Pos) -> PResult<Logic> {
        self.logic.ok_or_else(|| ParseError::new(pos, ParseErrorKind::Syntax("missing set-logic".into())))
    }

    fn command(&mut self, e: &SExpr) -> PResult<bool> {
        let SExpr::List(items, pos) = e else {
            return syntax(e.pos(), "expected a command");
        };
        let pos = *pos;
        let Some(head) = items.first().and_then(SExpr::as_symbol) else {
            return syntax(pos, "expected a command name");
        };
        match head {
            "set-logic" => {
                if self.logic.is_some() {
                    return syntax(pos, "logic set twice");
                }
                let name = arg_symbol(items, 1, pos)?;
                self.logic = Some(match name {
                    "QF_UF" => Logic::QfUf,
                    "QF_IDL" => Logic::QfIdl,
                    other => return err(pos, ParseErrorKind::UnsupportedLogic(other.to_string())),
                });
            }
            "set-info" | "set-option" => {}
            "declare-sort" => {
                let logic = self.logic(pos)?;
                let name = arg_symbol(items, 1, pos)?.to_string();
                if logic != Logic::QfUf {
                    return sort_err(pos, "declare-sort is only available in QF_UF");
                }
                match items.get(2) {
                    Some(SExpr::Atom(Atom::Numeral(n), _)) if n == "0" => {}
                    Some(other) => return err(other.pos(), ParseErrorKind::Unsupported("parametric sorts".into())),
                    None => {}
                }
                self.declare_name(&name, pos)?;
                self.sorts.insert(name.clone());
                self.script_decls.push(Declaration::Sort { name });
            }
            "declare-fun" | "declare-const" => {
                let logic = self.logic(pos)?;
                let name = arg_symbol(items, 1, pos)?.to_string();
                let (args, ret) = if head == "declare-fun" {
                    let SExpr::List(arg_sorts, _) = items.get(2).ok_or_else(|| missing(pos, "argument sorts"))? else {
                        return syntax(pos, "expected a list of argument sorts");
                    };
                    let args = arg_sorts.iter().map(|s| self.sort(s)).collect::<PResult<Vec<_>>>()?;
                    let ret = self.sort(items.get(3).ok_or_else(|| missing(pos, "result sort"))?)?;
                    if items.len() > 4 {
                        return syntax(pos, "trailing arguments to declare-fun");
                    }
                    (args, ret)
                } else {
                    let ret = self.sort(items.get(2).ok_or_else(|| missing(pos, "sort"))?)?;
                    (Vec::new(), ret)
                };
                if !args.is_empty() {
                    if logic == Logic::QfIdl {
                        return sort_err(pos, "QF_IDL has no uninterpreted functions");
                    }
                    if args.contains(&Sort::Bool) {
                        return err(
                            pos,
                            ParseErrorKind::Unsupported("Bool-sorted arguments of uninterpreted functions".into()),
                        );
                    }
                }
                self.declare_name(&name, pos)?;
                self.funs.insert(name.clone(), (args.clone(), ret.clone()));
                self.script_decls.push(Declaration::Fun { name, args, ret });
            }
            "assert" => {
                self.logic(pos)?;
                if items.len() != 2 {
                    return syntax(pos, "assert takes exactly one term");
                }
                let t = self.term(&items[1])?;
                if t.sort() != Sort::Bool {
                    return sort_err(items[1].pos(), format!("assertion has sort {}", t.sort()));
                }
                self.assertions.push(t);
            }
            "check-sat" => {
                self.logic(pos)?;
            }
            "exit" => return Ok(false),
            other => return err(pos, ParseErrorKind::Unsupported(format!("command `{other}`"))),
        }
        Ok(true)
    }

    fn declare_name(&self, name: &str, pos: Pos) -> PResult<()> {
        if self.sorts.contains(name) || self.funs.contains_key(name) {
            return syntax(pos, format!("symbol `{name}` declared twice"));
        }
        if is_reserved(name) {
            return syntax(pos, format!("`{name}` is a reserved or built-in symbol"));
        }
        Ok(())
    }

    fn sort(&self, e: &SExpr) -> PResult<Sort> {
        let logic = self.logic(e.pos())?;
        match e.as_symbol() {
            Some("Bool") => Ok(Sort::Bool),
            Some("Int") if logic == Logic::QfIdl => Ok(Sort::Int),
            Some("Int") => sort_err(e.pos(), "Int is not available in QF_UF"),
            Some(name) if self.sorts.contains(name) => Ok(Sort::Uninterpreted(name.to_string())),
            Some(name) => err(e.pos(), ParseErrorKind::Undeclared(name.to_string())),
            None => err(e.pos(), ParseErrorKind::Unsupported("compound sorts".into())),
        }
    }

    fn lookup_let(&self, name: &str) -> Option<&Term> {
        self.lets.iter().rev().find_map(|scope| scope.get(name))
    }

    fn term(&mut self, e: &SExpr) -> PResult<Term> {
        let logic = self.logic(e.pos())?;
        match e {
            SExpr::Atom(Atom::Numeral(n), pos) => {
                if logic != Logic::QfIdl {
                    return sort_err(*pos, "numerals are not available in QF_UF");
                }
                parse_numeral(n, *pos, false)
            }
            SExpr::Atom(Atom::Symbol(s), pos) => {
                if let Some(t) = self.lookup_let(s) {
                    return Ok(t.clone());
                }
                match s.as_str() {
                    "true" => Ok(Term::BoolConst(true)),
                    "false" => Ok(Term::BoolConst(false)),
                    _ => match self.funs.get(s) {
                        Some((args, ret)) if args.is_empty() => Ok(Term::Var(s.clone(), ret.clone())),
                        Some(_) => sort_err(*pos, format!("function `{s}` used without arguments")),
                        None => err(*pos, ParseErrorKind::Undeclared(s.clone())),
                    },
                }
            }
            SExpr::Atom(_, pos) => syntax(*pos, "unexpected literal in term position"),
            SExpr::List(items, pos) => self.application(items, *pos, logic),
        }
    }

    fn application(&mut self, items: &[SExpr], pos: Pos, logic: Logic) -> PResult<Term> {
        let Some(head) = items.first() else {
            return syntax(pos, "empty application");
        };
        let Some(op) = head.as_symbol() else {
            return err(pos, ParseErrorKind::Unsupported("indexed or qualified identifiers".into()));
        };
        let op = op.to_string();
        let raw_args = &items[1..];

        match op.as_str() {
            "let" => return self.let_term(raw_args, pos),
            "forall" | "exists" => return err(pos, ParseErrorKind::Unsupported("quantifiers".into())),
            "!" => return err(pos, ParseErrorKind::Unsupported("term annotations".into())),
            "*" | "div" | "mod" | "abs" | "/" if logic == Logic::QfIdl => {
                return err(pos, ParseErrorKind::NonDifference(format!("operator `{op}`")))
            }
            "-" if logic == Logic::QfIdl
                && raw_args.len() == 1
                && matches!(raw_args[0], SExpr::Atom(Atom::Numeral(_), _)) =>
            {
                let SExpr::Atom(Atom::Numeral(n), p) = &raw_args[0] else { unreachable!() };
                return parse_numeral(n, *p, true);
            }
            _ => {}
        }

        let args = raw_args.iter().map(|a| self.term(a)).collect::<PResult<Vec<_>>>()?;
        let sorts: Vec<Sort> = args.iter().map(Term::sort).collect();
        let need_bool = |p: Pos| -> PResult<()> {
            match sorts.iter().position(|s| *s != Sort::Bool) {
                Some(i) => sort_err(p, format!("argument {} of `{op}` is not Bool", i + 1)),
                None => Ok(()),
            }
        };
        let need_int = |p: Pos| -> PResult<()> {
            if logic != Logic::QfIdl {
                return sort_err(p, format!("`{op}` requires QF_IDL"));
            }
            match sorts.iter().position(|s| *s != Sort::Int) {
                Some(i) => sort_err(p, format!("argument {} of `{op}` is not Int", i + 1)),
                None => Ok(()),
            }
        };
        let arity = |min: usize, max: Option<usize>| -> PResult<()> {
            let n = args.len();
            if n < min || max.is_some_and(|m| n > m) {
                syntax(pos, format!("wrong number of arguments to `{op}`"))
            } else {
                Ok(())
            }
        };

        let term = match op.as_str() {
            "not" => {
                arity(1, Some(1))?;
                need_bool(pos)?;
                Term::not(args.into_iter().next().unwrap())
            }
            "and" | "or" => {
                arity(1, None)?;
                need_bool(pos)?;
                if op == "and" {
                    Term::And(args)
                } else {
                    Term::Or(args)
                }
            }
            "=>" => {
                arity(2, None)?;
                need_bool(pos)?;
                let mut it = args.into_iter().rev();
                let last = it.next().unwrap();
                it.fold(last, |acc, a| Term::implies(a, acc))
            }
            "xor" => {
                arity(2, None)?;
                need_bool(pos)?;
                let mut it = args.into_iter();
                let first = it.next().unwrap();
                it.fold(first, |acc, a| Term::not(Term::eq(acc, a)))
            }
            "ite" => {
                arity(3, Some(3))?;
                if sorts[0] != Sort::Bool {
                    return sort_err(pos, "ite condition is not Bool");
                }
                if sorts[1] != sorts[2] {
                    return sort_err(pos, "ite branches have different sorts");
                }
                let mut it = args.into_iter();
                Term::ite(it.next().unwrap(), it.next().unwrap(), it.next().unwrap())
            }
            "=" | "distinct" => {
                arity(2, None)?;
                if sorts.iter().any(|s| *s != sorts[0]) {
                    return sort_err(pos, format!("arguments of `{op}` have different sorts"));
                }
                let mut parts = Vec::new();
                if op == "=" {
                    for w in args.windows(2) {
                        parts.push(self.equality(&w[0], &w[1], pos)?);
                    }
                } else {
                    for i in 0..args.len() {
                        for j in i + 1..args.len() {
                            parts.push(Term::not(self.equality(&args[i], &args[j], pos)?));
                        }
                    }
                }
                Term::conjoin(parts)
            }
            "<=" | "<" | ">=" | ">" => {
                arity(2, None)?;
                need_int(pos)?;
                let (cmp, ctor): (Cmp, fn(Term, Term) -> Term) = match op.as_str() {
                    "<=" => (Cmp::Le, Term::leq),
                    "<" => (Cmp::Lt, Term::lt),
                    ">=" => (Cmp::Ge, Term::geq),
                    _ => (Cmp::Gt, Term::gt),
                };
                let mut parts = Vec::new();
                for w in args.windows(2) {
                    validate_difference(cmp, &w[0], &w[1], pos)?;
                    parts.push(ctor(w[0].clone(), w[1].clone()));
                }
                Term::conjoin(parts)
            }
            "+" => {
                arity(2, None)?;
                need_int(pos)?;
                let mut it = args.into_iter();
                let first = it.next().unwrap();
                it.fold(first, Term::plus)
            }
            "-" => {
                arity(1, None)?;
                need_int(pos)?;
                let mut it = args.into_iter();
                let first = it.next().unwrap();
                if raw_args.len() == 1 {
                    Term::Neg(Box::new(first))
                } else {
                    it.fold(first, Term::minus)
                }
            }
            name => match self.funs.get(name) {
                Some((params, ret)) if !params.is_empty() => {
                    if params.len() != args.len() {
                        return sort_err(pos, format!("`{name}` expects {} arguments", params.len()));
                    }
                    if let Some(i) = (0..params.len()).find(|&i| params[i] != sorts[i]) {
                        return sort_err(
                            raw_args[i].pos(),
                            format!("argument {} of `{name}` has sort {}", i + 1, sorts[i]),
                        );
                    }
                    Term::app(name, args, ret.clone())
                }
                Some(_) => return sort_err(pos, format!("`{name}` is a constant")),
                None if is_reserved(name) => {
                    return err(pos, ParseErrorKind::Unsupported(format!("operator `{name}`")))
                }
                None => return err(head.pos(), ParseErrorKind::Undeclared(name.to_string())),
            },
        };
        Ok(term)
    }

    fn equality(&self, a: &Term, b: &Term, pos: Pos) -> PResult<Term> {
        if a.sort() == Sort::Int {
            validate_difference(Cmp::Eq, a, b, pos)?;
        }
        Ok(Term::eq(a.clone(), b.clone()))
    }

    fn let_term(&mut self, raw_args: &[SExpr], pos: Pos) -> PResult<Term> {
        let [SExpr::List(bindings, _), body] = raw_args else {
            return syntax(pos, "malformed let");
        };
        let mut scope = HashMap::new();
        for b in bindings {
            let SExpr::List(pair, bpos) = b else {
                return syntax(b.pos(), "malformed let binding");
            };
            let [name, value] = pair.as_slice() else {
                return syntax(*bpos, "malformed let binding");
            };
            let Some(name) = name.as_symbol() else {
                return syntax(*bpos, "let binding name must be a symbol");
            };
            // parallel binding: values see only the enclosing scopes
            let value = self.term(value)?;
            scope.insert(name.to_string(), value);
        }
        self.lets.push(scope);
        let body = self.term(body);
        self.lets.pop();
        body
    }
}

fn validate_difference(cmp: Cmp, a: &Term, b: &Term, pos: Pos) -> PResult<()> {
    diff::normalize(cmp, a, b).map(|_| ()).map_err(|e| {
        let kind = match e {
            DiffError::NonDifference(m) => ParseErrorKind::NonDifference(m),
            DiffError::Overflow(v) => ParseErrorKind::Overflow(v.to_string()),
        };
        ParseError::new(pos, kind)
    })
}

fn parse_numeral(n: &str, pos: Pos, negate: bool) -> PResult<Term> {
    let v: i64 = n.parse().map_err(|_| ParseError::new(pos, ParseErrorKind::Overflow(n.to_string())))?;
    if v > diff::MAX_BOUND {
        return err(pos, ParseErrorKind::Overflow(n.to_string()));
    }
    Ok(Term::IntConst(if negate { -v } else { v }))
}

fn missing(pos: Pos, what: &str) -> ParseError {
    ParseError::new(pos, ParseErrorKind::Syntax(format!("missing {what}")))
}

fn arg_symbol(items: &[SExpr], i: usize, pos: Pos) -> PResult<&str> {
    items.get(i).and_then(SExpr::as_symbol).ok_or_else(|| missing(pos, "symbol"))
}

const RESERVED: &[&str] = &[
    "true", "false", "not", "and", "or", "=>", "xor", "=", "distinct", "ite", "<=", "<", ">=", ">", "+", "-", "*",
    "div", "mod", "abs", "let", "forall", "exists", "!", "_", "as", "Bool", "Int", "par", "match", "NUMERAL",
    "DECIMAL", "STRING",
];

pub(crate) fn is_reserved(name: &str) -> bool {
    RESERVED.contains(&name)
}

/// Parse an SMT-LIB v2 script in the supported subset.
pub fn parse_script(text: &str) -> Result<Script, ParseError> {
    let exprs = read_all(text)?;
    let mut p = Parser {
        logic: None,
        sorts: HashSet::new(),
        funs: HashMap::new(),
        lets: Vec::new(),
        script_decls: Vec::new(),
        assertions: Vec::new(),
    };
    for e in &exprs {
        if !p.command(e)? {
            break;
        }
    }
    let logic = p.logic(Pos { line: 1, col: 1 })?;
    Ok(Script { logic, declarations: p.script_decls, assertions: p.assertions, source: None })
}
