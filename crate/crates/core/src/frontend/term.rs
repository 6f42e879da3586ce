//! Sorted terms for the QF_UF / QF_IDL fragment.

use std::collections::BTreeSet;
use std::fmt;

/// The sort of a term.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Bool,
    Int,
    Uninterpreted(String),
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Bool => f.write_str("Bool"),
            Sort::Int => f.write_str("Int"),
            Sort::Uninterpreted(name) => super::print::write_symbol(f, name),
        }
    }
}

/// A term of the supported fragment.
///
/// Constructors do not check sorts; [`super::parse_script`] is the only way
/// to obtain terms that are guaranteed well-sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    /// A declared constant.
    Var(String, Sort),
    BoolConst(bool),
    IntConst(i64),
    /// Application of a declared function of non-zero arity.
    App {
        func: String,
        args: Vec<Term>,
        sort: Sort,
    },
    Eq(Box<Term>, Box<Term>),
    Not(Box<Term>),
    And(Vec<Term>),
    Or(Vec<Term>),
    Implies(Box<Term>, Box<Term>),
    Ite(Box<Term>, Box<Term>, Box<Term>),
    Leq(Box<Term>, Box<Term>),
    Lt(Box<Term>, Box<Term>),
    Geq(Box<Term>, Box<Term>),
    Gt(Box<Term>, Box<Term>),
    Plus(Box<Term>, Box<Term>),
    Minus(Box<Term>, Box<Term>),
    Neg(Box<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>, sort: Sort) -> Term {
        Term::Var(name.into(), sort)
    }

    pub fn bool_var(name: impl Into<String>) -> Term {
        Term::Var(name.into(), Sort::Bool)
    }

    pub fn int_var(name: impl Into<String>) -> Term {
        Term::Var(name.into(), Sort::Int)
    }

    pub fn eq(lhs: Term, rhs: Term) -> Term {
        Term::Eq(Box::new(lhs), Box::new(rhs))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(t: Term) -> Term {
        Term::Not(Box::new(t))
    }

    pub fn leq(lhs: Term, rhs: Term) -> Term {
        Term::Leq(Box::new(lhs), Box::new(rhs))
    }

    pub fn lt(lhs: Term, rhs: Term) -> Term {
        Term::Lt(Box::new(lhs), Box::new(rhs))
    }

    pub fn geq(lhs: Term, rhs: Term) -> Term {
        Term::Geq(Box::new(lhs), Box::new(rhs))
    }

    pub fn gt(lhs: Term, rhs: Term) -> Term {
        Term::Gt(Box::new(lhs), Box::new(rhs))
    }

    pub fn minus(lhs: Term, rhs: Term) -> Term {
        Term::Minus(Box::new(lhs), Box::new(rhs))
    }

    pub fn plus(lhs: Term, rhs: Term) -> Term {
        Term::Plus(Box::new(lhs), Box::new(rhs))
    }

    pub fn implies(lhs: Term, rhs: Term) -> Term {
        Term::Implies(Box::new(lhs), Box::new(rhs))
    }

    pub fn ite(c: Term, t: Term, e: Term) -> Term {
        Term::Ite(Box::new(c), Box::new(t), Box::new(e))
    }

    pub fn app(func: impl Into<String>, args: Vec<Term>, sort: Sort) -> Term {
        Term::App { func: func.into(), args, sort }
    }

    /// Conjunction that avoids degenerate `and` nodes: no conjuncts is
    /// `true`, a single conjunct is returned as is.
    pub fn conjoin(mut terms: Vec<Term>) -> Term {
        match terms.len() {
            0 => Term::BoolConst(true),
            1 => terms.pop().unwrap(),
            _ => Term::And(terms),
        }
    }

    pub fn disjoin(mut terms: Vec<Term>) -> Term {
        match terms.len() {
            0 => Term::BoolConst(false),
            1 => terms.pop().unwrap(),
            _ => Term::Or(terms),
        }
    }

    /// Negation that folds a leading `not` instead of stacking another one.
    pub fn negate(self) -> Term {
        match self {
            Term::Not(inner) => *inner,
            other => Term::Not(Box::new(other)),
        }
    }

    /// Sort of the term. Application sorts are carried on the node, so no
    /// declaration context is needed.
    pub fn sort(&self) -> Sort {
        match self {
            Term::Var(_, s) => s.clone(),
            Term::App { sort, .. } => sort.clone(),
            Term::IntConst(_) | Term::Plus(..) | Term::Minus(..) | Term::Neg(_) => Sort::Int,
            Term::Ite(_, t, _) => t.sort(),
            Term::BoolConst(_)
            | Term::Eq(..)
            | Term::Not(_)
            | Term::And(_)
            | Term::Or(_)
            | Term::Implies(..)
            | Term::Leq(..)
            | Term::Lt(..)
            | Term::Geq(..)
            | Term::Gt(..) => Sort::Bool,
        }
    }

    /// Immediate subterms, left to right.
    pub fn children(&self) -> Vec<&Term> {
        match self {
            Term::Var(..) | Term::BoolConst(_) | Term::IntConst(_) => Vec::new(),
            Term::App { args, .. } => args.iter().collect(),
            Term::And(ts) | Term::Or(ts) => ts.iter().collect(),
            Term::Not(t) | Term::Neg(t) => vec![t],
            Term::Ite(c, t, e) => vec![c, t, e],
            Term::Eq(a, b)
            | Term::Implies(a, b)
            | Term::Leq(a, b)
            | Term::Lt(a, b)
            | Term::Geq(a, b)
            | Term::Gt(a, b)
            | Term::Plus(a, b)
            | Term::Minus(a, b) => vec![a, b],
        }
    }

    /// True for Boolean terms without proper Boolean subterms.
    pub fn is_atom(&self) -> bool {
        self.sort() == Sort::Bool && self.children().iter().all(|c| !c.contains_bool_subterm())
    }

    fn contains_bool_subterm(&self) -> bool {
        self.sort() == Sort::Bool || self.children().iter().any(|c| c.contains_bool_subterm())
    }

    /// Names of all constants and function symbols occurring in the term.
    pub fn symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(name, sort) => {
                out.insert(name.clone());
                if let Sort::Uninterpreted(s) = sort {
                    out.insert(s.clone());
                }
            }
            Term::App { func, args, sort } => {
                out.insert(func.clone());
                if let Sort::Uninterpreted(s) = sort {
                    out.insert(s.clone());
                }
                for a in args {
                    a.collect_symbols(out);
                }
            }
            other => {
                for c in other.children() {
                    c.collect_symbols(out);
                }
            }
        }
    }

    /// Rebuild the term bottom-up, applying `f` to every node after its
    /// children have been rebuilt.
    pub fn map_bottom_up(&self, f: &mut dyn FnMut(Term) -> Term) -> Term {
        let mut b = |t: &Term| Box::new(t.map_bottom_up(f));
        let rebuilt = match self {
            Term::Var(..) | Term::BoolConst(_) | Term::IntConst(_) => self.clone(),
            Term::App { func, args, sort } => {
                Term::App { func: func.clone(), args: args.iter().map(|a| *b(a)).collect(), sort: sort.clone() }
            }
            Term::Eq(x, y) => Term::Eq(b(x), b(y)),
            Term::Not(x) => Term::Not(b(x)),
            Term::And(ts) => Term::And(ts.iter().map(|t| *b(t)).collect()),
            Term::Or(ts) => Term::Or(ts.iter().map(|t| *b(t)).collect()),
            Term::Implies(x, y) => Term::Implies(b(x), b(y)),
            Term::Ite(c, t, e) => Term::Ite(b(c), b(t), b(e)),
            Term::Leq(x, y) => Term::Leq(b(x), b(y)),
            Term::Lt(x, y) => Term::Lt(b(x), b(y)),
            Term::Geq(x, y) => Term::Geq(b(x), b(y)),
            Term::Gt(x, y) => Term::Gt(b(x), b(y)),
            Term::Plus(x, y) => Term::Plus(b(x), b(y)),
            Term::Minus(x, y) => Term::Minus(b(x), b(y)),
            Term::Neg(x) => Term::Neg(b(x)),
        };
        f(rebuilt)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        super::print::write_term(f, self)
    }
}
