//! Normalization of integer comparisons into difference constraints
//! `pos - neg <= bound`.

use std::collections::BTreeMap;

use thiserror::Error;

use super::term::{Sort, Term};

/// Largest accepted absolute value of an integer constant or normalized
/// bound. Keeps every sum over a negative cycle well inside `i64`.
pub const MAX_BOUND: i64 = 1 << 40;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DiffError {
    #[error("not a difference constraint: {0}")]
    NonDifference(String),
    #[error("integer constant {0} exceeds the supported bound 2^40")]
    Overflow(i128),
}

/// `pos - neg <= bound`, where a missing side stands for the constant zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DiffConstraint {
    pub pos: Option<Term>,
    pub neg: Option<Term>,
    pub bound: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Normalized {
    Const(bool),
    Le(DiffConstraint),
    /// Conjunction of two constraints (an equality).
    Both(DiffConstraint, DiffConstraint),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Lt,
    Ge,
    Gt,
    Eq,
}

/// A linear integer expression over opaque integer terms (variables and
/// term-level `ite`s).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct Linear {
    coeffs: BTreeMap<Term, i128>,
    constant: i128,
}

impl Linear {
    fn add(mut self, other: Linear, sign: i128) -> Linear {
        for (t, c) in other.coeffs {
            *self.coeffs.entry(t).or_insert(0) += sign * c;
        }
        self.constant += sign * other.constant;
        self.coeffs.retain(|_, c| *c != 0);
        self
    }
}

fn linearize(t: &Term) -> Result<Linear, DiffError> {
    Ok(match t {
        Term::IntConst(k) => Linear { coeffs: BTreeMap::new(), constant: *k as i128 },
        Term::Var(_, Sort::Int) | Term::Ite(..) | Term::App { .. } if t.sort() == Sort::Int => {
            let mut coeffs = BTreeMap::new();
            coeffs.insert(t.clone(), 1);
            Linear { coeffs, constant: 0 }
        }
        Term::Plus(a, b) => linearize(a)?.add(linearize(b)?, 1),
        Term::Minus(a, b) => linearize(a)?.add(linearize(b)?, -1),
        Term::Neg(a) => Linear::default().add(linearize(a)?, -1),
        other => return Err(DiffError::NonDifference(other.to_string())),
    })
}

fn checked(v: i128) -> Result<i64, DiffError> {
    if v.abs() > MAX_BOUND as i128 {
        Err(DiffError::Overflow(v))
    } else {
        Ok(v as i64)
    }
}

/// Build `expr <= 0` (plus the constant) as a difference constraint.
fn le_zero(lin: &Linear, shift: i128, source: &str) -> Result<Normalized, DiffError> {
    // sum(coeffs) + constant + shift <= 0  <=>  sum(coeffs) <= -(constant + shift)
    let bound = -(lin.constant + shift);
    let mut pos = None;
    let mut neg = None;
    for (t, c) in &lin.coeffs {
        match c {
            1 if pos.is_none() => pos = Some(t.clone()),
            -1 if neg.is_none() => neg = Some(t.clone()),
            _ => return Err(DiffError::NonDifference(source.to_string())),
        }
    }
    if pos.is_none() && neg.is_none() {
        return Ok(Normalized::Const(bound >= 0));
    }
    Ok(Normalized::Le(DiffConstraint { pos, neg, bound: checked(bound)? }))
}

/// Normalize `lhs cmp rhs` over integers.
pub fn normalize(cmp: Cmp, lhs: &Term, rhs: &Term) -> Result<Normalized, DiffError> {
    let source = format!("{cmp:?}({lhs}, {rhs})");
    let l = linearize(lhs)?;
    let r = linearize(rhs)?;
    for k in [l.constant, r.constant] {
        checked(k)?;
    }
    let diff = l.clone().add(r.clone(), -1); // lhs - rhs
    let rev = r.add(l, -1); // rhs - lhs
    match cmp {
        Cmp::Le => le_zero(&diff, 0, &source),
        Cmp::Lt => le_zero(&diff, 1, &source),
        Cmp::Ge => le_zero(&rev, 0, &source),
        Cmp::Gt => le_zero(&rev, 1, &source),
        Cmp::Eq => {
            let a = le_zero(&diff, 0, &source)?;
            let b = le_zero(&rev, 0, &source)?;
            Ok(match (a, b) {
                (Normalized::Const(x), Normalized::Const(y)) => Normalized::Const(x && y),
                (Normalized::Le(x), Normalized::Le(y)) => Normalized::Both(x, y),
                _ => unreachable!("both directions share the same variables"),
            })
        }
    }
}

/// Render a constraint back into a term that normalizes to itself.
pub fn constraint_term(c: &DiffConstraint) -> Term {
    let lhs = match (&c.pos, &c.neg) {
        (Some(p), Some(n)) => Term::minus(p.clone(), n.clone()),
        (Some(p), None) => p.clone(),
        (None, Some(n)) => Term::Neg(Box::new(n.clone())),
        (None, None) => Term::IntConst(0),
    };
    Term::leq(lhs, Term::IntConst(c.bound))
}
