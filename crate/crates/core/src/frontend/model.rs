//! Models and an evaluator for the term language.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::parse::Script;
use super::term::Term;

/// Value of a term under a model. Elements of uninterpreted sorts are
/// numbered; numbering is only meaningful within one model.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Elem(u32),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(k) if *k < 0 => write!(f, "(- {})", k.unsigned_abs()),
            Value::Int(k) => write!(f, "{k}"),
            Value::Elem(e) => write!(f, "@elem{e}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuncInterp {
    pub table: BTreeMap<Vec<Value>, Value>,
    pub default: Value,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Model {
    pub consts: BTreeMap<String, Value>,
    pub funcs: BTreeMap<String, FuncInterp>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("no value for `{0}`")]
    Missing(String),
    #[error("ill-sorted term during evaluation: {0}")]
    IllSorted(String),
    #[error("integer overflow while evaluating {0}")]
    Overflow(String),
}

impl Model {
    pub fn eval(&self, t: &Term) -> Result<Value, EvalError> {
        let boolean = |t: &Term| match self.eval(t)? {
            Value::Bool(b) => Ok(b),
            _ => Err(EvalError::IllSorted(t.to_string())),
        };
        let int = |t: &Term| match self.eval(t)? {
            Value::Int(k) => Ok(k),
            _ => Err(EvalError::IllSorted(t.to_string())),
        };
        let arith = |r: Option<i64>| r.map(Value::Int).ok_or_else(|| EvalError::Overflow(t.to_string()));
        Ok(match t {
            Term::Var(name, _) => self.consts.get(name).cloned().ok_or_else(|| EvalError::Missing(name.clone()))?,
            Term::BoolConst(b) => Value::Bool(*b),
            Term::IntConst(k) => Value::Int(*k),
            Term::App { func, args, .. } => {
                let interp = self.funcs.get(func).ok_or_else(|| EvalError::Missing(func.clone()))?;
                let key = args.iter().map(|a| self.eval(a)).collect::<Result<Vec<_>, _>>()?;
                interp.table.get(&key).unwrap_or(&interp.default).clone()
            }
            Term::Eq(a, b) => Value::Bool(self.eval(a)? == self.eval(b)?),
            Term::Not(a) => Value::Bool(!boolean(a)?),
            Term::And(ts) => {
                let mut v = true;
                for x in ts {
                    v &= boolean(x)?;
                }
                Value::Bool(v)
            }
            Term::Or(ts) => {
                let mut v = false;
                for x in ts {
                    v |= boolean(x)?;
                }
                Value::Bool(v)
            }
            Term::Implies(a, b) => Value::Bool(!boolean(a)? || boolean(b)?),
            Term::Ite(c, a, b) => {
                if boolean(c)? {
                    self.eval(a)?
                } else {
                    self.eval(b)?
                }
            }
            Term::Leq(a, b) => Value::Bool(int(a)? <= int(b)?),
            Term::Lt(a, b) => Value::Bool(int(a)? < int(b)?),
            Term::Geq(a, b) => Value::Bool(int(a)? >= int(b)?),
            Term::Gt(a, b) => Value::Bool(int(a)? > int(b)?),
            Term::Plus(a, b) => arith(int(a)?.checked_add(int(b)?))?,
            Term::Minus(a, b) => arith(int(a)?.checked_sub(int(b)?))?,
            Term::Neg(a) => arith(int(a)?.checked_neg())?,
        })
    }

    /// True iff every assertion of `s` evaluates to true.
    pub fn satisfies(&self, s: &Script) -> Result<bool, EvalError> {
        for a in &s.assertions {
            if self.eval(a)? != Value::Bool(true) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}
