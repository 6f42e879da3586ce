//! Propositional abstraction: atom registry and Tseitin clausification.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::frontend::diff::{self, Cmp, DiffConstraint, DiffError, Normalized};
use crate::frontend::{Sort, Term};

use super::euf::{EufAtom, EufTerms};
use super::idl::{DiffLe, IdlVar, ZERO};
use super::types::{Lit, Var};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error(transparent)]
    Arithmetic(#[from] DiffError),
    #[error("unsupported term: {0}")]
    Unsupported(String),
}

/// What a Boolean variable stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AtomKind {
    /// A Boolean constant of the input.
    Prop,
    Euf(EufAtom),
    Idl(DiffLe),
}

#[derive(Clone, Debug)]
pub struct AtomInfo {
    /// Term the atom prints as; re-encoding it yields the same variable.
    pub term: Term,
    pub kind: AtomKind,
    /// False when the atom mentions a symbol introduced by the solver.
    pub original: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum AtomKey {
    Prop(String),
    Euf(EufAtom),
    Idl(DiffLe),
}

pub struct Abstraction {
    atoms: Vec<Option<AtomInfo>>,
    keys: HashMap<AtomKey, Var>,
    cache: HashMap<Term, Lit>,
    pub(crate) euf: EufTerms,
    idl_index: HashMap<Term, IdlVar>,
    idl_terms: Vec<Option<Term>>,
    declared: HashSet<String>,
    lifted: HashMap<Term, Term>,
    fresh: usize,
    true_lit: Lit,
}

impl Abstraction {
    pub fn new(declared: HashSet<String>) -> Self {
        let mut a = Abstraction {
            atoms: Vec::new(),
            keys: HashMap::new(),
            cache: HashMap::new(),
            euf: EufTerms::default(),
            idl_index: HashMap::new(),
            idl_terms: vec![None],
            declared,
            lifted: HashMap::new(),
            fresh: 0,
            true_lit: Var(0).lit(true),
        };
        a.true_lit = a.new_var().lit(true);
        a
    }

    /// Literal that is fixed to true by a unit clause.
    pub fn true_lit(&self) -> Lit {
        self.true_lit
    }

    pub fn num_vars(&self) -> usize {
        self.atoms.len()
    }

    pub fn atom(&self, v: Var) -> Option<&AtomInfo> {
        self.atoms.get(v.idx()).and_then(Option::as_ref)
    }

    pub fn num_idl_vars(&self) -> usize {
        self.idl_terms.len()
    }

    /// Term named by an integer variable (`None` for the zero variable).
    pub fn idl_term(&self, v: IdlVar) -> Option<&Term> {
        self.idl_terms[v].as_ref()
    }

    fn new_var(&mut self) -> Var {
        let v = Var(self.atoms.len() as u32);
        self.atoms.push(None);
        v
    }

    fn is_original(&self, t: &Term) -> bool {
        t.symbols().iter().all(|s| self.declared.contains(s))
    }

    fn register(&mut self, key: AtomKey, term: Term, kind: AtomKind) -> Lit {
        if let Some(&v) = self.keys.get(&key) {
            return v.lit(true);
        }
        let v = self.new_var();
        let original = self.is_original(&term);
        self.atoms[v.idx()] = Some(AtomInfo { term, kind, original });
        self.keys.insert(key, v);
        v.lit(true)
    }

    fn idl_var(&mut self, t: &Option<Term>) -> IdlVar {
        match t {
            None => ZERO,
            Some(t) => {
                if let Some(&v) = self.idl_index.get(t) {
                    return v;
                }
                let v = self.idl_terms.len();
                self.idl_terms.push(Some(t.clone()));
                self.idl_index.insert(t.clone(), v);
                v
            }
        }
    }

    fn idl_lit(&mut self, c: DiffConstraint) -> Lit {
        let d = DiffLe { x: self.idl_var(&c.pos), y: self.idl_var(&c.neg), bound: c.bound };
        let term = diff::constraint_term(&c);
        self.register(AtomKey::Idl(d), term, AtomKind::Idl(d))
    }

    fn fresh_name(&mut self, prefix: &str) -> String {
        loop {
            let name = format!("{prefix}!{}", self.fresh);
            self.fresh += 1;
            if !self.declared.contains(&name) {
                return name;
            }
        }
    }

    /// Replace non-Boolean `ite` terms by fresh constants. Returns the
    /// rewritten term and the definitions of the new constants.
    pub fn lift_ites(&mut self, t: &Term) -> (Term, Vec<Term>) {
        let mut defs = Vec::new();
        let rewritten = t.map_bottom_up(&mut |node| match &node {
            Term::Ite(c, a, b) if node.sort() != Sort::Bool => {
                if let Some(k) = self.lifted.get(&node) {
                    return k.clone();
                }
                let k = Term::Var(self.fresh_name("ite"), node.sort());
                defs.push(Term::ite(
                    (**c).clone(),
                    Term::eq(k.clone(), (**a).clone()),
                    Term::eq(k.clone(), (**b).clone()),
                ));
                self.lifted.insert(node.clone(), k.clone());
                k
            }
            _ => node,
        });
        (rewritten, defs)
    }

    /// Clausify a Boolean term asserted at the top level.
    pub fn assert_formula(&mut self, t: &Term, out: &mut Vec<Vec<Lit>>) -> Result<(), EncodeError> {
        let (t, defs) = self.lift_ites(t);
        for d in defs {
            self.assert_top(&d, out)?;
        }
        self.assert_top(&t, out)
    }

    fn assert_top(&mut self, t: &Term, out: &mut Vec<Vec<Lit>>) -> Result<(), EncodeError> {
        match t {
            Term::BoolConst(true) => {}
            Term::And(ts) => {
                for x in ts {
                    self.assert_top(x, out)?;
                }
            }
            Term::Or(ts) => {
                let clause = ts.iter().map(|x| self.encode(x, out)).collect::<Result<_, _>>()?;
                out.push(clause);
            }
            Term::Implies(a, b) => {
                let clause = vec![!self.encode(a, out)?, self.encode(b, out)?];
                out.push(clause);
            }
            Term::Not(inner) => match &**inner {
                Term::Not(x) => self.assert_top(x, out)?,
                Term::Or(ts) => {
                    for x in ts {
                        self.assert_top(&Term::not(x.clone()), out)?;
                    }
                }
                Term::Implies(a, b) => {
                    self.assert_top(a, out)?;
                    self.assert_top(&Term::not((**b).clone()), out)?;
                }
                Term::And(ts) => {
                    let clause = ts.iter().map(|x| self.encode(x, out).map(|l| !l)).collect::<Result<_, _>>()?;
                    out.push(clause);
                }
                _ => {
                    let l = self.encode(t, out)?;
                    out.push(vec![l]);
                }
            },
            _ => {
                let l = self.encode(t, out)?;
                out.push(vec![l]);
            }
        }
        Ok(())
    }

    /// Literal equivalent to the Boolean term `t`, adding definitional
    /// clauses to `out` as needed.
    pub fn encode(&mut self, t: &Term, out: &mut Vec<Vec<Lit>>) -> Result<Lit, EncodeError> {
        if let Some(&l) = self.cache.get(t) {
            return Ok(l);
        }
        let tl = self.true_lit;
        let l = match t {
            Term::BoolConst(b) => {
                if *b {
                    tl
                } else {
                    !tl
                }
            }
            Term::Var(name, Sort::Bool) => self.register(AtomKey::Prop(name.clone()), t.clone(), AtomKind::Prop),
            Term::App { sort: Sort::Bool, .. } => {
                let id = self.euf.intern(t);
                let atom = EufAtom::Pred(id);
                self.register(AtomKey::Euf(atom), t.clone(), AtomKind::Euf(atom))
            }
            Term::Not(a) => !self.encode(a, out)?,
            Term::And(ts) | Term::Or(ts) => {
                let is_and = matches!(t, Term::And(_));
                // an or is the negation of the and of negations
                let mut lits = Vec::new();
                for x in ts {
                    let l = self.encode(x, out)?;
                    lits.push(if is_and { l } else { !l });
                }
                let r = self.and_gate(lits, out);
                if is_and {
                    r
                } else {
                    !r
                }
            }
            Term::Implies(a, b) => {
                let la = self.encode(a, out)?;
                let lb = self.encode(b, out)?;
                !self.and_gate(vec![la, !lb], out)
            }
            Term::Ite(c, a, b) if t.sort() == Sort::Bool => {
                let (lc, la, lb) = (self.encode(c, out)?, self.encode(a, out)?, self.encode(b, out)?);
                let v = self.new_var().lit(true);
                out.push(vec![!lc, !la, v]);
                out.push(vec![!lc, la, !v]);
                out.push(vec![lc, !lb, v]);
                out.push(vec![lc, lb, !v]);
                out.push(vec![!la, !lb, v]);
                out.push(vec![la, lb, !v]);
                v
            }
            Term::Eq(a, b) => match a.sort() {
                Sort::Bool => {
                    let (la, lb) = (self.encode(a, out)?, self.encode(b, out)?);
                    if la == lb {
                        tl
                    } else if la == !lb {
                        !tl
                    } else {
                        let v = self.new_var().lit(true);
                        out.push(vec![!v, !la, lb]);
                        out.push(vec![!v, la, !lb]);
                        out.push(vec![v, la, lb]);
                        out.push(vec![v, !la, !lb]);
                        v
                    }
                }
                Sort::Int => self.comparison(Cmp::Eq, a, b, out)?,
                Sort::Uninterpreted(_) => {
                    let (ia, ib) = (self.euf.intern(a), self.euf.intern(b));
                    if ia == ib {
                        tl
                    } else {
                        let (lo, hi) = if ia < ib { (a, b) } else { (b, a) };
                        let atom = EufAtom::Eq(ia.min(ib), ia.max(ib));
                        let term = Term::eq((**lo).clone(), (**hi).clone());
                        self.register(AtomKey::Euf(atom), term, AtomKind::Euf(atom))
                    }
                }
            },
            Term::Leq(a, b) => self.comparison(Cmp::Le, a, b, out)?,
            Term::Lt(a, b) => self.comparison(Cmp::Lt, a, b, out)?,
            Term::Geq(a, b) => self.comparison(Cmp::Ge, a, b, out)?,
            Term::Gt(a, b) => self.comparison(Cmp::Gt, a, b, out)?,
            other => return Err(EncodeError::Unsupported(other.to_string())),
        };
        self.cache.insert(t.clone(), l);
        Ok(l)
    }

    fn comparison(&mut self, cmp: Cmp, a: &Term, b: &Term, out: &mut Vec<Vec<Lit>>) -> Result<Lit, EncodeError> {
        Ok(match diff::normalize(cmp, a, b)? {
            Normalized::Const(true) => self.true_lit,
            Normalized::Const(false) => !self.true_lit,
            Normalized::Le(c) => self.idl_lit(c),
            Normalized::Both(c1, c2) => {
                let l1 = self.idl_lit(c1);
                let l2 = self.idl_lit(c2);
                self.and_gate(vec![l1, l2], out)
            }
        })
    }

    /// Literal for the conjunction of `lits`, folding constants.
    fn and_gate(&mut self, lits: Vec<Lit>, out: &mut Vec<Vec<Lit>>) -> Lit {
        let tl = self.true_lit;
        let mut kept: Vec<Lit> = Vec::new();
        for l in lits {
            if l == !tl || kept.contains(&!l) {
                return !tl;
            }
            if l != tl && !kept.contains(&l) {
                kept.push(l);
            }
        }
        match kept.len() {
            0 => tl,
            1 => kept[0],
            _ => {
                let v = self.new_var().lit(true);
                for &l in &kept {
                    out.push(vec![!v, l]);
                }
                let mut long: Vec<Lit> = kept.iter().map(|&l| !l).collect();
                long.push(v);
                out.push(long);
                v
            }
        }
    }
}
