//! Congruence closure for equality with uninterpreted functions.
//!
//! Checks are non-incremental: every call rebuilds the closure from the
//! asserted literals. Conflicts are explained through a proof forest whose
//! edges are labelled either by an input literal or by a congruence between
//! two applications.

use std::collections::{HashMap, HashSet};

use crate::frontend::{Sort, Term, Value};

pub type TermId = usize;

/// Node for the Boolean constant `true`, used to encode predicate atoms.
pub const TRUE_NODE: TermId = 0;
pub const FALSE_NODE: TermId = 1;

#[derive(Clone, Debug)]
struct Node {
    symbol: String,
    args: Vec<TermId>,
    sort: Sort,
}

/// Hash-consed table of the uninterpreted terms seen so far.
#[derive(Clone, Debug)]
pub struct EufTerms {
    nodes: Vec<Node>,
    by_term: HashMap<Term, TermId>,
}

impl Default for EufTerms {
    fn default() -> Self {
        let mk = |s: &str| Node { symbol: s.to_string(), args: Vec::new(), sort: Sort::Bool };
        EufTerms { nodes: vec![mk("true"), mk("false")], by_term: HashMap::new() }
    }
}

impl EufTerms {
    /// Register `t` (a constant or application of uninterpreted sort, or a
    /// predicate application) and its subterms.
    pub fn intern(&mut self, t: &Term) -> TermId {
        if let Some(&id) = self.by_term.get(t) {
            return id;
        }
        let node = match t {
            Term::Var(name, sort) => Node { symbol: name.clone(), args: Vec::new(), sort: sort.clone() },
            Term::App { func, args, sort } => {
                Node { symbol: func.clone(), args: args.iter().map(|a| self.intern(a)).collect(), sort: sort.clone() }
            }
            other => panic!("not an uninterpreted term: {other}"),
        };
        let id = self.nodes.len();
        self.nodes.push(node);
        self.by_term.insert(t.clone(), id);
        id
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.len() <= 2
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EufAtom {
    Eq(TermId, TermId),
    Pred(TermId),
}

/// One asserted literal, tagged with whatever the caller uses to name it.
#[derive(Clone, Copy, Debug)]
pub struct EufLiteral<T> {
    pub atom: EufAtom,
    pub positive: bool,
    pub tag: T,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EufModel {
    pub consts: Vec<(String, Value)>,
    /// (function, argument values, result)
    pub entries: Vec<(String, Vec<Value>, Value)>,
}

#[derive(Clone, Copy, Debug)]
enum Reason {
    Input(usize),
    Congruence(TermId, TermId),
}

struct Closure<'a> {
    terms: &'a EufTerms,
    parent: Vec<TermId>,
    members: Vec<Vec<TermId>>,
    uses: Vec<Vec<TermId>>,
    sigs: HashMap<(&'a str, Vec<TermId>), TermId>,
    proof: Vec<Option<(TermId, Reason)>>,
    pending: Vec<(TermId, TermId, Reason)>,
}

impl<'a> Closure<'a> {
    fn new(terms: &'a EufTerms) -> Self {
        let n = terms.nodes.len();
        let mut c = Closure {
            terms,
            parent: (0..n).collect(),
            members: (0..n).map(|i| vec![i]).collect(),
            uses: vec![Vec::new(); n],
            sigs: HashMap::new(),
            proof: vec![None; n],
            pending: Vec::new(),
        };
        for (id, node) in terms.nodes.iter().enumerate() {
            if node.args.is_empty() {
                continue;
            }
            let mut seen = Vec::new();
            for &a in &node.args {
                if !seen.contains(&a) {
                    c.uses[a].push(id);
                    seen.push(a);
                }
            }
            c.sigs.insert((node.symbol.as_str(), node.args.clone()), id);
        }
        c
    }

    fn find(&self, x: TermId) -> TermId {
        self.parent[x]
    }

    fn signature(&self, app: TermId) -> (&'a str, Vec<TermId>) {
        let node = &self.terms.nodes[app];
        (node.symbol.as_str(), node.args.iter().map(|&a| self.find(a)).collect())
    }

    fn make_proof_root(&mut self, x: TermId) {
        // reverse the path from x to its root
        let mut prev: Option<(TermId, Reason)> = None;
        let mut cur = x;
        loop {
            let next = self.proof[cur];
            self.proof[cur] = prev;
            match next {
                Some((p, r)) => {
                    prev = Some((cur, r));
                    cur = p;
                }
                None => break,
            }
        }
    }

    fn merge(&mut self, a: TermId, b: TermId, reason: Reason) {
        self.pending.push((a, b, reason));
        while let Some((a, b, reason)) = self.pending.pop() {
            let (ra, rb) = (self.find(a), self.find(b));
            if ra == rb {
                continue;
            }
            self.make_proof_root(a);
            self.proof[a] = Some((b, reason));

            let (small, big) = if self.members[ra].len() < self.members[rb].len() { (ra, rb) } else { (rb, ra) };
            let moved = std::mem::take(&mut self.members[small]);
            for &m in &moved {
                self.parent[m] = big;
            }
            self.members[big].extend(moved);

            let uses = std::mem::take(&mut self.uses[small]);
            for &app in &uses {
                let sig = self.signature(app);
                match self.sigs.get(&sig) {
                    Some(&other) if self.find(other) != self.find(app) => {
                        self.pending.push((app, other, Reason::Congruence(app, other)));
                    }
                    Some(_) => {}
                    None => {
                        self.sigs.insert(sig, app);
                    }
                }
            }
            self.uses[big].extend(uses);
        }
    }

    fn explain(&self, a: TermId, b: TermId, out: &mut Vec<usize>) {
        let mut work = vec![(a, b)];
        let mut done_edges: HashSet<TermId> = HashSet::new();
        while let Some((x, y)) = work.pop() {
            if x == y {
                continue;
            }
            let mut ancestors = HashSet::new();
            let mut cur = x;
            ancestors.insert(cur);
            while let Some((p, _)) = self.proof[cur] {
                cur = p;
                ancestors.insert(cur);
            }
            let mut lca = y;
            while !ancestors.contains(&lca) {
                lca = self.proof[lca].expect("explained terms are in one class").0;
            }
            for start in [x, y] {
                let mut cur = start;
                while cur != lca {
                    let (p, r) = self.proof[cur].unwrap();
                    if done_edges.insert(cur) {
                        match r {
                            Reason::Input(i) => out.push(i),
                            Reason::Congruence(f, g) => {
                                let (fa, ga) = (&self.terms.nodes[f].args, &self.terms.nodes[g].args);
                                work.extend(fa.iter().copied().zip(ga.iter().copied()));
                            }
                        }
                    }
                    cur = p;
                }
            }
        }
    }
}

/// Decide the conjunction of `lits`. On conflict, returns the tags of a
/// subset of `lits` whose conjunction is unsatisfiable.
pub fn check<T: Copy>(terms: &EufTerms, lits: &[EufLiteral<T>]) -> Result<EufModel, Vec<T>> {
    let mut cc = Closure::new(terms);
    let mut diseqs = Vec::new();
    for (i, l) in lits.iter().enumerate() {
        match (l.atom, l.positive) {
            (EufAtom::Eq(a, b), true) => cc.merge(a, b, Reason::Input(i)),
            (EufAtom::Eq(a, b), false) => diseqs.push((a, b, i)),
            (EufAtom::Pred(p), pos) => cc.merge(p, if pos { TRUE_NODE } else { FALSE_NODE }, Reason::Input(i)),
        }
    }

    let conflict = |cc: &Closure, a, b, extra: Option<usize>| {
        let mut idx = Vec::new();
        cc.explain(a, b, &mut idx);
        idx.extend(extra);
        idx.sort_unstable();
        idx.dedup();
        idx.into_iter().map(|i| lits[i].tag).collect::<Vec<T>>()
    };

    if cc.find(TRUE_NODE) == cc.find(FALSE_NODE) {
        return Err(conflict(&cc, TRUE_NODE, FALSE_NODE, None));
    }
    for &(a, b, i) in &diseqs {
        if cc.find(a) == cc.find(b) {
            return Err(conflict(&cc, a, b, Some(i)));
        }
    }
    Ok(build_model(&cc))
}

fn build_model(cc: &Closure) -> EufModel {
    let mut elem_of_rep: HashMap<TermId, u32> = HashMap::new();
    let mut value = |cc: &Closure, id: TermId| -> Value {
        let node = &cc.terms.nodes[id];
        if node.sort == Sort::Bool {
            return Value::Bool(cc.find(id) == cc.find(TRUE_NODE));
        }
        let next = elem_of_rep.len() as u32;
        Value::Elem(*elem_of_rep.entry(cc.find(id)).or_insert(next))
    };
    let mut model = EufModel::default();
    for (id, node) in cc.terms.nodes.iter().enumerate().skip(2) {
        let v = value(cc, id);
        if node.args.is_empty() {
            model.consts.push((node.symbol.clone(), v));
        } else {
            let args = node.args.iter().map(|&a| value(cc, a)).collect();
            model.entries.push((node.symbol.clone(), args, v));
        }
    }
    model
}
