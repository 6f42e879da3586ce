//! Instance generators and reference implementations used as test oracles.
//! Nothing here calls into the solver.

#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::fmt::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smtpart::frontend::{parse_script, Script, Sort, Term};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------- generators

fn uf_term(r: &mut ChaCha8Rng, consts: usize, depth: u32) -> String {
    let c = |r: &mut ChaCha8Rng| format!("a{}", r.gen_range(0..consts));
    if depth == 0 || r.gen_bool(0.55) {
        return c(r);
    }
    if r.gen_bool(0.6) {
        format!("(f {})", uf_term(r, consts, depth - 1))
    } else {
        format!("(g {} {})", uf_term(r, consts, depth - 1), c(r))
    }
}

fn uf_atom(r: &mut ChaCha8Rng, consts: usize) -> String {
    match r.gen_range(0..10) {
        0..=5 => {
            let (a, b) = (uf_term(r, consts, 2), uf_term(r, consts, 2));
            format!("(= {a} {b})")
        }
        6..=7 => format!("(p {})", uf_term(r, consts, 1)),
        _ => format!("b{}", r.gen_range(0..6)),
    }
}

fn idl_atom(r: &mut ChaCha8Rng, vars: usize) -> String {
    let x = r.gen_range(0..vars);
    let mut y = r.gen_range(0..vars);
    if y == x {
        y = (y + 1) % vars;
    }
    let k = r.gen_range(-4i64..=4);
    let lit = |k: i64| if k < 0 { format!("(- {})", -k) } else { k.to_string() };
    match r.gen_range(0..12) {
        0..=3 => format!("(<= (- x{x} x{y}) {})", lit(k)),
        4 => format!("(< x{x} x{y})"),
        5 => format!("(>= x{x} {})", lit(k)),
        6 => format!("(> (- x{x} x{y}) {})", lit(k)),
        7 => format!("(<= x{x} (+ x{y} {}))", lit(k)),
        8 => format!("(= x{x} (+ x{y} {}))", lit(k)),
        9 => format!("(< (- x{x} x{y}) {})", lit(k)),
        _ => format!("b{}", r.gen_range(0..6)),
    }
}

fn lit(r: &mut ChaCha8Rng, atom: &str) -> String {
    if r.gen_bool(0.5) {
        format!("(not {atom})")
    } else {
        atom.to_string()
    }
}

fn formula(r: &mut ChaCha8Rng, pool: &[String], must: &mut Vec<String>) -> String {
    let mut pick = |r: &mut ChaCha8Rng| must.pop().unwrap_or_else(|| pool.choose(r).unwrap().clone());
    if r.gen_bool(0.75) {
        let width = r.gen_range(2..=3);
        let lits: Vec<String> = (0..width)
            .map(|_| {
                let a = pick(r);
                lit(r, &a)
            })
            .collect();
        return format!("(or {})", lits.join(" "));
    }
    let (a, b, c) = (pick(r), pick(r), pick(r));
    let (la, lb, lc) = (lit(r, &a), lit(r, &b), lit(r, &c));
    match r.gen_range(0..5) {
        0 => format!("(=> (and {la} {lb}) {lc})"),
        1 => format!("(ite {la} {lb} {lc})"),
        2 => format!("(xor {la} (or {lb} {lc}))"),
        3 => format!("(= {la} (and {lb} {lc}))"),
        _ => format!("(not (and {la} {lb} {lc}))"),
    }
}

fn fill_pool(r: &mut ChaCha8Rng, want: usize, mut atom: impl FnMut(&mut ChaCha8Rng) -> String) -> Vec<String> {
    let mut pool = BTreeSet::new();
    let mut tries = 0;
    while pool.len() < want && tries < 10_000 {
        pool.insert(atom(r));
        tries += 1;
    }
    let mut v: Vec<String> = pool.into_iter().collect();
    v.shuffle(r);
    v
}

fn assemble(r: &mut ChaCha8Rng, header: String, pool: Vec<String>, ratio: f64) -> String {
    let mut s = header;
    let mut must = pool.clone();
    let m = ((pool.len() as f64) * ratio).ceil() as usize;
    for _ in 0..m.max(1) {
        let f = formula(r, &pool, &mut must);
        writeln!(s, "(assert {f})").unwrap();
    }
    while !must.is_empty() {
        let f = formula(r, &pool, &mut must);
        writeln!(s, "(assert {f})").unwrap();
    }
    s.push_str("(check-sat)\n");
    s
}

/// Random QF_UF script with about `atoms` distinct atoms.
pub fn uf_instance(seed: u64, atoms: usize) -> String {
    let mut r = rng(seed);
    let consts = r.gen_range(3..=5);
    let mut h = String::from("(set-logic QF_UF)\n(declare-sort U 0)\n");
    for i in 0..consts {
        writeln!(h, "(declare-fun a{i} () U)").unwrap();
    }
    h.push_str("(declare-fun f (U) U)\n(declare-fun g (U U) U)\n(declare-fun p (U) Bool)\n");
    for i in 0..6 {
        writeln!(h, "(declare-const b{i} Bool)").unwrap();
    }
    let pool = fill_pool(&mut r, atoms, |r| uf_atom(r, consts));
    let ratio = r.gen_range(0.9..1.8);
    assemble(&mut r, h, pool, ratio)
}

/// Random QF_IDL script with about `atoms` distinct atoms.
pub fn idl_instance(seed: u64, atoms: usize) -> String {
    let mut r = rng(seed);
    let vars = r.gen_range(3..=6);
    let mut h = String::from("(set-logic QF_IDL)\n");
    for i in 0..vars {
        writeln!(h, "(declare-fun x{i} () Int)").unwrap();
    }
    for i in 0..6 {
        writeln!(h, "(declare-const b{i} Bool)").unwrap();
    }
    let pool = fill_pool(&mut r, atoms, |r| idl_atom(r, vars));
    let ratio = r.gen_range(0.9..1.8);
    assemble(&mut r, h, pool, ratio)
}

/// Seed-determined mix of both logics with 10 to 40 atoms.
pub fn random_instance(seed: u64) -> Script {
    let atoms = rng(seed ^ 0x5eed).gen_range(10..=40);
    let text = if seed.is_multiple_of(2) { uf_instance(seed, atoms) } else { idl_instance(seed, atoms) };
    parse_script(&text).unwrap_or_else(|e| panic!("generator produced bad script: {e}\n{text}"))
}

/// Small instance (10 to 16 atoms) for tests that call the oracle many times.
pub fn small_instance(seed: u64) -> Script {
    let atoms = rng(seed ^ 0xab).gen_range(10..=16);
    let text = if seed.is_multiple_of(2) { uf_instance(seed, atoms) } else { idl_instance(seed, atoms) };
    parse_script(&text).unwrap()
}

// ------------------------------------------------------------------- atoms

/// Atoms in order of first occurrence.
pub fn atoms_of(terms: &[Term]) -> Vec<Term> {
    fn walk(t: &Term, seen: &mut BTreeSet<Term>, out: &mut Vec<Term>) {
        let atom = match t {
            Term::Var(_, Sort::Bool) => true,
            Term::App { sort: Sort::Bool, .. } => true,
            Term::Eq(a, _) => a.sort() != Sort::Bool,
            Term::Leq(..) | Term::Lt(..) | Term::Geq(..) | Term::Gt(..) => true,
            _ => false,
        };
        if atom {
            if seen.insert(t.clone()) {
                out.push(t.clone());
            }
            return;
        }
        match t {
            Term::Not(a) => walk(a, seen, out),
            Term::And(ts) | Term::Or(ts) => ts.iter().for_each(|c| walk(c, seen, out)),
            Term::Implies(a, b) | Term::Eq(a, b) => {
                walk(a, seen, out);
                walk(b, seen, out);
            }
            Term::Ite(c, a, b) => {
                walk(c, seen, out);
                walk(a, seen, out);
                walk(b, seen, out);
            }
            Term::BoolConst(_) => {}
            other => panic!("unexpected Boolean structure {other:?}"),
        }
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for t in terms {
        walk(t, &mut seen, &mut out);
    }
    out
}

/// Three-valued evaluation under a partial atom assignment.
pub fn eval3(t: &Term, atoms: &BTreeMap<Term, usize>, val: &[Option<bool>]) -> Option<bool> {
    if let Some(&i) = atoms.get(t) {
        return val[i];
    }
    match t {
        Term::BoolConst(b) => Some(*b),
        Term::Not(a) => eval3(a, atoms, val).map(|b| !b),
        Term::And(ts) => {
            let mut all = Some(true);
            for c in ts {
                match eval3(c, atoms, val) {
                    Some(false) => return Some(false),
                    None => all = None,
                    Some(true) => {}
                }
            }
            all
        }
        Term::Or(ts) => {
            let mut any = Some(false);
            for c in ts {
                match eval3(c, atoms, val) {
                    Some(true) => return Some(true),
                    None => any = None,
                    Some(false) => {}
                }
            }
            any
        }
        Term::Implies(a, b) => match (eval3(a, atoms, val), eval3(b, atoms, val)) {
            (Some(false), _) | (_, Some(true)) => Some(true),
            (Some(true), Some(false)) => Some(false),
            _ => None,
        },
        Term::Eq(a, b) => Some(eval3(a, atoms, val)? == eval3(b, atoms, val)?),
        Term::Ite(c, a, b) => match eval3(c, atoms, val) {
            Some(true) => eval3(a, atoms, val),
            Some(false) => eval3(b, atoms, val),
            None => match (eval3(a, atoms, val), eval3(b, atoms, val)) {
                (Some(x), Some(y)) if x == y => Some(x),
                _ => None,
            },
        },
        other => panic!("not a Boolean connective: {other:?}"),
    }
}

// ------------------------------------------------------------ theory oracles

/// Naive congruence closure: union-find plus a quadratic fixpoint over all
/// application pairs. `eqs` are (lhs, rhs, positive); `preds` are Boolean
/// applications with their truth value.
pub fn euf_consistent(eqs: &[(Term, Term, bool)], preds: &[(Term, bool)]) -> bool {
    // (term, function symbol, argument ids)
    let mut terms: Vec<(Term, String, Vec<usize>)> = Vec::new();
    fn add(t: &Term, terms: &mut Vec<(Term, String, Vec<usize>)>) -> usize {
        if let Some(i) = terms.iter().position(|x| &x.0 == t) {
            return i;
        }
        let (func, args) = match t {
            Term::App { func, args, .. } => (func.clone(), args.iter().map(|a| add(a, terms)).collect()),
            _ => (String::new(), Vec::new()),
        };
        terms.push((t.clone(), func, args));
        terms.len() - 1
    }
    let mut merges = Vec::new();
    let mut diseqs = Vec::new();
    for (a, b, pos) in eqs {
        let (i, j) = (add(a, &mut terms), add(b, &mut terms));
        if *pos {
            merges.push((i, j));
        } else {
            diseqs.push((i, j));
        }
    }
    let pred_ids: Vec<(usize, bool)> = preds.iter().map(|(p, v)| (add(p, &mut terms), *v)).collect();
    let n = terms.len();
    let (tt, ff) = (n, n + 1);
    merges.extend(pred_ids.iter().map(|&(i, v)| (i, if v { tt } else { ff })));
    let mut parent: Vec<usize> = (0..n + 2).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let union = |p: &mut [usize], a: usize, b: usize| {
        let (ra, rb) = (find(p, a), find(p, b));
        p[ra] = rb;
        ra != rb
    };
    for (i, j) in merges {
        union(&mut parent, i, j);
    }
    let apps: Vec<usize> = (0..n).filter(|&i| !terms[i].2.is_empty()).collect();
    loop {
        let mut changed = false;
        for (x, &i) in apps.iter().enumerate() {
            for &j in &apps[x + 1..] {
                if terms[i].1 != terms[j].1 || terms[i].2.len() != terms[j].2.len() {
                    continue;
                }
                let same =
                    (0..terms[i].2.len()).all(|k| find(&mut parent, terms[i].2[k]) == find(&mut parent, terms[j].2[k]));
                if same && union(&mut parent, i, j) {
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    if find(&mut parent, tt) == find(&mut parent, ff) {
        return false;
    }
    diseqs.iter().all(|&(i, j)| find(&mut parent, i) != find(&mut parent, j))
}

/// `val[x] - val[y] <= c` over variable indices; index 0 is the constant zero.
pub type Edge = (usize, usize, i64);

/// Floyd-Warshall negative-cycle test.
pub fn idl_consistent(n: usize, edges: &[Edge]) -> bool {
    const INF: i64 = i64::MAX / 4;
    let mut d = vec![vec![INF; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for &(x, y, c) in edges {
        d[y][x] = d[y][x].min(c);
    }
    for k in 0..n {
        for i in 0..n {
            if d[i][k] == INF {
                continue;
            }
            for j in 0..n {
                if d[k][j] == INF {
                    continue;
                }
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    (0..n).all(|i| d[i][i] >= 0)
}

/// Integer linear form: variable coefficients plus a constant.
fn linear(t: &Term) -> (BTreeMap<String, i64>, i64) {
    match t {
        Term::Var(name, Sort::Int) => (BTreeMap::from([(name.clone(), 1)]), 0),
        Term::IntConst(k) => (BTreeMap::new(), *k),
        Term::Plus(a, b) => combine(linear(a), linear(b), 1),
        Term::Minus(a, b) => combine(linear(a), linear(b), -1),
        Term::Neg(a) => combine((BTreeMap::new(), 0), linear(a), -1),
        other => panic!("not a difference term: {other:?}"),
    }
}

fn combine(
    a: (BTreeMap<String, i64>, i64),
    b: (BTreeMap<String, i64>, i64),
    sign: i64,
) -> (BTreeMap<String, i64>, i64) {
    let (mut m, k) = a;
    for (v, c) in b.0 {
        *m.entry(v).or_default() += sign * c;
    }
    m.retain(|_, c| *c != 0);
    (m, k + sign * b.1)
}

/// `lhs - rhs <= bound` as an edge, or a constant truth value.
enum Le {
    Edge(Edge),
    Const(bool),
}

fn le(lhs: &Term, rhs: &Term, strict: bool, vars: &mut Vec<String>) -> Le {
    let (m, k) = combine(linear(lhs), linear(rhs), -1);
    // sum(m) + k <= 0, minus one when strict
    let bound = -k - i64::from(strict);
    let mut idx = |name: &str| match vars.iter().position(|v| v == name) {
        Some(i) => i + 1,
        None => {
            vars.push(name.to_string());
            vars.len()
        }
    };
    let terms: Vec<(&String, &i64)> = m.iter().collect();
    match terms.as_slice() {
        [] => Le::Const(0 <= bound),
        [(x, 1)] => Le::Edge((idx(x), 0, bound)),
        [(x, -1)] => Le::Edge((0, idx(x), bound)),
        [(x, 1), (y, -1)] => Le::Edge((idx(x), idx(y), bound)),
        [(y, -1), (x, 1)] => Le::Edge((idx(x), idx(y), bound)),
        other => panic!("not a difference constraint: {other:?}"),
    }
}

/// Alternatives (a disjunction of conjunctions) for an arithmetic literal.
fn idl_literal(atom: &Term, pos: bool, vars: &mut Vec<String>) -> Vec<Vec<Le>> {
    let (a, b) = match atom {
        Term::Leq(a, b) | Term::Lt(a, b) | Term::Geq(a, b) | Term::Gt(a, b) | Term::Eq(a, b) => (&**a, &**b),
        _ => unreachable!(),
    };
    // normalise to "lhs - rhs <= 0" or "< 0" shapes
    let (l, r, strict) = match atom {
        Term::Leq(..) => (a, b, false),
        Term::Lt(..) => (a, b, true),
        Term::Geq(..) => (b, a, false),
        Term::Gt(..) => (b, a, true),
        _ => {
            return if pos {
                vec![vec![le(a, b, false, vars), le(b, a, false, vars)]]
            } else {
                vec![vec![le(a, b, true, vars)], vec![le(b, a, true, vars)]]
            };
        }
    };
    if pos {
        vec![vec![le(l, r, strict, vars)]]
    } else {
        vec![vec![le(r, l, !strict, vars)]]
    }
}

fn idl_search(n: usize, edges: &mut Vec<Edge>, disj: &[Vec<Vec<Le>>]) -> bool {
    if !idl_consistent(n, edges) {
        return false;
    }
    let Some((first, rest)) = disj.split_first() else {
        return true;
    };
    for alt in first {
        let before = edges.len();
        let mut ok = true;
        for c in alt {
            match c {
                Le::Edge(e) => edges.push(*e),
                Le::Const(b) => ok &= *b,
            }
        }
        if ok && idl_search(n, edges, rest) {
            edges.truncate(before);
            return true;
        }
        edges.truncate(before);
    }
    false
}

/// Is the conjunction of assigned theory literals satisfiable?
pub fn theory_consistent(atoms: &[Term], val: &[Option<bool>]) -> bool {
    let mut eqs = Vec::new();
    let mut preds = Vec::new();
    let mut vars = Vec::new();
    let mut disj = Vec::new();
    for (a, v) in atoms.iter().zip(val) {
        let Some(pos) = *v else { continue };
        match a {
            Term::Var(..) => {}
            Term::App { .. } => preds.push((a.clone(), pos)),
            Term::Eq(x, y) if x.sort() != Sort::Int => eqs.push(((**x).clone(), (**y).clone(), pos)),
            _ => disj.push(idl_literal(a, pos, &mut vars)),
        }
    }
    if !euf_consistent(&eqs, &preds) {
        return false;
    }
    // single-alternative literals first so pruning kicks in early
    disj.sort_by_key(|d| d.len());
    idl_search(vars.len() + 1, &mut Vec::new(), &disj)
}

// --------------------------------------------------------- brute force

/// Decide a script by backtracking over atom truth values with
/// three-valued pruning and a theory check at every node.
pub fn brute_force(s: &Script) -> bool {
    brute_force_terms(&s.assertions)
}

pub fn brute_force_terms(assertions: &[Term]) -> bool {
    let atoms = atoms_of(assertions);
    let index: BTreeMap<Term, usize> = atoms.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
    // atoms of each assertion, for choosing the next branch
    let per_formula: Vec<Vec<usize>> =
        assertions.iter().map(|f| atoms_of(std::slice::from_ref(f)).iter().map(|a| index[a]).collect()).collect();
    let ctx = Search { atoms: &atoms, index: &index, fs: assertions, per_formula: &per_formula };
    ctx.go(&mut vec![None; atoms.len()], true)
}

struct Search<'a> {
    atoms: &'a [Term],
    index: &'a BTreeMap<Term, usize>,
    fs: &'a [Term],
    per_formula: &'a [Vec<usize>],
}

impl Search<'_> {
    fn go(&self, val: &mut Vec<Option<bool>>, theory_changed: bool) -> bool {
        let mut open = None;
        for (k, f) in self.fs.iter().enumerate() {
            match eval3(f, self.index, val) {
                Some(false) => return false,
                None => {
                    open.get_or_insert(k);
                }
                Some(true) => {}
            }
        }
        if theory_changed && !theory_consistent(self.atoms, val) {
            return false;
        }
        let Some(k) = open else { return true };
        let i = *self.per_formula[k]
            .iter()
            .find(|&&i| val[i].is_none())
            .expect("undetermined formula with every atom assigned");
        let theory = !matches!(self.atoms[i], Term::Var(..));
        for b in [true, false] {
            val[i] = Some(b);
            if self.go(val, theory) {
                return true;
            }
        }
        val[i] = None;
        false
    }
}

/// Purely propositional check over the atoms of `formulas`: every
/// assignment satisfies exactly one formula.
pub fn exactly_one_everywhere(formulas: &[Term]) -> (bool, bool) {
    let atoms = atoms_of(formulas);
    assert!(atoms.len() <= 24, "truth table too large: {} atoms", atoms.len());
    let index: BTreeMap<Term, usize> = atoms.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
    let (mut disjoint, mut covering) = (true, true);
    for row in 0u64..1 << atoms.len() {
        let val: Vec<Option<bool>> = (0..atoms.len()).map(|j| Some(row >> j & 1 == 1)).collect();
        let n = formulas.iter().filter(|f| eval3(f, &index, &val) == Some(true)).count();
        disjoint &= n <= 1;
        covering &= n >= 1;
    }
    (disjoint, covering)
}

// ------------------------------------------------------- schedule oracle

/// Event-driven reference for the multijob list scheduler: a min-heap of
/// (free-at, core) events. Returns per-core task lists, per-core finish
/// times and dropped tasks.
pub fn simulate_schedule(
    keys: &[(u32, usize, usize)],
    durations: &[f64],
    cores: usize,
    budget: f64,
) -> (Vec<Vec<usize>>, Vec<f64>, Vec<usize>) {
    #[derive(PartialEq)]
    struct Free(f64, usize);
    impl Eq for Free {}
    impl PartialOrd for Free {
        fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(o))
        }
    }
    impl Ord for Free {
        fn cmp(&self, o: &Self) -> std::cmp::Ordering {
            self.0.total_cmp(&o.0).then(self.1.cmp(&o.1))
        }
    }
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| keys[a].cmp(&keys[b]).then(a.cmp(&b)));
    let mut heap: BinaryHeap<Reverse<Free>> = (0..cores).map(|c| Reverse(Free(0.0, c))).collect();
    let mut lists = vec![Vec::new(); cores];
    let mut finish = vec![0.0; cores];
    let mut dropped = Vec::new();
    for t in order {
        let mut skipped = Vec::new();
        let mut placed = false;
        while let Some(Reverse(Free(at, c))) = heap.pop() {
            if at + durations[t] <= budget {
                lists[c].push(t);
                finish[c] = at + durations[t];
                heap.push(Reverse(Free(finish[c], c)));
                placed = true;
                break;
            }
            skipped.push(Reverse(Free(at, c)));
        }
        heap.extend(skipped);
        if !placed {
            dropped.push(t);
        }
    }
    (lists, finish, dropped)
}

/// Map over `items` on all cores, keeping input order.
pub fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let workers = std::thread::available_parallelism().map_or(4, |n| n.get());
    let chunk = items.len().div_ceil(workers).max(1);
    std::thread::scope(|s| {
        let handles: Vec<_> = items.chunks(chunk).map(|c| s.spawn(|| c.iter().map(&f).collect::<Vec<R>>())).collect();
        handles.into_iter().flat_map(|h| h.join().unwrap()).collect()
    })
}
