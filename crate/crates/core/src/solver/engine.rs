//! The CDCL(T) search loop.

use std::collections::{BTreeMap, HashSet};
use std::time::{Duration, Instant};

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::frontend::{Declaration, FuncInterp, Model, Script, Sort, Term, Value};

use super::abstraction::{Abstraction, AtomKind, EncodeError};
use super::euf::{self, EufLiteral};
use super::heap::ActivityHeap;
use super::idl::{self, DiffLe, IdlError};
use super::lemma_log::{LemmaOrigin, TheoryLemmaLog};
use super::types::{LBool, Lit, Var};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Idl(#[from] IdlError),
}

#[derive(Clone, Debug)]
pub struct SolverOptions {
    pub seed: u64,
    /// Conflicts per unit of the Luby restart sequence.
    pub restart_base: u64,
    pub var_decay: f64,
    /// Probability of a random decision instead of the most active variable.
    pub random_decision_freq: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { seed: 0, restart_base: 100, var_decay: 0.95, random_decision_freq: 0.0 }
    }
}

/// Where the partitioner harvests atoms from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum AtomSource {
    Heap,
    Decision,
    /// Atoms of theory conflict clauses and lemmas.
    Cl,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SelectionHeuristic {
    Rand,
    Spec,
}

/// An atom chosen for a cube, with the polarity the solver currently
/// prefers for it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomChoice {
    pub var: Var,
    pub term: Term,
    pub polarity: bool,
}

#[derive(Clone, Debug)]
pub enum SolveResult {
    Sat(Model),
    Unsat,
    Unknown,
    /// The decision hook asked the solver to stop.
    Stopped,
}

/// Reply of a [`DecisionHook`].
#[derive(Clone, Debug)]
pub enum HookAction {
    Continue,
    /// Add `lemma` at level 0 and keep searching.
    Block {
        lemma: Term,
        reset_lemma_log: bool,
    },
    Stop,
}

/// Called synchronously after every SAT decision.
pub trait DecisionHook {
    fn after_decision(&mut self, solver: &Solver) -> HookAction;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ClauseKind {
    Original,
    Learned,
    Theory,
    Blocking,
}

#[derive(Clone, Debug)]
struct Clause {
    lits: Vec<Lit>,
    #[allow(dead_code)]
    kind: ClauseKind,
}

#[derive(Clone, Debug, Default)]
pub struct Stats {
    pub decisions: u64,
    pub conflicts: u64,
    pub theory_conflicts: u64,
    pub propagations: u64,
    pub theory_checks: u64,
    pub restarts: u64,
    pub learned: u64,
    pub blocking_lemmas: u64,
    /// Decision-hook invocations.
    pub check_count: u64,
}

pub struct Solver {
    script: Script,
    abs: Abstraction,
    opts: SolverOptions,

    clauses: Vec<Clause>,
    watches: Vec<Vec<usize>>,
    assigns: Vec<LBool>,
    level: Vec<u32>,
    reason: Vec<Option<usize>>,
    phase: Vec<bool>,
    seen: Vec<bool>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    heap: ActivityHeap,

    lemma_log: TheoryLemmaLog,
    theory_dirty: bool,
    unsat: bool,
    stats: Stats,
    rng: ChaCha8Rng,
    start: Instant,
    luby_index: u32,
    conflicts_since_restart: u64,
}

fn luby(y: f64, mut x: u32) -> f64 {
    let (mut size, mut seq) = (1u32, 0i32);
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    y.powi(seq)
}

impl Solver {
    /// Build a solver for `script`, clausifying all assertions.
    pub fn new(script: &Script, opts: SolverOptions) -> Result<Solver, SolverError> {
        let declared = script.declared_symbols().into_iter().map(String::from).collect();
        let mut s = Solver {
            script: script.clone(),
            abs: Abstraction::new(declared),
            rng: ChaCha8Rng::seed_from_u64(opts.seed),
            heap: ActivityHeap::new(opts.var_decay),
            opts,
            clauses: Vec::new(),
            watches: Vec::new(),
            assigns: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            phase: Vec::new(),
            seen: Vec::new(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            lemma_log: TheoryLemmaLog::default(),
            theory_dirty: false,
            unsat: false,
            stats: Stats::default(),
            start: Instant::now(),
            luby_index: 0,
            conflicts_since_restart: 0,
        };
        let tl = s.abs.true_lit();
        s.sync_vars();
        s.add_clause(vec![tl], ClauseKind::Original);
        for a in &script.assertions {
            let mut out = Vec::new();
            s.abs.assert_formula(a, &mut out)?;
            s.sync_vars();
            for c in out {
                s.add_clause(c, ClauseKind::Original);
            }
        }
        Ok(s)
    }

    fn sync_vars(&mut self) {
        while self.assigns.len() < self.abs.num_vars() {
            self.heap.add_var();
            self.assigns.push(LBool::Undef);
            self.level.push(0);
            self.reason.push(None);
            self.phase.push(false);
            self.seen.push(false);
            self.watches.push(Vec::new());
            self.watches.push(Vec::new());
        }
    }

    pub fn script(&self) -> &Script {
        &self.script
    }

    pub fn stats(&self) -> &Stats {
        &self.stats
    }

    pub fn elapsed(&self) -> Duration {
        self.start.elapsed()
    }

    pub fn num_vars(&self) -> usize {
        self.assigns.len()
    }

    pub fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    pub fn lemma_log(&self) -> &TheoryLemmaLog {
        &self.lemma_log
    }

    pub fn lemma_log_mut(&mut self) -> &mut TheoryLemmaLog {
        &mut self.lemma_log
    }

    pub fn heap_mut(&mut self) -> &mut ActivityHeap {
        &mut self.heap
    }

    /// Decision literals of the current branch, earliest first.
    pub fn decisions(&self) -> Vec<Lit> {
        self.trail_lim.iter().map(|&i| self.trail[i]).collect()
    }

    pub fn atom_term(&self, v: Var) -> Option<&Term> {
        self.abs.atom(v).map(|a| &a.term)
    }

    /// Variable standing for `atom`, if the atom has been registered.
    pub fn var_of_atom(&mut self, atom: &Term) -> Option<Var> {
        let mut scratch = Vec::new();
        let before = self.abs.num_vars();
        let l = self.abs.encode(atom, &mut scratch).ok()?;
        // encoding an already known atom creates nothing new
        if self.abs.num_vars() != before || !scratch.is_empty() {
            self.sync_vars();
            for c in scratch {
                self.add_clause(c, ClauseKind::Original);
            }
        }
        self.abs.atom(l.var()).map(|_| l.var())
    }

    pub fn value_lit(&self, l: Lit) -> LBool {
        match self.assigns[l.var().idx()] {
            LBool::Undef => LBool::Undef,
            v if l.is_positive() => v,
            LBool::True => LBool::False,
            LBool::False => LBool::True,
        }
    }

    pub fn value_var(&self, v: Var) -> LBool {
        self.assigns[v.idx()]
    }

    pub fn level_of(&self, v: Var) -> u32 {
        self.level[v.idx()]
    }

    fn enqueue(&mut self, l: Lit, reason: Option<usize>) {
        let v = l.var().idx();
        debug_assert_eq!(self.assigns[v], LBool::Undef);
        // trail levels never decrease, and exactly the level openers lack a reason
        debug_assert!(self.trail.last().is_none_or(|p| self.level[p.var().idx()] <= self.decision_level()));
        debug_assert_eq!(
            reason.is_none(),
            self.trail_lim.last() == Some(&self.trail.len()) && self.decision_level() > 0
        );
        self.assigns[v] = LBool::from_bool(l.is_positive());
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
        if matches!(self.abs.atom(l.var()), Some(a) if a.kind != AtomKind::Prop) {
            self.theory_dirty = true;
        }
    }

    fn cancel_until(&mut self, lvl: u32) {
        if self.decision_level() <= lvl {
            return;
        }
        let lim = self.trail_lim[lvl as usize];
        for i in (lim..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var();
            self.assigns[v.idx()] = LBool::Undef;
            self.reason[v.idx()] = None;
            self.phase[v.idx()] = l.is_positive();
            self.heap.insert(v);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(lvl as usize);
        self.qhead = self.qhead.min(lim);
    }

    /// Add a clause while at decision level 0.
    fn add_clause(&mut self, mut lits: Vec<Lit>, kind: ClauseKind) {
        debug_assert_eq!(self.decision_level(), 0);
        if self.unsat {
            return;
        }
        lits.sort();
        lits.dedup();
        if lits.windows(2).any(|w| w[0] == !w[1]) {
            return;
        }
        if lits.iter().any(|&l| self.value_lit(l) == LBool::True) {
            return;
        }
        lits.retain(|&l| self.value_lit(l) != LBool::False);
        match lits.len() {
            0 => self.unsat = true,
            1 => {
                let cref = self.push_clause(lits.clone(), kind, false);
                self.enqueue(lits[0], Some(cref));
            }
            _ => {
                self.push_clause(lits, kind, true);
            }
        }
    }

    fn push_clause(&mut self, lits: Vec<Lit>, kind: ClauseKind, watch: bool) -> usize {
        let cref = self.clauses.len();
        if watch {
            self.watches[lits[0].idx()].push(cref);
            self.watches[lits[1].idx()].push(cref);
        }
        self.clauses.push(Clause { lits, kind });
        cref
    }

    fn propagate(&mut self) -> Option<usize> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let ws = std::mem::take(&mut self.watches[false_lit.idx()]);
            let mut kept = Vec::with_capacity(ws.len());
            let mut conflict = None;
            let mut i = 0;
            while i < ws.len() {
                let cref = ws[i];
                i += 1;
                let lits = &mut self.clauses[cref].lits;
                if lits[0] == false_lit {
                    lits.swap(0, 1);
                }
                let first = lits[0];
                if self.value_lit_raw(first) == LBool::True {
                    kept.push(cref);
                    continue;
                }
                let mut moved = false;
                for k in 2..self.clauses[cref].lits.len() {
                    let lk = self.clauses[cref].lits[k];
                    if self.value_lit_raw(lk) != LBool::False {
                        self.clauses[cref].lits.swap(1, k);
                        self.watches[lk.idx()].push(cref);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                kept.push(cref);
                if self.value_lit_raw(first) == LBool::False {
                    conflict = Some(cref);
                    kept.extend_from_slice(&ws[i..]);
                    break;
                }
                self.enqueue(first, Some(cref));
            }
            self.watches[false_lit.idx()] = kept;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    #[inline]
    fn value_lit_raw(&self, l: Lit) -> LBool {
        self.value_lit(l)
    }

    /// First-UIP conflict analysis. Returns the learned clause (asserting
    /// literal first) and the backjump level.
    fn analyze(&mut self, mut confl: usize) -> (Vec<Lit>, u32) {
        let cur = self.decision_level();
        let mut learnt = vec![Lit::default_placeholder()];
        let mut path = 0usize;
        let mut p: Option<Lit> = None;
        let mut idx = self.trail.len();
        loop {
            let lits = self.clauses[confl].lits.clone();
            for q in lits {
                if Some(q.var()) == p.map(|p| p.var()) {
                    continue;
                }
                let v = q.var().idx();
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.heap.bump(q.var());
                    if self.level[v] == cur {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var().idx()] {
                    break;
                }
            }
            let pl = self.trail[idx];
            self.seen[pl.var().idx()] = false;
            path -= 1;
            p = Some(pl);
            if path == 0 {
                break;
            }
            confl = self.reason[pl.var().idx()].expect("non-decision literal at conflict level");
        }
        learnt[0] = !p.unwrap();
        for l in &learnt[1..] {
            self.seen[l.var().idx()] = false;
        }
        let mut bt = 0;
        if learnt.len() > 1 {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[learnt[i].var().idx()] > self.level[learnt[max_i].var().idx()] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            bt = self.level[learnt[1].var().idx()];
        }
        (learnt, bt)
    }

    fn learn(&mut self, confl: usize) {
        let (learnt, bt) = self.analyze(confl);
        self.cancel_until(bt);
        self.stats.learned += 1;
        let watch = learnt.len() > 1;
        let first = learnt[0];
        let cref = self.push_clause(learnt, ClauseKind::Learned, watch);
        self.enqueue(first, Some(cref));
        self.heap.decay();
    }

    /// Handle a clause whose literals are all false. Returns false if the
    /// problem is unsatisfiable.
    fn handle_falsified_clause(&mut self, mut lits: Vec<Lit>, kind: ClauseKind) -> bool {
        lits.sort();
        lits.dedup();
        let max = lits.iter().map(|l| self.level[l.var().idx()]).max().unwrap_or(0);
        if max == 0 {
            self.unsat = true;
            return false;
        }
        self.cancel_until(max);
        lits.sort_by_key(|l| std::cmp::Reverse(self.level[l.var().idx()]));
        if lits.len() == 1 {
            self.cancel_until(0);
            let cref = self.push_clause(lits.clone(), kind, false);
            self.enqueue(lits[0], Some(cref));
            return true;
        }
        let cref = self.push_clause(lits, kind, true);
        self.learn(cref);
        true
    }

    fn theory_literals(&self) -> (Vec<EufLiteral<Lit>>, Vec<(DiffLe, Lit)>) {
        let mut eufs = Vec::new();
        let mut idls = Vec::new();
        for &l in &self.trail {
            let Some(info) = self.abs.atom(l.var()) else {
                continue;
            };
            match info.kind {
                AtomKind::Prop => {}
                AtomKind::Euf(atom) => eufs.push(EufLiteral { atom, positive: l.is_positive(), tag: l }),
                AtomKind::Idl(d) => idls.push((if l.is_positive() { d } else { d.negated() }, l)),
            }
        }
        (eufs, idls)
    }

    /// Full consistency check of the asserted theory literals. On conflict
    /// returns the conflict clause.
    fn theory_check(&mut self) -> Result<Option<Vec<Lit>>, SolverError> {
        self.stats.theory_checks += 1;
        let (eufs, idls) = self.theory_literals();
        if !eufs.is_empty() {
            if let Err(expl) = euf::check(&self.abs.euf, &eufs) {
                return Ok(Some(expl.into_iter().map(|l| !l).collect()));
            }
        }
        if !idls.is_empty() {
            if let Err(expl) = idl::check(self.abs.num_idl_vars(), &idls)? {
                return Ok(Some(expl.into_iter().map(|l| !l).collect()));
            }
        }
        self.theory_dirty = false;
        Ok(None)
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        if self.opts.random_decision_freq > 0.0 && self.rng.gen_bool(self.opts.random_decision_freq.min(1.0)) {
            let unassigned: Vec<usize> = (0..self.assigns.len()).filter(|&v| self.assigns[v] == LBool::Undef).collect();
            if !unassigned.is_empty() {
                let v = unassigned[self.rng.gen_range(0..unassigned.len())];
                return Some(Var(v as u32).lit(self.phase[v]));
            }
        }
        while let Some(v) = self.heap.pop() {
            if self.assigns[v.idx()] == LBool::Undef {
                return Some(v.lit(self.phase[v.idx()]));
            }
        }
        None
    }

    fn restart_due(&self) -> bool {
        let limit = luby(2.0, self.luby_index) * self.opts.restart_base as f64;
        self.conflicts_since_restart as f64 >= limit
    }

    /// Clausify `formula` and add it at level 0. Returns false if the
    /// solver became unsatisfiable.
    pub fn add_blocking_lemma(&mut self, formula: &Term) -> Result<bool, SolverError> {
        self.cancel_until(0);
        let mut out = Vec::new();
        self.abs.assert_formula(formula, &mut out)?;
        self.sync_vars();
        for c in out {
            self.add_clause(c, ClauseKind::Blocking);
        }
        self.stats.blocking_lemmas += 1;
        if !self.unsat && self.propagate().is_some() {
            self.unsat = true;
        }
        Ok(!self.unsat)
    }

    /// Run the search. `budget` bounds wall-clock time since the solver was
    /// created.
    pub fn solve(
        &mut self,
        mut hook: Option<&mut dyn DecisionHook>,
        budget: Option<Duration>,
    ) -> Result<SolveResult, SolverError> {
        loop {
            if self.unsat {
                return Ok(SolveResult::Unsat);
            }
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                self.conflicts_since_restart += 1;
                if self.decision_level() == 0 {
                    self.unsat = true;
                    return Ok(SolveResult::Unsat);
                }
                self.learn(confl);
                continue;
            }
            if self.theory_dirty {
                if let Some(clause) = self.theory_check()? {
                    self.stats.conflicts += 1;
                    self.stats.theory_conflicts += 1;
                    self.conflicts_since_restart += 1;
                    self.lemma_log.record(&clause, LemmaOrigin::Conflict);
                    if !self.handle_falsified_clause(clause, ClauseKind::Theory) {
                        return Ok(SolveResult::Unsat);
                    }
                    continue;
                }
            }
            if budget.is_some_and(|b| self.start.elapsed() >= b) {
                return Ok(SolveResult::Unknown);
            }
            if self.restart_due() {
                self.stats.restarts += 1;
                self.luby_index += 1;
                self.conflicts_since_restart = 0;
                self.cancel_until(0);
                continue;
            }
            let Some(decision) = self.pick_branch() else {
                return Ok(SolveResult::Sat(self.build_model()?));
            };
            self.trail_lim.push(self.trail.len());
            self.enqueue(decision, None);
            self.stats.decisions += 1;
            if let Some(h) = hook.as_deref_mut() {
                self.stats.check_count += 1;
                match h.after_decision(self) {
                    HookAction::Continue => {}
                    HookAction::Block { lemma, reset_lemma_log } => {
                        if reset_lemma_log {
                            self.lemma_log.reset();
                        }
                        if !self.add_blocking_lemma(&lemma)? {
                            return Ok(SolveResult::Unsat);
                        }
                    }
                    HookAction::Stop => return Ok(SolveResult::Stopped),
                }
            }
        }
    }

    fn build_model(&self) -> Result<Model, SolverError> {
        let mut model = Model::default();
        for v in 0..self.num_vars() {
            if let Some(info) = self.abs.atom(Var(v as u32)) {
                if let (AtomKind::Prop, Term::Var(name, _)) = (info.kind, &info.term) {
                    model.consts.insert(name.clone(), Value::Bool(self.assigns[v] == LBool::True));
                }
            }
        }
        let (eufs, idls) = self.theory_literals();
        let euf_model = euf::check(&self.abs.euf, &eufs).expect("checked before building a model");
        for (name, v) in euf_model.consts {
            model.consts.insert(name, v);
        }
        for (f, args, v) in euf_model.entries {
            model
                .funcs
                .entry(f)
                .or_insert_with(|| FuncInterp { table: BTreeMap::new(), default: v.clone() })
                .table
                .insert(args, v);
        }
        let values = idl::check(self.abs.num_idl_vars(), &idls)?.expect("checked before building a model");
        for (i, val) in values.iter().enumerate() {
            if let Some(Term::Var(name, _)) = self.abs.idl_term(i) {
                model.consts.insert(name.clone(), Value::Int(*val));
            }
        }
        // unconstrained symbols
        let mut next_elem = model
            .consts
            .values()
            .chain(model.funcs.values().flat_map(|f| f.table.values()))
            .filter_map(|v| match v {
                Value::Elem(e) => Some(e + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0);
        let mut default_of = |s: &Sort| match s {
            Sort::Bool => Value::Bool(false),
            Sort::Int => Value::Int(0),
            Sort::Uninterpreted(_) => {
                next_elem += 1;
                Value::Elem(next_elem - 1)
            }
        };
        for d in &self.script.declarations {
            if let Declaration::Fun { name, args, ret } = d {
                if args.is_empty() {
                    if !model.consts.contains_key(name) {
                        let v = default_of(ret);
                        model.consts.insert(name.clone(), v);
                    }
                } else if !model.funcs.contains_key(name) {
                    let v = default_of(ret);
                    model.funcs.insert(name.clone(), FuncInterp { table: BTreeMap::new(), default: v });
                }
            }
        }
        debug_assert_eq!(model.satisfies(&self.script), Ok(true), "model check failed");
        Ok(model)
    }

    /// Up to `want` atoms from `source`, ordered by `heur`. Atoms that
    /// mention solver-introduced symbols, are fixed at level 0, or appear in
    /// `exclude` are skipped.
    pub fn snapshot_atoms(
        &self,
        source: AtomSource,
        heur: SelectionHeuristic,
        want: usize,
        exclude: &HashSet<Var>,
        rng: &mut impl Rng,
    ) -> Vec<AtomChoice> {
        let ordered: Vec<Var> = match source {
            AtomSource::Heap => self.heap.ranked(),
            AtomSource::Decision => self.decisions().into_iter().map(|l| l.var()).collect(),
            AtomSource::Cl => self.lemma_log.ranked(),
        };
        let candidates: Vec<Var> = ordered
            .into_iter()
            .filter(|&v| {
                matches!(self.abs.atom(v), Some(a) if a.original)
                    && !(self.assigns[v.idx()] != LBool::Undef && self.level[v.idx()] == 0)
                    && !exclude.contains(&v)
            })
            .collect();
        let picked: Vec<Var> = match heur {
            SelectionHeuristic::Spec => candidates.into_iter().take(want).collect(),
            SelectionHeuristic::Rand => {
                let n = want.min(candidates.len());
                index::sample(rng, candidates.len(), n).into_iter().map(|i| candidates[i]).collect()
            }
        };
        picked
            .into_iter()
            .map(|v| AtomChoice {
                var: v,
                term: self.abs.atom(v).unwrap().term.clone(),
                polarity: match self.assigns[v.idx()] {
                    LBool::True => true,
                    LBool::False => false,
                    LBool::Undef => self.phase[v.idx()],
                },
            })
            .collect()
    }
}

impl Lit {
    fn default_placeholder() -> Lit {
        Var(0).lit(true)
    }
}

impl Stats {
    /// Counters keyed by name, for result tables.
    pub fn to_map(&self) -> BTreeMap<&'static str, f64> {
        BTreeMap::from([
            ("decisions", self.decisions as f64),
            ("conflicts", self.conflicts as f64),
            ("theory_conflicts", self.theory_conflicts as f64),
            ("propagations", self.propagations as f64),
            ("theory_checks", self.theory_checks as f64),
            ("restarts", self.restarts as f64),
            ("learned", self.learned as f64),
            ("blocking_lemmas", self.blocking_lemmas as f64),
            ("check_count", self.check_count as f64),
        ])
    }
}
