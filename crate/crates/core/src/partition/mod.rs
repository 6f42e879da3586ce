//! Cube and scatter partitioning driven from the solver's decision callback.
//!
//! A [`PartitionerState`] is consulted after every decision. Once the timing
//! gate opens it collects `log2(N)` atoms from the configured source and
//! either emits all `N` cubes at once ([`PartitionType::Cube`]) or one
//! scattering partition `C_i ∧ ¬C_1 ∧ … ∧ ¬C_{i-1}` per call
//! ([`PartitionType::Scatter`]), blocking `C_i` in the host solver so it
//! moves on to a different region.

mod config;

pub use config::{ConfigError, Family, PartitionType, StrategyConfig, TimingHeuristic};

use std::collections::HashSet;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::frontend::{emit_subproblem, subproblem_file_name, term_to_string, Model, Script, Term};
use crate::solver::{
    AtomChoice, AtomSource, DecisionHook, HookAction, SelectionHeuristic, SolveResult, Solver, SolverError,
    SolverOptions, Stats, Var,
};

/// One literal of a cube: the atom and its sign.
pub type CubeLit = (Term, bool);

#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    /// 1-based.
    pub index: usize,
    pub formula: Term,
    /// Literals of this partition's own cube; empty for the final scatter
    /// partition.
    pub cube: Vec<CubeLit>,
    pub tag: String,
    pub emitted_at: Duration,
}

fn literal((atom, positive): &CubeLit) -> Term {
    if *positive {
        atom.clone()
    } else {
        Term::not(atom.clone())
    }
}

/// Conjunction of the cube's literals.
pub fn cube_term(cube: &[CubeLit]) -> Term {
    Term::conjoin(cube.iter().map(literal).collect())
}

/// All `2^k` sign assignments over `atoms`. Cube `i` (1-based) negates atom
/// `j` iff bit `j` of `i - 1` is set.
pub fn make_cubes(atoms: &[Term]) -> Vec<Vec<CubeLit>> {
    let k = atoms.len();
    (0..1usize << k).map(|i| atoms.iter().enumerate().map(|(j, a)| (a.clone(), i >> j & 1 == 0)).collect()).collect()
}

/// What the partitioner needs to see of its host.
pub trait AtomSnapshot {
    fn elapsed(&self) -> Duration;
    fn collect_atoms(
        &self,
        source: AtomSource,
        heur: SelectionHeuristic,
        want: usize,
        exclude: &HashSet<Var>,
        rng: &mut ChaCha8Rng,
    ) -> Vec<AtomChoice>;
}

impl AtomSnapshot for Solver {
    fn elapsed(&self) -> Duration {
        Solver::elapsed(self)
    }

    fn collect_atoms(
        &self,
        source: AtomSource,
        heur: SelectionHeuristic,
        want: usize,
        exclude: &HashSet<Var>,
        rng: &mut ChaCha8Rng,
    ) -> Vec<AtomChoice> {
        self.snapshot_atoms(source, heur, want, exclude, rng)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Step {
    Nothing,
    /// A scatter partition; the host must add `block`.
    Emitted {
        partition: Partition,
        block: Term,
    },
    /// Partitioning is complete.
    Done(Vec<Partition>),
}

#[derive(Clone, Debug)]
pub struct PartitionerState {
    config: StrategyConfig,
    emitted: Vec<Partition>,
    used_cubes: Vec<Vec<CubeLit>>,
    used_vars: HashSet<Var>,
    last_emit: Duration,
    call_count: u64,
    calls_since_emit: u64,
    rng: ChaCha8Rng,
}

impl PartitionerState {
    pub fn new(config: StrategyConfig) -> Self {
        PartitionerState {
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            config,
            emitted: Vec::new(),
            used_cubes: Vec::new(),
            used_vars: HashSet::new(),
            last_emit: Duration::ZERO,
            call_count: 0,
            calls_since_emit: 0,
        }
    }

    pub fn config(&self) -> &StrategyConfig {
        &self.config
    }

    pub fn emitted(&self) -> &[Partition] {
        &self.emitted
    }

    pub fn call_count(&self) -> u64 {
        self.call_count
    }

    pub fn is_done(&self) -> bool {
        self.emitted.len() as u32 == self.config.n()
    }

    /// Timing gate. Counts the call; `now` is time since the host started.
    pub fn is_time_to_partition(&mut self, now: Duration) -> bool {
        self.call_count += 1;
        self.calls_since_emit += 1;
        let first = self.emitted.is_empty();
        match self.config.timing {
            TimingHeuristic::Time => {
                if first {
                    now.as_secs_f64() >= self.config.t1
                } else {
                    (now.saturating_sub(self.last_emit)).as_secs_f64() >= self.config.t2
                }
            }
            TimingHeuristic::Check => {
                let wait = if first { self.config.t1 } else { self.config.t2 };
                self.calls_since_emit as f64 >= wait
            }
        }
    }

    /// One invocation of the partitioning procedure.
    pub fn step(&mut self, host: &impl AtomSnapshot) -> Step {
        if self.is_done() {
            return Step::Done(self.emitted.clone());
        }
        let now = host.elapsed();
        if !self.is_time_to_partition(now) {
            return Step::Nothing;
        }
        let k = self.config.cube_size();
        let exclude = if self.config.exclude_used_atoms { self.used_vars.clone() } else { HashSet::new() };
        let mut atoms = host.collect_atoms(self.config.source, self.config.heuristic, k, &exclude, &mut self.rng);
        if atoms.len() < k {
            return Step::Nothing;
        }
        atoms.truncate(k);
        match self.config.ptype {
            PartitionType::Cube => {
                let terms: Vec<Term> = atoms.into_iter().map(|a| a.term).collect();
                for cube in make_cubes(&terms) {
                    self.push(cube_term(&cube), cube, now);
                }
                Step::Done(self.emitted.clone())
            }
            PartitionType::Scatter => {
                self.used_vars.extend(atoms.iter().map(|a| a.var));
                let cube: Vec<CubeLit> = atoms.into_iter().map(|a| (a.term, a.polarity)).collect();
                let c = cube_term(&cube);
                let mut parts = vec![c.clone()];
                parts.extend(self.used_cubes.iter().map(|u| cube_term(u).negate()));
                self.used_cubes.push(cube.clone());
                let partition = self.push(Term::conjoin(parts), cube, now);
                if self.used_cubes.len() as u32 == self.config.n() - 1 {
                    self.push_final(now);
                    Step::Done(self.emitted.clone())
                } else {
                    Step::Emitted { partition, block: c.negate() }
                }
            }
        }
    }

    fn push(&mut self, formula: Term, cube: Vec<CubeLit>, now: Duration) -> Partition {
        let p = Partition { index: self.emitted.len() + 1, formula, cube, tag: self.config.tag(), emitted_at: now };
        self.emitted.push(p.clone());
        self.last_emit = now;
        self.calls_since_emit = 0;
        p
    }

    /// The negation of every cube used so far.
    fn push_final(&mut self, now: Duration) {
        let negs = self.used_cubes.iter().map(|c| cube_term(c).negate()).collect();
        self.push(Term::conjoin(negs), Vec::new(), now);
    }

    /// Close a scatter run cut short by the budget.
    fn truncate(&mut self, now: Duration) {
        if !self.used_cubes.is_empty() && !self.is_done() {
            self.push_final(now);
        }
    }
}

struct Hook<'a> {
    state: &'a mut PartitionerState,
}

impl DecisionHook for Hook<'_> {
    fn after_decision(&mut self, solver: &Solver) -> HookAction {
        match self.state.step(solver) {
            Step::Nothing => HookAction::Continue,
            Step::Emitted { block, .. } => {
                HookAction::Block { lemma: block, reset_lemma_log: self.state.config.reset_cl }
            }
            Step::Done(_) => HookAction::Stop,
        }
    }
}

/// What remains of the original problem outside the returned partitions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Residual {
    /// The partitions cover the whole search space.
    Complete,
    /// The solver refuted the unpartitioned remainder.
    RemainderUnsat,
    /// The budget ran out; the last partition negates the cubes made so far.
    Truncated,
}

#[derive(Clone, Debug)]
pub enum Outcome {
    /// Solved while partitioning; nothing left to do.
    Sat(Model),
    Unsat,
    /// Budget exhausted before any partition.
    Unknown,
    Partitioned {
        partitions: Vec<Partition>,
        residual: Residual,
    },
}

#[derive(Clone, Debug)]
pub struct PartitionRun {
    pub outcome: Outcome,
    pub elapsed: Duration,
    pub stats: Stats,
    pub calls: u64,
}

impl PartitionRun {
    pub fn partitions(&self) -> &[Partition] {
        match &self.outcome {
            Outcome::Partitioned { partitions, .. } => partitions,
            _ => &[],
        }
    }
}

/// Run the partitioning solver on `script`.
pub fn partition(
    script: &Script,
    config: &StrategyConfig,
    budget: Option<Duration>,
) -> Result<PartitionRun, SolverError> {
    let opts = SolverOptions { seed: config.seed, ..SolverOptions::default() };
    let mut solver = Solver::new(script, opts)?;
    let mut state = PartitionerState::new(config.clone());
    let result = solver.solve(Some(&mut Hook { state: &mut state }), budget)?;
    let now = solver.elapsed();
    let emitted = |state: &PartitionerState| state.emitted.clone();
    let outcome = match result {
        SolveResult::Sat(m) => Outcome::Sat(m),
        SolveResult::Unsat if state.emitted.is_empty() => Outcome::Unsat,
        SolveResult::Unsat => Outcome::Partitioned {
            partitions: emitted(&state),
            residual: if state.is_done() { Residual::Complete } else { Residual::RemainderUnsat },
        },
        SolveResult::Stopped => Outcome::Partitioned { partitions: emitted(&state), residual: Residual::Complete },
        SolveResult::Unknown if state.emitted.is_empty() => Outcome::Unknown,
        SolveResult::Unknown => {
            state.truncate(now);
            Outcome::Partitioned { partitions: emitted(&state), residual: Residual::Truncated }
        }
    };
    Ok(PartitionRun { outcome, elapsed: now, stats: solver.stats().clone(), calls: state.call_count })
}

/// One partitioning formula per line.
pub fn manifest(partitions: &[Partition]) -> String {
    partitions.iter().map(|p| term_to_string(&p.formula) + "\n").collect()
}

/// Write `<base>.partition-<i>.smt2` for every partition plus
/// `<base>.manifest` into `dir`. Returns the subproblem paths.
pub fn write_partition_files(
    script: &Script,
    partitions: &[Partition],
    dir: &Path,
    base: &str,
) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for p in partitions {
        let text = emit_subproblem(script, &p.formula).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
        let path = dir.join(subproblem_file_name(base, p.index));
        fs::write(&path, text)?;
        paths.push(path);
    }
    fs::write(dir.join(format!("{base}.manifest")), manifest(partitions))?;
    Ok(paths)
}

/// Script with `formula` appended as an assertion.
pub fn subproblem(script: &Script, formula: &Term) -> Script {
    let mut s = script.clone();
    s.assertions.push(formula.clone());
    s
}
