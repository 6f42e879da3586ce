//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness. Pass criterion numbers as arguments
//! to run a subset, e.g. `cargo test --test acceptance -- 4 5`.

mod common;

use std::cell::Cell;
use std::collections::HashSet;
use std::panic;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use smtpart::frontend::{parse_script, scramble, Logic, Script, Term};
use smtpart::harness::{
    aggregate_job, aggregate_portfolio, multijob_schedule, par2_score, run_embedded, run_plan, Aggregate, Benchmark,
    RunConfig, RunRecord, Task, Verdict,
};
use smtpart::partition::{
    manifest, partition, subproblem, write_partition_files, AtomSnapshot, Family, Outcome, PartitionType,
    PartitionerState, Residual, Step, StrategyConfig, TimingHeuristic,
};
use smtpart::portfolio::{graduated_plan, single_plan};
use smtpart::solver::{solve, AtomChoice, AtomSource, SelectionHeuristic, SolveResult, Var};
use smtpart::testing::{idl_pigeonhole, pigeonhole};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {{
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    }};
}

fn check_config(family: Family, n: u32) -> StrategyConfig {
    StrategyConfig::for_family(family, n).unwrap().with_timing(TimingHeuristic::Check, 1.0, 1.0).unwrap()
}

fn parse(text: &str) -> Script {
    parse_script(text).unwrap()
}

// 1 -------------------------------------------------------------------------

fn solver_oracle_equivalence() -> Check {
    let start = Instant::now();
    let (mut uf, mut idl, mut sat) = (0, 0, 0);
    for seed in 0..500 {
        let s = common::random_instance(seed);
        let atoms = common::atoms_of(&s.assertions).len();
        ensure!((10..=40).contains(&atoms), "instance {seed} has {atoms} atoms");
        match s.logic {
            Logic::QfUf => uf += 1,
            Logic::QfIdl => idl += 1,
        }
        let expected = common::brute_force(&s);
        match solve(&s, None).unwrap() {
            SolveResult::Sat(m) => {
                ensure!(expected, "instance {seed}: solver sat, oracle unsat");
                ensure!(m.satisfies(&s).unwrap(), "instance {seed}: model does not satisfy");
                sat += 1;
            }
            SolveResult::Unsat => ensure!(!expected, "instance {seed}: solver unsat, oracle sat"),
            other => return Err(format!("instance {seed}: {other:?}")),
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < 300.0, "took {secs:.1}s");
    Ok(format!("500/500 agree ({uf} QF_UF, {idl} QF_IDL, {sat} sat) in {secs:.1}s"))
}

// 2 -------------------------------------------------------------------------

/// Offers the same `k` Boolean atoms on every call, with a new sign
/// pattern each time so successive scatter cubes differ.
struct Pool {
    atoms: Vec<Term>,
    calls: Cell<u64>,
}

impl AtomSnapshot for Pool {
    fn elapsed(&self) -> Duration {
        Duration::ZERO
    }

    fn collect_atoms(
        &self,
        _: AtomSource,
        _: SelectionHeuristic,
        want: usize,
        exclude: &HashSet<Var>,
        _: &mut ChaCha8Rng,
    ) -> Vec<AtomChoice> {
        let pattern = self.calls.get();
        self.calls.set(pattern + 1);
        self.atoms
            .iter()
            .enumerate()
            .map(|(j, t)| AtomChoice { var: Var(j as u32 + 1), term: t.clone(), polarity: pattern >> j & 1 == 0 })
            .filter(|a| !exclude.contains(&a.var))
            .take(want)
            .collect()
    }
}

fn drive(config: StrategyConfig, host: &impl AtomSnapshot) -> Vec<Term> {
    let mut state = PartitionerState::new(config);
    for _ in 0..10_000 {
        if let Step::Done(ps) = state.step(host) {
            return ps.into_iter().map(|p| p.formula).collect();
        }
    }
    panic!("partitioner never finished");
}

fn partition_algebra() -> Check {
    let start = Instant::now();
    let mut tables = 0;
    for family in Family::ALL {
        for k in 1..=6u32 {
            let n = 1 << k;
            let mut config = check_config(family, n);
            config.exclude_used_atoms = false;
            let host = Pool { atoms: (0..k).map(|j| Term::bool_var(format!("a{j}"))).collect(), calls: Cell::new(0) };
            let fs = drive(config, &host);
            ensure!(fs.len() == n as usize, "{family} k={k}: {} partitions", fs.len());
            let (disjoint, covering) = common::exactly_one_everywhere(&fs);
            ensure!(disjoint && covering, "{family} k={k}: disjoint {disjoint}, covering {covering}");
            tables += 1;
        }
    }
    // the real solver, with atom exclusion, where the table stays small
    let mut runs = 0;
    for family in Family::ALL {
        let max_k = if family.parts().1 == PartitionType::Cube { 6 } else { 2 };
        for k in 1..=max_k {
            for seed in 0..8 {
                let s = common::random_instance(seed);
                let run = partition(&s, &check_config(family, 1 << k), None).unwrap();
                if let Outcome::Partitioned { partitions, residual: Residual::Complete } = run.outcome {
                    let fs: Vec<Term> = partitions.into_iter().map(|p| p.formula).collect();
                    let (disjoint, covering) = common::exactly_one_everywhere(&fs);
                    ensure!(disjoint && covering, "{family} k={k} instance {seed}");
                    runs += 1;
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < 60.0, "took {secs:.1}s");
    Ok(format!("{tables} exhaustive tables (6 families x k=1..6) plus {runs} solver-made partitionings, {secs:.1}s"))
}

// 3 -------------------------------------------------------------------------

fn equisatisfiability() -> Check {
    let mut partitioned = 0;
    let mut runs = 0;
    for seed in 0..100 {
        let s = common::small_instance(1000 + seed);
        let sat = common::brute_force(&s);
        for family in Family::ALL {
            runs += 1;
            let run = partition(&s, &check_config(family, 4), None).unwrap();
            match run.outcome {
                Outcome::Sat(_) => ensure!(sat, "instance {seed} {family}: sat while partitioning, oracle unsat"),
                Outcome::Unsat => ensure!(!sat, "instance {seed} {family}: unsat while partitioning, oracle sat"),
                Outcome::Unknown => return Err(format!("instance {seed} {family}: unknown")),
                Outcome::Partitioned { partitions, .. } => {
                    partitioned += 1;
                    let any = partitions.iter().any(|p| common::brute_force(&subproblem(&s, &p.formula)));
                    ensure!(any == sat, "instance {seed} {family}: oracle {sat}, partitions {any}");
                }
            }
        }
    }
    Ok(format!("0 violations over {runs} runs ({partitioned} produced partitions)"))
}

// 4 -------------------------------------------------------------------------

fn composition() -> Check {
    let p = graduated_plan(32, &Family::DEFAULT_RANK).unwrap();
    let mut sizes = p.strategy_sizes();
    sizes.sort_unstable();
    ensure!(sizes == [2, 2, 2, 4, 4, 4, 8], "budget 32 gives {sizes:?}");
    ensure!(p.partition_count() == 26, "budget 32 uses {}", p.partition_count());
    let q = graduated_plan(16, &[Family::DecisionCube]).unwrap();
    let mut single = q.strategy_sizes();
    single.sort_unstable();
    ensure!(single == [2, 4, 8], "budget 16 gives {single:?}");
    Ok("{2,2,2,4,4,4,8} = 26 and {2,4,8}".into())
}

// 5 -------------------------------------------------------------------------

fn solved(t: f64) -> Aggregate {
    Aggregate { verdict: Verdict::Unsat, time: t }
}

fn par2_fixtures() -> Check {
    let to = Aggregate::timeout(1200.0);
    let cases: [(Vec<Aggregate>, f64); 4] = [
        (vec![solved(100.0), solved(300.0), to], 2800.0),
        (vec![to; 5], 12000.0),
        (vec![], 0.0),
        (vec![Aggregate { verdict: Verdict::Sat, time: 12.5 }, solved(0.5), to, to], 4813.0),
    ];
    for (rs, want) in &cases {
        let got = par2_score(rs, 1200.0);
        ensure!(got == *want, "{rs:?}: {got} != {want}");
    }
    Ok(format!("{} fixtures exact", cases.len()))
}

// 6 -------------------------------------------------------------------------

fn rec(verdict: Verdict, wall_time: f64) -> RunRecord {
    RunRecord {
        benchmark: "b".into(),
        job: "j".into(),
        partition: "1".into(),
        verdict,
        wall_time,
        partition_time: 3.0,
        diagnostic: None,
    }
}

fn aggregation_fixtures() -> Check {
    use Verdict::*;
    let job = |rs: &[RunRecord]| aggregate_job(rs, 3.0, 1200.0);
    let unsat = [10.0, 40.0, 25.0, 5.0].map(|t| rec(Unsat, t));
    ensure!(job(&unsat) == Aggregate { verdict: Unsat, time: 43.0 }, "unsat-max: {:?}", job(&unsat));
    let mixed = [rec(Sat, 30.0), rec(Unsat, 100.0), rec(Sat, 12.0), rec(Timeout, 1200.0)];
    ensure!(job(&mixed) == Aggregate { verdict: Sat, time: 15.0 }, "sat-min: {:?}", job(&mixed));
    let blocked = [rec(Unsat, 10.0), rec(Timeout, 1200.0), rec(Unsat, 20.0)];
    ensure!(job(&blocked) == Aggregate::timeout(1200.0), "timeout-blocking: {:?}", job(&blocked));
    let errored = [rec(Unsat, 10.0), rec(Error, 0.2)];
    ensure!(job(&errored) == Aggregate::timeout(1200.0), "error-blocking: {:?}", job(&errored));
    let p = aggregate_portfolio(&[solved(700.0), Aggregate::timeout(1200.0), solved(300.0)], 1200.0).unwrap();
    ensure!(p == solved(300.0), "portfolio minimum: {p:?}");
    ensure!(
        aggregate_portfolio(&[Aggregate { verdict: Sat, time: 1.0 }, solved(2.0)], 1200.0).is_err(),
        "sat and unsat in one portfolio must be rejected"
    );
    Ok("unsat-max 43, sat-min 15, timeout and error block unsat, portfolio minimum".into())
}

// 7 -------------------------------------------------------------------------

fn multijob_scheduling() -> Check {
    let mut r = common::rng(2024);
    let mut dropped = 0;
    for set in 0..1000 {
        let count = r.gen_range(0..60);
        let tasks: Vec<Task> = (0..count)
            .map(|_| {
                let n = 1u32 << r.gen_range(1..=7);
                let rank = r.gen_range(0..3);
                Task {
                    key: (n, rank, r.gen_range(1..=n as usize)),
                    job: format!("{n}-{rank}"),
                    duration: if r.gen_bool(0.1) { 1.0 } else { r.gen_range(0.001..100.0) },
                    verdict: Verdict::Unsat,
                    partition_time: 0.0,
                }
            })
            .collect();
        let cores = r.gen_range(1..=16);
        let budget = r.gen_range(1.0..300.0);
        let s = multijob_schedule(&tasks, cores, budget).unwrap();
        for (c, core) in s.per_core.iter().enumerate() {
            ensure!(s.per_core_time[c] <= budget, "set {set}: core {c} over budget");
            ensure!(
                core.windows(2).all(|w| tasks[w[0].task].key <= tasks[w[1].task].key && w[0].end == w[1].start),
                "set {set}: core {c} out of order"
            );
        }
        let keys: Vec<_> = tasks.iter().map(|t| t.key).collect();
        let durations: Vec<f64> = tasks.iter().map(|t| t.duration).collect();
        let (lists, finish, sim_dropped) = common::simulate_schedule(&keys, &durations, cores, budget);
        let got: Vec<Vec<usize>> = s.per_core.iter().map(|c| c.iter().map(|p| p.task).collect()).collect();
        ensure!(got == lists && s.dropped == sim_dropped, "set {set}: placement differs from simulation");
        let sim_makespan = finish.iter().copied().fold(0.0, f64::max);
        ensure!(s.makespan() == sim_makespan, "set {set}: makespan {} != {sim_makespan}", s.makespan());
        dropped += s.dropped.len();
    }
    Ok(format!("1000 task sets match the event simulation exactly ({dropped} tasks dropped for budget)"))
}

// 8 -------------------------------------------------------------------------

/// Cube-and-conquer job with simulated parallel partition solving: the
/// job ends at partition time plus its slowest partition, or at the first
/// sat partition.
fn cube_job(s: &Script, t1: f64, timeout: f64) -> Aggregate {
    let mut config = StrategyConfig::for_family(Family::DecisionCube, 4).unwrap();
    config.t1 = t1;
    let run = partition(s, &config, Some(Duration::from_secs_f64(timeout))).unwrap();
    let pt = run.elapsed.as_secs_f64();
    let partitions = match run.outcome {
        Outcome::Sat(_) => return Aggregate { verdict: Verdict::Sat, time: pt },
        Outcome::Unsat => return solved(pt),
        Outcome::Unknown => return Aggregate::timeout(timeout),
        Outcome::Partitioned { partitions, .. } => partitions,
    };
    let left = Duration::from_secs_f64((timeout - pt).max(0.0));
    let mut records = Vec::new();
    for p in &partitions {
        let o = run_embedded(&subproblem(s, &p.formula), left);
        let decisive = o.verdict.is_decisive();
        records.push(RunRecord { verdict: o.verdict, wall_time: o.wall_time, ..rec(o.verdict, 0.0) });
        if !decisive || o.verdict == Verdict::Sat {
            break;
        }
    }
    let a = aggregate_job(&records, pt, timeout);
    if a.is_decisive() && a.time > timeout {
        Aggregate::timeout(timeout)
    } else {
        a
    }
}

fn timing_gate() -> Check {
    // TIME: nothing before t1
    let hard = parse(&pigeonhole(9, 8));
    let config = StrategyConfig::for_family(Family::DecisionCube, 2).unwrap();
    let wall = Instant::now();
    let run = partition(&hard, &config, Some(Duration::from_secs(20))).unwrap();
    let wall = wall.elapsed().as_secs_f64();
    let first = run.partitions().first().map(|p| p.emitted_at.as_secs_f64());
    let Some(first) = first else {
        return Err(format!("no partition on the hard instance: {:?}", run.outcome));
    };
    ensure!((3.0..=3.05).contains(&first), "first partition at {first:.4}s");
    ensure!(wall >= 3.0, "returned after {wall:.3}s");

    // CHECK with t1 = t2 = 1: every callback makes a partition
    // 15 cubes of 4 distinct atoms need 60 of its 72 atoms
    let run = partition(&hard, &check_config(Family::HeapScatter, 16), None).unwrap();
    ensure!(run.partitions().len() == 16, "{} partitions", run.partitions().len());
    ensure!(run.calls == 15, "15 cubes took {} callbacks", run.calls);
    let mut state = PartitionerState::new(check_config(Family::DecisionCube, 4));
    ensure!((0..100).all(|i| state.is_time_to_partition(Duration::from_millis(i))), "CHECK gate stayed closed");

    // direction of effect on a micro-corpus of instances that outlive t1
    let mut corpus: Vec<Script> = (1..=5).map(|k| scramble(&parse(&idl_pigeonhole(8, 7)), k)).collect();
    corpus.extend((1..=5).map(|k| scramble(&parse(&pigeonhole(9, 8)), k)));
    let timeout = 30.0;
    let late: Vec<Aggregate> = corpus.iter().map(|s| cube_job(s, 3.0, timeout)).collect();
    let early: Vec<Aggregate> = corpus.iter().map(|s| cube_job(s, 0.05, timeout)).collect();
    let count = |v: &[Aggregate]| v.iter().filter(|a| a.is_decisive()).count();
    let (nl, ne) = (count(&late), count(&early));
    ensure!(nl >= ne, "t1=3 solved {nl}, t1=0.05 solved {ne}");
    Ok(format!(
        "first TIME partition at {first:.3}s; CHECK: 15 callbacks for 15 cubes; micro-corpus solved t1=3: {nl}/10, t1=0.05: {ne}/10 (PAR-2 {:.1} vs {:.1})",
        par2_score(&late, timeout),
        par2_score(&early, timeout)
    ))
}

// 9 -------------------------------------------------------------------------

fn determinism() -> Check {
    let instances = [parse(&idl_pigeonhole(6, 5)), parse(&pigeonhole(6, 5)), common::random_instance(7)];
    let mut compared = 0;
    for (i, s) in instances.iter().enumerate() {
        for family in Family::ALL {
            for heur in [SelectionHeuristic::Spec, SelectionHeuristic::Rand] {
                let mut config = StrategyConfig::for_family(family, 8)
                    .unwrap()
                    .with_timing(TimingHeuristic::Check, 5.0, 3.0)
                    .unwrap();
                config.heuristic = heur;
                config.seed = 42;
                let a = partition(s, &config, None).unwrap();
                let b = partition(s, &config, None).unwrap();
                let (ma, mb) = (manifest(a.partitions()), manifest(b.partitions()));
                ensure!(ma == mb, "instance {i} {}: manifests differ", config.tag());
                if a.partitions().is_empty() {
                    continue;
                }
                let (da, db) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
                let fa = write_partition_files(s, a.partitions(), da.path(), "x").unwrap();
                let fb = write_partition_files(s, b.partitions(), db.path(), "x").unwrap();
                for (x, y) in fa.iter().zip(&fb) {
                    ensure!(std::fs::read(x).unwrap() == std::fs::read(y).unwrap(), "{} differs", x.display());
                }
                let read = |d: &tempfile::TempDir| std::fs::read(d.path().join("x.manifest")).unwrap();
                ensure!(read(&da) == read(&db), "manifest files differ");
                compared += 1;
            }
        }
    }
    Ok(format!("{compared} partitioned run pairs byte-identical (6 families x SPEC/RAND x 3 instances)"))
}

// 10 ------------------------------------------------------------------------

fn scatter_protocol() -> Check {
    let mut notes = Vec::new();
    for (name, text) in [("php_6_5", pigeonhole(6, 5)), ("idl_php_6_5", idl_pigeonhole(6, 5))] {
        let dir = tempfile::tempdir().unwrap();
        let bench = Benchmark::new(name, parse(&text));
        let mut cfg = RunConfig::new(Duration::from_secs(60), 4);
        cfg.strategy = cfg.strategy.with_timing(TimingHeuristic::Check, 1.0, 20.0).unwrap();
        cfg.scratch = Some(dir.path().to_path_buf());
        let report = run_plan(&single_plan(Family::HeapScatter, 128).unwrap(), &bench, &cfg).unwrap();
        let job = &report.jobs[0];
        ensure!(job.residual == Some(Residual::RemainderUnsat), "{name}: residual {:?}", job.residual);
        let m = job.partitions;
        ensure!(m >= 1, "{name}: no scatter partitions");
        ensure!(report.records.len() == m, "{name}: {} of {m} partitions run", report.records.len());
        ensure!(
            report.records.iter().all(|r| r.verdict == Verdict::Unsat),
            "{name}: partition verdicts {:?}",
            report.records.iter().map(|r| r.verdict).collect::<Vec<_>>()
        );
        let truth = common::brute_force(&bench.script);
        ensure!(!truth && report.result.verdict == Verdict::Unsat, "{name}: combined {:?}", report.result);
        notes.push(format!("{name}: m={m}"));
    }
    Ok(format!("remainder refuted, every partition solved, combined unsat ({})", notes.join(", ")))
}

// ---------------------------------------------------------------------------

fn main() {
    let criteria: [Criterion; 10] = [
        ("solver oracle equivalence", solver_oracle_equivalence),
        ("partition algebra", partition_algebra),
        ("equisatisfiability", equisatisfiability),
        ("graduated composition", composition),
        ("PAR-2 arithmetic", par2_fixtures),
        ("aggregation semantics", aggregation_fixtures),
        ("multijob scheduling", multijob_scheduling),
        ("timing gate", timing_gate),
        ("determinism", determinism),
        ("scatter protocol", scatter_protocol),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let start = Instant::now();
    let mut failed = 0;
    let mut ran = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        ran += 1;
        let t = Instant::now();
        let result = panic::catch_unwind(f).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = t.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {id:>2} {name}: {detail} [{secs:.1}s]"),
            Err(why) => {
                failed += 1;
                println!("FAIL {id:>2} {name}: {why} [{secs:.1}s]");
            }
        }
    }
    println!("acceptance: {}/{ran} passed in {:.1}s", ran - failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
