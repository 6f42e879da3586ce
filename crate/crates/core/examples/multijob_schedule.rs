//! Packing partitions of several jobs onto 4 cores within a time budget.

use smtpart::harness::{multijob_outcome, multijob_schedule, Task, Verdict};

pub fn run_example() -> String {
    // (n, rank, index, seconds, verdict)
    let raw = [
        (2, 0, 1, 40.0, Verdict::Unsat),
        (2, 0, 2, 90.0, Verdict::Unsat),
        (4, 0, 1, 20.0, Verdict::Unsat),
        (4, 0, 2, 25.0, Verdict::Unsat),
        (4, 0, 3, 30.0, Verdict::Unsat),
        (4, 0, 4, 80.0, Verdict::Unsat),
        (8, 1, 1, 70.0, Verdict::Unsat),
        (8, 1, 2, 70.0, Verdict::Unsat),
    ];
    let tasks: Vec<Task> = raw
        .iter()
        .map(|&(n, rank, idx, duration, verdict)| Task {
            key: (n, rank, idx),
            job: format!("job-{n}-{rank}"),
            duration,
            verdict,
            partition_time: 1.0,
        })
        .collect();
    let schedule = multijob_schedule(&tasks, 4, 120.0).unwrap();
    let mut out = String::new();
    for (c, core) in schedule.per_core.iter().enumerate() {
        let cells: Vec<String> = core
            .iter()
            .map(|p| format!("{}#{} [{}, {}]", tasks[p.task].job, tasks[p.task].key.2, p.start, p.end))
            .collect();
        out += &format!("core {c}: {}\n", cells.join(", "));
    }
    for &i in &schedule.dropped {
        out += &format!("dropped {}#{}\n", tasks[i].job, tasks[i].key.2);
    }
    let result = multijob_outcome(&tasks, &schedule, 120.0).unwrap();
    out += &format!("result: {} at {}s\n", result.verdict.name(), result.time);
    out
}

#[allow(dead_code)]
fn main() {
    print!("{}", run_example());
}
