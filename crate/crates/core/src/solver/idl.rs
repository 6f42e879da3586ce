//! Integer difference logic: constraints `x - y <= k` checked for negative
//! cycles with Bellman-Ford.

use thiserror::Error;

use crate::frontend::diff::MAX_BOUND;

/// Index of an integer variable. Variable 0 is the constant zero.
pub type IdlVar = usize;
pub const ZERO: IdlVar = 0;

/// `x - y <= bound`
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DiffLe {
    pub x: IdlVar,
    pub y: IdlVar,
    pub bound: i64,
}

impl DiffLe {
    /// The complement over the integers: `y - x <= -bound - 1`.
    pub fn negated(self) -> DiffLe {
        DiffLe { x: self.y, y: self.x, bound: -self.bound - 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum IdlError {
    #[error("difference bound {0} exceeds 2^40")]
    BoundTooLarge(i64),
}

/// Decide a conjunction of difference constraints over `num_vars`
/// variables. `Ok(Ok(values))` is a satisfying assignment with
/// `values[ZERO] == 0`; `Ok(Err(tags))` names the constraints on one
/// negative cycle.
pub fn check<T: Copy>(num_vars: usize, constraints: &[(DiffLe, T)]) -> Result<Result<Vec<i64>, Vec<T>>, IdlError> {
    for (c, _) in constraints {
        if c.bound.abs() > MAX_BOUND + 1 {
            return Err(IdlError::BoundTooLarge(c.bound));
        }
    }
    let n = num_vars.max(1);
    // edge y -> x with weight bound: dist[x] <= dist[y] + bound
    let mut dist = vec![0i64; n];
    let mut pred: Vec<Option<usize>> = vec![None; n];
    let mut changed_at = None;
    for _round in 0..n {
        changed_at = None;
        for (i, (c, _)) in constraints.iter().enumerate() {
            let cand = dist[c.y] + c.bound;
            if cand < dist[c.x] {
                dist[c.x] = cand;
                pred[c.x] = Some(i);
                changed_at = Some(c.x);
            }
        }
        if changed_at.is_none() {
            break;
        }
    }
    let Some(mut v) = changed_at else {
        let base = dist[ZERO];
        return Ok(Ok(dist.iter().map(|d| d - base).collect()));
    };
    // walking back n steps lands on the cycle
    for _ in 0..n {
        v = constraints[pred[v].expect("relaxed vertex has a predecessor")].0.y;
    }
    let start = v;
    let mut cycle = Vec::new();
    loop {
        let e = pred[v].unwrap();
        cycle.push(constraints[e].1);
        v = constraints[e].0.y;
        if v == start {
            break;
        }
    }
    Ok(Err(cycle))
}
