//! Instrumented CDCL(T) solver for QF_UF and QF_IDL.
//!
//! The propositional engine uses two watched literals, first-UIP learning,
//! VSIDS with phase saving and Luby restarts. Theory literals are checked in
//! full (congruence closure, then Bellman-Ford) whenever unit propagation
//! reaches a fixpoint. A [`DecisionHook`] sees the solver after each
//! decision; this is the channel the partitioner uses.

pub mod abstraction;
mod engine;
pub mod euf;
pub mod heap;
pub mod idl;
pub mod lemma_log;
pub mod types;

pub use engine::{
    AtomChoice, AtomSource, DecisionHook, HookAction, SelectionHeuristic, SolveResult, Solver, SolverError,
    SolverOptions, Stats,
};
pub use types::{LBool, Lit, Var};

use std::time::Duration;

use crate::frontend::Script;

/// Solve `script` with default options.
pub fn solve(script: &Script, budget: Option<Duration>) -> Result<SolveResult, SolverError> {
    Solver::new(script, SolverOptions::default())?.solve(None, budget)
}
