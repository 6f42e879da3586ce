//! Occurrence counts of atoms in theory-produced clauses.

use std::collections::HashMap;

use super::types::{Lit, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LemmaOrigin {
    Conflict,
    Lemma,
}

#[derive(Clone, Debug, Default)]
pub struct TheoryLemmaLog {
    counts: HashMap<Var, u32>,
    /// Variables in order of first occurrence since the last reset.
    order: Vec<Var>,
    conflicts: u64,
    lemmas: u64,
}

impl TheoryLemmaLog {
    pub fn record(&mut self, clause: &[Lit], origin: LemmaOrigin) {
        match origin {
            LemmaOrigin::Conflict => self.conflicts += 1,
            LemmaOrigin::Lemma => self.lemmas += 1,
        }
        let mut seen: Vec<Var> = clause.iter().map(|l| l.var()).collect();
        seen.sort_unstable();
        seen.dedup();
        // keep first-seen order as in the clause
        for l in clause {
            let v = l.var();
            if let Ok(i) = seen.binary_search(&v) {
                seen.remove(i);
                let c = self.counts.entry(v).or_insert(0);
                if *c == 0 {
                    self.order.push(v);
                }
                *c += 1;
            }
        }
    }

    pub fn count(&self, v: Var) -> u32 {
        self.counts.get(&v).copied().unwrap_or(0)
    }

    /// Variables by descending count, ties broken by first occurrence.
    pub fn ranked(&self) -> Vec<Var> {
        let mut vars = self.order.clone();
        // stable sort keeps first-seen order among equal counts
        vars.sort_by_key(|v| std::cmp::Reverse(self.count(*v)));
        vars
    }

    pub fn reset(&mut self) {
        self.counts.clear();
        self.order.clear();
    }

    pub fn conflicts_seen(&self) -> u64 {
        self.conflicts
    }

    pub fn lemmas_seen(&self) -> u64 {
        self.lemmas
    }
}
