//! Variable activity scores kept in an indexed binary max-heap.

use super::types::Var;

const RESCALE_LIMIT: f64 = 1e100;

#[derive(Clone, Debug)]
pub struct ActivityHeap {
    activity: Vec<f64>,
    heap: Vec<Var>,
    /// Position of each variable in `heap`, if present.
    index: Vec<Option<usize>>,
    increment: f64,
    decay: f64,
}

impl ActivityHeap {
    /// `decay` is the per-conflict decay factor; the bump increment grows
    /// by `1 / decay` after each conflict.
    pub fn new(decay: f64) -> Self {
        ActivityHeap { activity: Vec::new(), heap: Vec::new(), index: Vec::new(), increment: 1.0, decay }
    }

    pub fn add_var(&mut self) -> Var {
        let v = Var(self.activity.len() as u32);
        self.activity.push(0.0);
        self.index.push(None);
        self.insert(v);
        v
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn contains(&self, v: Var) -> bool {
        self.index[v.idx()].is_some()
    }

    pub fn activity(&self, v: Var) -> f64 {
        self.activity[v.idx()]
    }

    pub fn num_vars(&self) -> usize {
        self.activity.len()
    }

    fn better(&self, a: Var, b: Var) -> bool {
        let (x, y) = (self.activity[a.idx()], self.activity[b.idx()]);
        x > y || (x == y && a < b)
    }

    pub fn insert(&mut self, v: Var) {
        if self.contains(v) {
            return;
        }
        self.index[v.idx()] = Some(self.heap.len());
        self.heap.push(v);
        self.sift_up(self.heap.len() - 1);
    }

    pub fn pop(&mut self) -> Option<Var> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().unwrap();
        self.index[top.idx()] = None;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.index[last.idx()] = Some(0);
            self.sift_down(0);
        }
        Some(top)
    }

    pub fn bump(&mut self, v: Var) {
        self.activity[v.idx()] += self.increment;
        if self.activity[v.idx()] > RESCALE_LIMIT {
            for a in &mut self.activity {
                *a *= 1.0 / RESCALE_LIMIT;
            }
            self.increment *= 1.0 / RESCALE_LIMIT;
        }
        if let Some(i) = self.index[v.idx()] {
            self.sift_up(i);
        }
    }

    pub fn decay(&mut self) {
        self.increment /= self.decay;
    }

    /// Overwrite a score directly and restore the heap property.
    pub fn set_activity(&mut self, v: Var, score: f64) {
        self.activity[v.idx()] = score;
        if let Some(i) = self.index[v.idx()] {
            self.sift_up(i);
            let i = self.index[v.idx()].unwrap();
            self.sift_down(i);
        }
    }

    /// All variables ordered by descending activity, ties by index.
    pub fn ranked(&self) -> Vec<Var> {
        let mut vars: Vec<Var> = (0..self.activity.len() as u32).map(Var).collect();
        vars.sort_by(|&a, &b| self.activity[b.idx()].total_cmp(&self.activity[a.idx()]).then(a.cmp(&b)));
        vars
    }

    fn sift_up(&mut self, mut i: usize) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            if !self.better(v, self.heap[parent]) {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.index[self.heap[i].idx()] = Some(i);
            i = parent;
        }
        self.heap[i] = v;
        self.index[v.idx()] = Some(i);
    }

    fn sift_down(&mut self, mut i: usize) {
        let v = self.heap[i];
        loop {
            let l = 2 * i + 1;
            if l >= self.heap.len() {
                break;
            }
            let r = l + 1;
            let child = if r < self.heap.len() && self.better(self.heap[r], self.heap[l]) { r } else { l };
            if !self.better(self.heap[child], v) {
                break;
            }
            self.heap[i] = self.heap[child];
            self.index[self.heap[i].idx()] = Some(i);
            i = child;
        }
        self.heap[i] = v;
        self.index[v.idx()] = Some(i);
    }

    #[cfg(test)]
    fn heap_property_holds(&self) -> bool {
        (1..self.heap.len()).all(|i| !self.better(self.heap[i], self.heap[(i - 1) / 2]))
            && self.heap.iter().enumerate().all(|(i, v)| self.index[v.idx()] == Some(i))
    }
}
