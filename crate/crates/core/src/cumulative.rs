// SPDX-License-Identifier: MIT OR Apache-2.0

//! Solvers for every prefix and every level at once.
//!
//! [`all_dp`] approximates the sum objective within `1 + εl/k` at level `l`
//! using a sparse candidate set for the last-segment start, in O(mk²/ε)
//! evaluations. [`all_ms`] solves the min-max objective exactly by sweeping
//! boundaries to the right in O(mk log k).

use std::cmp::Ordering;

use crate::error::{Result, SegError};
use crate::penalty::Penalty;
use crate::segmentation::{CostTable, Segmentation};

/// Removes the middle of every consecutive candidate triple whose outer
/// scores differ by at most `delta`.
///
/// The scan never revisits earlier triples, and the first and last
/// candidates always survive. `scores[a]` is the previous level's cost at
/// prefix `a`.
pub fn sparsify(candidates: &mut Vec<usize>, delta: f64, scores: &[f64]) {
    if candidates.len() <= 2 {
        return;
    }
    // `kept[len - 2]` is the triple's left end, `kept[len - 1]` its middle.
    let mut kept = 2;
    for read in 2..candidates.len() {
        let right = candidates[read];
        if scores[right] - scores[candidates[kept - 2]] <= delta {
            kept -= 1;
        }
        candidates[kept] = right;
        kept += 1;
    }
    candidates.truncate(kept);
}

/// Candidate-set statistics collected by [`all_dp_traced`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AllDpTrace {
    /// Largest candidate-set size after sparsification, per level (index `l - 1`).
    pub max_candidates: Vec<usize>,
    pub sparsify_calls: u64,
}

impl AllDpTrace {
    /// Size bound on the candidate set at level `l`: `2 + 2(k + lε)/ε`.
    pub fn candidate_bound(k: usize, level: usize, epsilon: f64) -> f64 {
        2.0 + 2.0 * (k as f64 + level as f64 * epsilon) / epsilon
    }
}

/// Approximate sum-cost table: `o[i,l] <= s[i,l] <= (1 + εl/k)·o[i,l]`.
pub fn all_dp<P: Penalty + ?Sized>(p: &P, k: usize, epsilon: f64) -> Result<CostTable> {
    all_dp_traced(p, k, epsilon).map(|(table, _)| table)
}

pub fn all_dp_traced<P: Penalty + ?Sized>(
    p: &P,
    k: usize,
    epsilon: f64,
) -> Result<(CostTable, AllDpTrace)> {
    if k == 0 {
        return Err(SegError::param("k must be at least 1"));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(SegError::param(format!("epsilon must be positive and finite, got {epsilon}")));
    }
    let m = p.num_points();
    let mut table = CostTable::new(m, k, true);
    let mut trace = AllDpTrace {
        max_candidates: vec![1; k],
        sparsify_calls: 0,
    };
    for i in 0..=m {
        table.set(i, 1, p.cost(0, i));
    }

    let mut prev = table.level(1).to_vec();
    let mut cur = vec![0.0; m + 1];
    let mut cands: Vec<usize> = Vec::new();
    for level in 2..=k {
        let shrink = epsilon / (k as f64 + level as f64 * epsilon);
        cands.clear();
        cands.push(0);
        let mut max_size = 1;
        for i in 0..=m {
            let (mut best, mut arg) = (f64::INFINITY, 0);
            for &a in &cands {
                let c = prev[a] + p.cost(a, i);
                if c < best {
                    best = c;
                    arg = a;
                }
            }
            // Extend past the largest candidate while a start could still help.
            let mut a = cands.last().map_or(0, |&last| last + 1);
            while a <= i && prev[a] <= best {
                let c = prev[a] + p.cost(a, i);
                if c < best {
                    best = c;
                    arg = a;
                }
                cands.push(a);
                a += 1;
            }
            cur[i] = best;
            table.set(i, level, best);
            table.set_back(i, level, arg);

            sparsify(&mut cands, best * shrink, &prev);
            trace.sparsify_calls += 1;
            max_size = max_size.max(cands.len());
        }
        trace.max_candidates[level - 1] = max_size;
        std::mem::swap(&mut prev, &mut cur);
    }
    Ok((table, trace))
}

/// Segmentation realizing `table[i, level]` of an [`all_dp`] table.
pub fn reconstruct_cumulative(table: &CostTable, i: usize, level: usize) -> Result<Segmentation> {
    table.reconstruct(i, level)
}

/// Min-heap over slots `1..=k` keyed by `(cost, slot)`, with in-place updates.
#[derive(Debug)]
struct SlotHeap {
    heap: Vec<usize>,
    pos: Vec<Option<usize>>,
    key: Vec<f64>,
}

impl SlotHeap {
    fn new(slots: usize) -> Self {
        SlotHeap {
            heap: Vec::with_capacity(slots),
            pos: vec![None; slots],
            key: vec![0.0; slots],
        }
    }

    fn less(&self, x: usize, y: usize) -> bool {
        match self.key[x].total_cmp(&self.key[y]) {
            Ordering::Less => true,
            Ordering::Equal => x < y,
            Ordering::Greater => false,
        }
    }

    fn peek(&self) -> Option<usize> {
        self.heap.first().copied()
    }

    fn contains(&self, slot: usize) -> bool {
        self.pos[slot].is_some()
    }

    fn upsert(&mut self, slot: usize, key: f64) {
        self.key[slot] = key;
        match self.pos[slot] {
            Some(at) => {
                let at = self.sift_up(at);
                self.sift_down(at);
            }
            None => {
                self.heap.push(slot);
                self.pos[slot] = Some(self.heap.len() - 1);
                self.sift_up(self.heap.len() - 1);
            }
        }
    }

    fn remove(&mut self, slot: usize) {
        let Some(at) = self.pos[slot].take() else {
            return;
        };
        let last = self.heap.pop().expect("slot present");
        if at < self.heap.len() {
            self.heap[at] = last;
            self.pos[last] = Some(at);
            let at = self.sift_up(at);
            self.sift_down(at);
        }
    }

    fn swap(&mut self, i: usize, j: usize) {
        self.heap.swap(i, j);
        self.pos[self.heap[i]] = Some(i);
        self.pos[self.heap[j]] = Some(j);
    }

    fn sift_up(&mut self, mut at: usize) -> usize {
        while at > 0 {
            let parent = (at - 1) / 2;
            if !self.less(self.heap[at], self.heap[parent]) {
                break;
            }
            self.swap(at, parent);
            at = parent;
        }
        at
    }

    fn sift_down(&mut self, mut at: usize) {
        loop {
            let (l, r) = (2 * at + 1, 2 * at + 2);
            let mut top = at;
            if l < self.heap.len() && self.less(self.heap[l], self.heap[top]) {
                top = l;
            }
            if r < self.heap.len() && self.less(self.heap[r], self.heap[top]) {
                top = r;
            }
            if top == at {
                return;
            }
            self.swap(at, top);
            at = top;
        }
    }
}

/// Counters from one [`all_ms_observed`] run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AllMsStats {
    pub increments: u64,
}

/// Exact min-max cost for every prefix `i` and level `l <= k`.
pub fn all_ms<P: Penalty + ?Sized>(p: &P, k: usize) -> Result<CostTable> {
    all_ms_observed(p, k, |_, _| {}).map(|(table, _)| table)
}

/// [`all_ms`], calling `on_write(i, l)` for every table cell it fills.
///
/// Boundaries `b_1..b_k` start at 0 with a fixed sentinel `b_{k+1} = m`. Each
/// step advances the boundary `b_l` whose extended last segment
/// `p(b_{l-1}, b_l + 1)` is cheapest among those not blocked by `b_{l+1}`;
/// the running maximum of the advanced segments' costs is the optimum for
/// prefix `b_l` at level `l`. Every boundary visits every position once, so
/// the sweep performs exactly `k·m` steps.
pub fn all_ms_observed<P: Penalty + ?Sized>(
    p: &P,
    k: usize,
    mut on_write: impl FnMut(usize, usize),
) -> Result<(CostTable, AllMsStats)> {
    if k == 0 {
        return Err(SegError::param("k must be at least 1"));
    }
    let m = p.num_points();
    let mut table = CostTable::new(m, k, false);
    let mut stats = AllMsStats::default();
    let mut b = vec![0usize; k + 2];
    b[k + 1] = m;
    let mut heap = SlotHeap::new(k + 1);
    let key = |b: &[usize], j: usize| p.cost(b[j - 1], b[j] + 1);
    if m > 0 {
        heap.upsert(k, key(&b, k));
    }

    let mut tau: f64 = 0.0;
    while let Some(l) = heap.peek() {
        b[l] += 1;
        stats.increments += 1;
        tau = tau.max(p.cost(b[l - 1], b[l]));
        table.set(b[l], l, tau);
        on_write(b[l], l);

        // Only slots l-1, l and l+1 read b_l.
        if l > 1 && !heap.contains(l - 1) && b[l - 1] < b[l] {
            heap.upsert(l - 1, key(&b, l - 1));
        }
        if b[l] < b[l + 1] {
            heap.upsert(l, key(&b, l));
        } else {
            heap.remove(l);
        }
        if l < k && b[l + 1] < b[l + 2] {
            heap.upsert(l + 1, key(&b, l + 1));
        }
    }
    debug_assert!(b[1..=k].iter().all(|&x| x == m));
    Ok((table, stats))
}
