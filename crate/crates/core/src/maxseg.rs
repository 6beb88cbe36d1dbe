// SPDX-License-Identifier: MIT OR Apache-2.0

//! Min-max segmentation: minimize the largest segment penalty.
//!
//! [`ms_fast`] finds the optimum with O(k² log² m) penalty evaluations by
//! binary-searching the end of each leading segment, using [`greedy`] as a
//! feasibility test for the remainder.

use serde::Serialize;

use crate::error::{Result, SegError};
use crate::exact_dp::for_each_placement;
use crate::penalty::{furthest, Penalty};
use crate::segmentation::Segmentation;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaxSegResult {
    pub value: f64,
    pub boundaries: Option<Segmentation>,
}

/// Furthest boundary reachable from `b` with at most `k` segments of cost
/// at most `tau` each.
pub fn greedy<P: Penalty + ?Sized>(p: &P, b: usize, k: usize, tau: f64) -> usize {
    let m = p.num_points();
    let mut b = b;
    for _ in 0..k {
        if b == m {
            break;
        }
        b = furthest(p, b, tau);
    }
    b
}

/// Smallest `b` in `[lo, hi]` satisfying a predicate that is monotone
/// (false then true) on that range and true at `hi`.
fn first_true(lo: usize, hi: usize, mut pred: impl FnMut(usize) -> bool) -> usize {
    let (mut lo, mut hi) = (lo, hi);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

/// Optimal min-max cost of a `k`-segmentation of the whole series.
pub fn ms_fast<P: Penalty + ?Sized>(p: &P, k: usize) -> Result<MaxSegResult> {
    if k == 0 {
        return Err(SegError::param("k must be at least 1"));
    }
    let m = p.num_points();
    let mut best = f64::INFINITY;
    let mut start = 0;
    for remaining in (1..=k).rev() {
        // The first segment ends at `c`; the rest must fit under its cost.
        let c = first_true(start, m, |b| {
            greedy(p, b, remaining - 1, p.cost(start, b)) == m
        });
        debug_assert!(greedy(p, c, remaining - 1, p.cost(start, c)) == m);
        best = best.min(p.cost(start, c));
        if c == start {
            break;
        }
        start = c - 1;
    }
    Ok(MaxSegResult {
        value: best,
        boundaries: None,
    })
}

/// Greedy chain at threshold `delta`: each boundary jumps as far as the
/// threshold allows. Fails if the chain does not reach `m`.
pub fn reconstruct_maxseg<P: Penalty + ?Sized>(
    p: &P,
    k: usize,
    delta: f64,
) -> Result<Segmentation> {
    if k == 0 {
        return Err(SegError::param("k must be at least 1"));
    }
    let m = p.num_points();
    let mut boundaries = Vec::with_capacity(k + 1);
    boundaries.push(0);
    let mut b = 0;
    for _ in 0..k {
        b = furthest(p, b, delta);
        boundaries.push(b);
    }
    if b != m {
        return Err(SegError::Infeasible(format!(
            "threshold {delta} reaches boundary {b} of {m} with {k} segments"
        )));
    }
    Ok(Segmentation::from_sorted(boundaries))
}

/// Optimal min-max value together with a segmentation attaining it.
pub fn solve_maxseg<P: Penalty + ?Sized>(p: &P, k: usize) -> Result<MaxSegResult> {
    let value = ms_fast(p, k)?.value;
    let seg = reconstruct_maxseg(p, k, value)?;
    Ok(MaxSegResult {
        value,
        boundaries: Some(seg),
    })
}

/// Exact optimal min-max cost of a `k`-segmentation of prefix `i`, by enumeration.
pub fn brute_force_maxseg<P: Penalty + ?Sized>(p: &P, k: usize, i: usize) -> Result<f64> {
    p.eval(0, i)?;
    let mut best = f64::INFINITY;
    for_each_placement(k, i, |b| {
        let worst = b.windows(2).map(|w| p.cost(w[0], w[1])).fold(0.0, f64::max);
        best = best.min(worst);
    })?;
    Ok(best)
}
