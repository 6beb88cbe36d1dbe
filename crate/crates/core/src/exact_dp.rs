// SPDX-License-Identifier: MIT OR Apache-2.0

//! Exact O(m²k) dynamic program for sum-of-penalties segmentation, plus an
//! exhaustive enumerator used as an independent reference in tests.

use crate::error::{Result, SegError};
use crate::penalty::Penalty;
use crate::segmentation::{CostTable, Segmentation};

/// Largest number of boundary placements the brute-force solvers will visit.
pub const BRUTE_FORCE_BUDGET: u128 = 1_000_000;

/// Optimal `l`-segmentation cost of every prefix `i`, for all `l <= k`.
///
/// Ties in the last-segment start resolve to the largest start.
pub fn bellman_all<P: Penalty + ?Sized>(p: &P, k: usize) -> Result<CostTable> {
    if k == 0 {
        return Err(SegError::param("k must be at least 1"));
    }
    let m = p.num_points();
    let mut table = CostTable::new(m, k, true);
    for i in 0..=m {
        table.set(i, 1, p.cost(0, i));
    }
    let mut prev = table.level(1).to_vec();
    for level in 2..=k {
        let mut cur = vec![0.0; m + 1];
        for i in 0..=m {
            let (mut best, mut arg) = (f64::INFINITY, 0);
            for (j, &head) in prev.iter().enumerate().take(i + 1) {
                let c = head + p.cost(j, i);
                if c <= best {
                    best = c;
                    arg = j;
                }
            }
            cur[i] = best;
            table.set(i, level, best);
            table.set_back(i, level, arg);
        }
        prev = cur;
    }
    Ok(table)
}

/// Optimal segmentation of the whole series into `k` segments.
pub fn solve_exact<P: Penalty + ?Sized>(p: &P, k: usize) -> Result<(Segmentation, f64)> {
    let table = bellman_all(p, k)?;
    let m = p.num_points();
    Ok((table.reconstruct(m, k)?, table.get(m, k)))
}

/// Rough count of penalty evaluations `bellman_all` performs.
pub fn exact_eval_estimate(m: usize, k: usize) -> u128 {
    let m = m as u128 + 1;
    m + (k.saturating_sub(1) as u128) * m * (m + 1) / 2
}

/// Binomial coefficient, saturating at `u128::MAX`.
fn binomial(n: u128, r: u128) -> u128 {
    let r = r.min(n.saturating_sub(r));
    let mut acc: u128 = 1;
    for j in 0..r {
        acc = match acc.checked_mul(n - j) {
            Some(v) => v / (j + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Number of non-decreasing placements of `k - 1` inner boundaries in `[0, i]`.
pub fn placement_count(k: usize, i: usize) -> u128 {
    binomial((i + k - 1) as u128, (k - 1) as u128)
}

/// Calls `visit` with every boundary list `0 = b_0 <= ... <= b_k = i`.
pub(crate) fn for_each_placement(
    k: usize,
    i: usize,
    mut visit: impl FnMut(&[usize]),
) -> Result<()> {
    if k == 0 {
        return Err(SegError::param("k must be at least 1"));
    }
    let count = placement_count(k, i);
    if count > BRUTE_FORCE_BUDGET {
        return Err(SegError::EnumerationBudget {
            count,
            budget: BRUTE_FORCE_BUDGET,
        });
    }
    let mut bounds = vec![0; k + 1];
    bounds[k] = i;
    fn rec(bounds: &mut [usize], pos: usize, i: usize, visit: &mut dyn FnMut(&[usize])) {
        if pos == bounds.len() - 1 {
            visit(bounds);
            return;
        }
        for b in bounds[pos - 1]..=i {
            bounds[pos] = b;
            rec(bounds, pos + 1, i, visit);
        }
    }
    rec(&mut bounds, 1, i, &mut visit);
    Ok(())
}

/// Exact optimal sum-cost of a `k`-segmentation of prefix `i`, by enumeration.
pub fn brute_force_seg<P: Penalty + ?Sized>(p: &P, k: usize, i: usize) -> Result<f64> {
    p.eval(0, i)?;
    let mut best = f64::INFINITY;
    for_each_placement(k, i, |b| {
        let total: f64 = b.windows(2).map(|w| p.cost(w[0], w[1])).sum();
        best = best.min(total);
    })?;
    Ok(best)
}
