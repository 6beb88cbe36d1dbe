// SPDX-License-Identifier: MIT OR Apache-2.0

//! (1+ε)-approximation for sum-of-penalties segmentation with a running time
//! that depends on `k`, `ε` and `log m` only.
//!
//! The pipeline is: the min-max optimum `Δ` brackets the sum optimum `θ` as
//! `Δ <= θ <= kΔ`; [`estimate`] tightens that to `η <= θ <= 2η` in O(log k)
//! oracle calls; a final [`oracle`] call with `δ = εη` and `u = (2+ε)η`
//! returns a segmentation of cost at most `(1+ε)θ`.

use serde::Serialize;

use crate::error::{Result, SegError};
use crate::maxseg::{ms_fast, reconstruct_maxseg};
use crate::penalty::{furthest, Penalty};
use crate::segmentation::Segmentation;

/// Relative slack applied to each quantized budget so that a segment whose
/// cost lands exactly on a grid point is not lost to rounding.
const GRID_SLACK: f64 = 1e-12;

/// Upper bound on estimate passes; reaching it means the lower bound was
/// not below the optimum or the penalty is not monotone.
const MAX_ESTIMATE_ITERATIONS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub feasible: bool,
    pub segmentation: Option<Segmentation>,
    pub cost: Option<f64>,
}

impl OracleResult {
    fn infeasible() -> Self {
        OracleResult {
            feasible: false,
            segmentation: None,
            cost: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproxOutcome {
    pub segmentation: Segmentation,
    pub cost: f64,
    pub eta: f64,
    pub alpha: f64,
    pub estimate_iterations: usize,
}

/// How the lower bound `α` handed to [`estimate`] is derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SeedStrategy {
    /// `α = Δ`, the min-max optimum.
    #[default]
    MaxValue,
    /// `α = S/k`, where `S` is the sum-cost of a min-max optimal segmentation.
    SumOverK,
}

/// Budgeted segmentation oracle.
///
/// Whenever the optimum `θ` satisfies `θ + δ <= u`, the result is feasible
/// with true cost at most `θ + δ`. Otherwise it may report infeasibility.
///
/// Budgets are quantized to a grid `g = δ/k` with `⌈u/g⌉` levels. `reach[l][c]`
/// is the furthest boundary coverable by `l` segments with `c` grid units in
/// total; each transition spends some units on one segment and finds its end
/// by binary search. Rounding every segment of an optimal solution up to the
/// grid costs at most `k·g = δ`, so that solution fits whenever `θ + δ <= u`.
pub fn oracle<P: Penalty + ?Sized>(p: &P, k: usize, delta: f64, u: f64) -> Result<OracleResult> {
    if k == 0 {
        return Err(SegError::param("k must be at least 1"));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(SegError::param(format!("delta must be positive and finite, got {delta}")));
    }
    if !(u >= delta && u.is_finite()) {
        return Err(SegError::param(format!("u must be finite and at least delta, got u={u}, delta={delta}")));
    }
    let m = p.num_points();
    let grid = delta / k as f64;
    let levels = (u / grid).ceil();
    if !levels.is_finite() || levels > 1e7 {
        return Err(SegError::param(format!("u/delta ratio too large ({levels} budget levels)")));
    }
    let levels = levels as usize;
    let width = levels + 1;

    // reach[l * width + c], split[l * width + c] = units left for the first l-1 segments.
    let mut reach = vec![0usize; (k + 1) * width];
    let mut split = vec![0usize; (k + 1) * width];
    for l in 1..=k {
        let (done, rest) = reach.split_at_mut(l * width);
        let prev = &done[(l - 1) * width..];
        let cur = &mut rest[..width];
        let choice = &mut split[l * width..(l + 1) * width];
        for c in 0..=levels {
            let (mut best, mut arg) = (0, 0);
            for spent in 0..=c {
                let from = prev[spent];
                let to = if from == m {
                    m
                } else {
                    let budget = (c - spent) as f64 * grid * (1.0 + GRID_SLACK);
                    furthest(p, from, budget)
                };
                if to > best || spent == 0 {
                    best = to;
                    arg = spent;
                }
                if best == m {
                    break;
                }
            }
            cur[c] = best;
            choice[c] = arg;
        }
    }

    let last = &reach[k * width..];
    let Some(mut c) = last.iter().position(|&r| r == m) else {
        return Ok(OracleResult::infeasible());
    };
    let mut boundaries = vec![0; k + 1];
    for l in (1..=k).rev() {
        boundaries[l] = reach[l * width + c];
        c = split[l * width + c];
    }
    let seg = Segmentation::from_sorted(boundaries);
    let cost = seg.sum_cost(p);
    Ok(OracleResult {
        feasible: true,
        segmentation: Some(seg),
        cost: Some(cost),
    })
}

/// Finds `η` with `η <= θ <= 2η`, given a lower bound `0 < α <= θ`.
///
/// Returns `η` and the number of times it was raised by a factor 1.5.
pub fn estimate<P: Penalty + ?Sized>(p: &P, k: usize, alpha: f64) -> Result<(f64, usize)> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(SegError::param(format!("alpha must be positive and finite, got {alpha}")));
    }
    let mut eta = alpha;
    for iterations in 0..MAX_ESTIMATE_ITERATIONS {
        let tau = oracle(p, k, eta / 2.0, 2.0 * eta)?.cost.unwrap_or(f64::INFINITY);
        if tau <= 2.0 * eta {
            return Ok((eta, iterations));
        }
        eta *= 1.5;
    }
    Err(SegError::Infeasible(format!(
        "estimate did not converge from alpha={alpha} within {MAX_ESTIMATE_ITERATIONS} passes"
    )))
}

/// (1+ε)-approximate `k`-segmentation of the whole series.
pub fn solve_approx<P: Penalty + ?Sized>(p: &P, k: usize, epsilon: f64) -> Result<ApproxOutcome> {
    solve_approx_with(p, k, epsilon, SeedStrategy::default())
}

pub fn solve_approx_with<P: Penalty + ?Sized>(
    p: &P,
    k: usize,
    epsilon: f64,
    seed: SeedStrategy,
) -> Result<ApproxOutcome> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(SegError::param(format!("epsilon must be positive and finite, got {epsilon}")));
    }
    let delta = ms_fast(p, k)?.value;
    if delta == 0.0 {
        // Zero max-cost means zero sum-cost.
        let seg = reconstruct_maxseg(p, k, 0.0)?;
        return Ok(ApproxOutcome {
            segmentation: seg,
            cost: 0.0,
            eta: 0.0,
            alpha: 0.0,
            estimate_iterations: 0,
        });
    }
    let alpha = match seed {
        SeedStrategy::MaxValue => delta,
        SeedStrategy::SumOverK => reconstruct_maxseg(p, k, delta)?.sum_cost(p) / k as f64,
    };
    let (eta, estimate_iterations) = estimate(p, k, alpha)?;
    let result = oracle(p, k, epsilon * eta, (2.0 + epsilon) * eta)?;
    match (result.segmentation, result.cost) {
        (Some(segmentation), Some(cost)) => Ok(ApproxOutcome {
            segmentation,
            cost,
            eta,
            alpha,
            estimate_iterations,
        }),
        _ => Err(SegError::Infeasible(format!(
            "oracle found no segmentation within (2+ε)η for η={eta}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_dp::solve_exact;
    use crate::penalty::{PenaltySource, Series};
    use proptest::prelude::*;

    fn l2(v: &[f64]) -> PenaltySource {
        PenaltySource::build_l2(&Series::new(v.to_vec()).unwrap())
    }

    #[test]
    fn oracle_examples() {
        let p = l2(&[1.0, 2.0, 3.0, 4.0]);
        let r = oracle(&p, 2, 0.5, 1.5).unwrap();
        assert!(r.feasible);
        let cost = r.cost.unwrap();
        assert!(cost <= 1.5);
        assert_eq!(r.segmentation.unwrap().sum_cost(&p), cost);

        let flat = l2(&[2.5; 6]);
        for (k, d) in [(1, 0.1), (3, 1.0), (6, 1e-6)] {
            let r = oracle(&flat, k, d, d).unwrap();
            assert!(r.feasible);
            assert_eq!(r.cost, Some(0.0));
        }

        let r = oracle(&p, 2, 0.01, 0.02).unwrap();
        if let (Some(seg), Some(cost)) = (r.segmentation, r.cost) {
            assert_eq!(seg.sum_cost(&p), cost);
        }
    }

    #[test]
    fn oracle_rejects_bad_parameters() {
        let p = l2(&[1.0, 2.0]);
        assert!(oracle(&p, 1, 0.0, 1.0).is_err());
        assert!(oracle(&p, 1, -1.0, 1.0).is_err());
        assert!(oracle(&p, 1, 1.0, 0.5).is_err());
        assert!(oracle(&p, 0, 1.0, 1.0).is_err());
        assert!(estimate(&p, 1, 0.0).is_err());
        assert!(solve_approx(&p, 1, 0.0).is_err());
    }

    #[test]
    fn estimate_examples() {
        let p = l2(&[1.0, 2.0, 3.0, 4.0]);
        let (eta, _) = estimate(&p, 2, 0.5).unwrap();
        assert!((0.5..=1.0).contains(&eta));
        assert!(1.0 <= 2.0 * eta);
        // α = θ is accepted immediately.
        assert_eq!(estimate(&p, 2, 1.0).unwrap(), (1.0, 0));
    }

    #[test]
    fn solve_examples() {
        let p = l2(&[1.0, 2.0, 3.0, 4.0]);
        let out = solve_approx(&p, 2, 0.1).unwrap();
        assert!((1.0..=1.1).contains(&out.cost));
        assert!(out.alpha <= out.eta);

        let step = l2(&[0.0, 0.0, 0.0, 9.0, 9.0, 9.0]);
        for eps in [0.01, 0.5, 3.0] {
            let out = solve_approx(&step, 2, eps).unwrap();
            assert_eq!(out.cost, 0.0);
            assert_eq!(out.segmentation.boundaries(), &[0, 3, 6]);
        }
    }

    #[test]
    fn sum_seed_also_brackets() {
        let p = l2(&[0.3, 1.9, -0.4, 2.2, 5.1, 4.7, 0.0, -3.0]);
        let (_, theta) = solve_exact(&p, 3).unwrap();
        let out = solve_approx_with(&p, 3, 0.1, SeedStrategy::SumOverK).unwrap();
        assert!(out.alpha <= theta);
        assert!(out.cost <= 1.1 * theta + 1e-12);
    }

    fn log15_ceil(k: usize) -> usize {
        ((k as f64).ln() / 1.5f64.ln()).ceil() as usize
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn iterations_bounded_with_bracket(
            x in prop::collection::vec(-10.0f64..10.0, 2..=40),
            k in 1usize..=5,
            eps in prop::sample::select(vec![0.05, 0.3, 1.0]),
        ) {
            let p = l2(&x);
            let (_, theta) = solve_exact(&p, k).unwrap();
            let out = solve_approx(&p, k, eps).unwrap();
            prop_assert!(out.cost <= (1.0 + eps) * theta + 1e-9 * theta.max(1.0));
            if theta > 0.0 {
                prop_assert!(out.eta <= theta * (1.0 + 1e-9));
                prop_assert!(theta <= 2.0 * out.eta * (1.0 + 1e-9));
                prop_assert!(out.estimate_iterations <= log15_ceil(k) + 1);
            }
        }
    }
}
