// SPDX-License-Identifier: MIT OR Apache-2.0

//! Segment penalties with constant-time evaluation.
//!
//! Boundaries are integers `0..=m` for a series of `m` points. The segment
//! `(a, b]` covers the points `x[a + 1] ..= x[b]` (1-based), i.e. the slice
//! `points[a..b]`. Every penalty is zero on empty segments, non-negative, and
//! monotone under nesting: `a1 <= a2 <= b2 <= b1` implies
//! `p(a2, b2) <= p(a1, b1)`. The solvers rely on nothing else.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Result, SegError};

/// A validated, non-empty sequence of finite values.
#[derive(Debug, Clone, PartialEq)]
pub struct Series(Vec<f64>);

impl Series {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(SegError::EmptySeries);
        }
        if let Some((index, &value)) = points.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(SegError::NonFinite { index, value });
        }
        Ok(Series(points))
    }

    pub fn points(&self) -> &[f64] {
        &self.0
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Multiplies every point by `factor`, failing if the result overflows.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Series::new(self.0.iter().map(|x| x * factor).collect())
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// A segment cost over a fixed sequence.
pub trait Penalty {
    /// Number of points `m`; valid boundaries are `0..=m`.
    fn num_points(&self) -> usize;

    /// Cost of segment `(a, b]`. Callers guarantee `a <= b <= m`.
    fn cost(&self, a: usize, b: usize) -> f64;

    /// Checked variant of [`Penalty::cost`].
    fn eval(&self, a: usize, b: usize) -> Result<f64> {
        let m = self.num_points();
        if a > b || b > m {
            return Err(SegError::InvalidRange { a, b, m });
        }
        Ok(self.cost(a, b))
    }
}

impl<P: Penalty + ?Sized> Penalty for &P {
    fn num_points(&self) -> usize {
        (**self).num_points()
    }

    fn cost(&self, a: usize, b: usize) -> f64 {
        (**self).cost(a, b)
    }
}

/// Largest `b` in `[a, m]` with `p(a, b) <= budget`.
///
/// `p(a, ·)` is non-decreasing, so this is a binary search. Returns `a` when
/// even the shortest non-empty segment exceeds the budget.
pub fn furthest<P: Penalty + ?Sized>(p: &P, a: usize, budget: f64) -> usize {
    let (mut lo, mut hi) = (a, p.num_points());
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        if p.cost(a, mid) <= budget {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    lo
}

/// Sum of squared deviations from the segment mean, via prefix sums.
#[derive(Debug, Clone)]
pub struct L2Penalty {
    prefix: Vec<f64>,
    prefix_sq: Vec<f64>,
}

impl L2Penalty {
    pub fn new(series: &Series) -> Self {
        let points = series.points();
        // Shifting leaves every segment cost unchanged and limits cancellation
        // for series with a large offset.
        let shift = points[0];
        let mut prefix = Vec::with_capacity(points.len() + 1);
        let mut prefix_sq = Vec::with_capacity(points.len() + 1);
        let (mut s, mut sq) = (0.0, 0.0);
        prefix.push(s);
        prefix_sq.push(sq);
        for &x in points {
            let y = x - shift;
            s += y;
            sq += y * y;
            prefix.push(s);
            prefix_sq.push(sq);
        }
        L2Penalty { prefix, prefix_sq }
    }
}

impl Penalty for L2Penalty {
    fn num_points(&self) -> usize {
        self.prefix.len() - 1
    }

    #[inline]
    fn cost(&self, a: usize, b: usize) -> f64 {
        debug_assert!(a <= b && b < self.prefix.len());
        if b - a <= 1 {
            return 0.0;
        }
        let n = (b - a) as f64;
        let s = self.prefix[b] - self.prefix[a];
        let sq = self.prefix_sq[b] - self.prefix_sq[a];
        (sq - s * s / n).max(0.0)
    }
}

/// Idempotent range query table for `max` or `min`.
#[derive(Debug, Clone)]
struct SparseTable {
    levels: Vec<Vec<f64>>,
    op: fn(f64, f64) -> f64,
}

impl SparseTable {
    fn new(points: &[f64], op: fn(f64, f64) -> f64) -> Self {
        let mut levels = vec![points.to_vec()];
        let mut width = 1;
        while 2 * width <= points.len() {
            let prev = levels.last().expect("level 0 exists");
            let next = (0..=points.len() - 2 * width)
                .map(|i| op(prev[i], prev[i + width]))
                .collect();
            levels.push(next);
            width *= 2;
        }
        SparseTable { levels, op }
    }

    /// Aggregate over `points[lo..hi]`, `lo < hi`.
    #[inline]
    fn query(&self, lo: usize, hi: usize) -> f64 {
        let level = (hi - lo).ilog2() as usize;
        let row = &self.levels[level];
        (self.op)(row[lo], row[hi - (1 << level)])
    }
}

/// Half the spread of a segment: the optimal L∞ error of a constant fit.
#[derive(Debug, Clone)]
pub struct RangePenalty {
    max: SparseTable,
    min: SparseTable,
}

impl RangePenalty {
    pub fn new(series: &Series) -> Self {
        RangePenalty {
            max: SparseTable::new(series.points(), f64::max),
            min: SparseTable::new(series.points(), f64::min),
        }
    }
}

impl Penalty for RangePenalty {
    fn num_points(&self) -> usize {
        self.max.levels[0].len()
    }

    #[inline]
    fn cost(&self, a: usize, b: usize) -> f64 {
        debug_assert!(a <= b && b <= self.num_points());
        if b - a <= 1 {
            return 0.0;
        }
        ((self.max.query(a, b) - self.min.query(a, b)) / 2.0).max(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PenaltyKind {
    L2,
    Range,
}

impl fmt::Display for PenaltyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PenaltyKind::L2 => "l2",
            PenaltyKind::Range => "range",
        })
    }
}

/// One of the built-in penalties, chosen at run time.
#[derive(Debug, Clone)]
pub enum PenaltySource {
    L2(L2Penalty),
    Range(RangePenalty),
}

impl PenaltySource {
    pub fn build(kind: PenaltyKind, series: &Series) -> Self {
        match kind {
            PenaltyKind::L2 => Self::build_l2(series),
            PenaltyKind::Range => Self::build_range(series),
        }
    }

    pub fn build_l2(series: &Series) -> Self {
        PenaltySource::L2(L2Penalty::new(series))
    }

    pub fn build_range(series: &Series) -> Self {
        PenaltySource::Range(RangePenalty::new(series))
    }

    /// Validates raw values and builds the requested penalty.
    pub fn from_values(kind: PenaltyKind, values: &[f64]) -> Result<Self> {
        Ok(Self::build(kind, &Series::new(values.to_vec())?))
    }

    pub fn kind(&self) -> PenaltyKind {
        match self {
            PenaltySource::L2(_) => PenaltyKind::L2,
            PenaltySource::Range(_) => PenaltyKind::Range,
        }
    }
}

impl Penalty for PenaltySource {
    fn num_points(&self) -> usize {
        match self {
            PenaltySource::L2(p) => p.num_points(),
            PenaltySource::Range(p) => p.num_points(),
        }
    }

    #[inline]
    fn cost(&self, a: usize, b: usize) -> f64 {
        match self {
            PenaltySource::L2(p) => p.cost(a, b),
            PenaltySource::Range(p) => p.cost(a, b),
        }
    }
}

/// Wraps a penalty and counts evaluations.
#[derive(Debug)]
pub struct Counted<P> {
    inner: P,
    evals: AtomicU64,
}

impl<P: Penalty> Counted<P> {
    pub fn new(inner: P) -> Self {
        Counted {
            inner,
            evals: AtomicU64::new(0),
        }
    }

    pub fn evals(&self) -> u64 {
        self.evals.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.evals.store(0, Ordering::Relaxed);
    }

    pub fn inner(&self) -> &P {
        &self.inner
    }
}

impl<P: Penalty> Penalty for Counted<P> {
    fn num_points(&self) -> usize {
        self.inner.num_points()
    }

    #[inline]
    fn cost(&self, a: usize, b: usize) -> f64 {
        self.evals.fetch_add(1, Ordering::Relaxed);
        self.inner.cost(a, b)
    }
}
