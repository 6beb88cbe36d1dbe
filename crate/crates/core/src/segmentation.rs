// SPDX-License-Identifier: MIT OR Apache-2.0

use serde::Serialize;

use crate::error::{Result, SegError};
use crate::penalty::Penalty;

/// Boundaries `b_0 = 0 <= b_1 <= ... <= b_k`; segment `j` is `(b_{j-1}, b_j]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Segmentation {
    boundaries: Vec<usize>,
}

impl Segmentation {
    pub fn new(boundaries: Vec<usize>) -> Result<Self> {
        match boundaries.first() {
            None => return Err(SegError::param("a segmentation needs at least one boundary")),
            Some(&b0) if b0 != 0 => {
                return Err(SegError::param(format!("first boundary must be 0, got {b0}")))
            }
            _ => {}
        }
        if let Some(w) = boundaries.windows(2).find(|w| w[0] > w[1]) {
            return Err(SegError::param(format!(
                "boundaries must be non-decreasing, found {} before {}",
                w[0], w[1]
            )));
        }
        Ok(Segmentation { boundaries })
    }

    pub(crate) fn from_sorted(boundaries: Vec<usize>) -> Self {
        debug_assert!(boundaries.first() == Some(&0));
        debug_assert!(boundaries.windows(2).all(|w| w[0] <= w[1]));
        Segmentation { boundaries }
    }

    pub fn boundaries(&self) -> &[usize] {
        &self.boundaries
    }

    /// Number of segments.
    pub fn k(&self) -> usize {
        self.boundaries.len() - 1
    }

    /// Last boundary: the prefix this segmentation covers.
    pub fn end(&self) -> usize {
        *self.boundaries.last().expect("at least one boundary")
    }

    pub fn segment_costs<P: Penalty + ?Sized>(&self, p: &P) -> Vec<f64> {
        self.boundaries.windows(2).map(|w| p.cost(w[0], w[1])).collect()
    }

    /// Sum of segment penalties, accumulated left to right.
    pub fn sum_cost<P: Penalty + ?Sized>(&self, p: &P) -> f64 {
        self.boundaries.windows(2).fold(0.0, |acc, w| acc + p.cost(w[0], w[1]))
    }

    /// Largest segment penalty (0 for a zero-segment segmentation).
    pub fn max_cost<P: Penalty + ?Sized>(&self, p: &P) -> f64 {
        self.boundaries.windows(2).map(|w| p.cost(w[0], w[1])).fold(0.0, f64::max)
    }

    pub fn into_boundaries(self) -> Vec<usize> {
        self.boundaries
    }
}

/// Costs indexed by prefix boundary `i in 0..=m` and level `l in 1..=k`,
/// optionally with the start of an optimal last segment for each cell.
///
/// Stored level-major, so one level's column over all prefixes is contiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct CostTable {
    m: usize,
    k: usize,
    values: Vec<f64>,
    back: Option<Vec<usize>>,
}

/// Table produced by the cumulative solvers.
pub type CumulativeTable = CostTable;

impl CostTable {
    pub(crate) fn new(m: usize, k: usize, with_back: bool) -> Self {
        let cells = (m + 1) * k;
        CostTable {
            m,
            k,
            values: vec![0.0; cells],
            back: with_back.then(|| vec![0; cells]),
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn has_backpointers(&self) -> bool {
        self.back.is_some()
    }

    #[inline]
    fn index(&self, i: usize, level: usize) -> usize {
        debug_assert!(i <= self.m && (1..=self.k).contains(&level));
        (level - 1) * (self.m + 1) + i
    }

    /// Cost at prefix `i`, level `level` (1-based). Panics when out of range.
    #[inline]
    pub fn get(&self, i: usize, level: usize) -> f64 {
        self.values[self.index(i, level)]
    }

    pub fn try_get(&self, i: usize, level: usize) -> Result<f64> {
        self.check(i, level)?;
        Ok(self.get(i, level))
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, level: usize, value: f64) {
        let idx = self.index(i, level);
        self.values[idx] = value;
    }

    #[inline]
    pub(crate) fn set_back(&mut self, i: usize, level: usize, start: usize) {
        let idx = self.index(i, level);
        if let Some(back) = self.back.as_mut() {
            back[idx] = start;
        }
    }

    /// Costs of every prefix `0..=m` at one level.
    pub fn level(&self, level: usize) -> &[f64] {
        let start = self.index(0, level);
        &self.values[start..start + self.m + 1]
    }

    /// Costs at prefix `i` for levels `1..=k`.
    pub fn row(&self, i: usize) -> Vec<f64> {
        (1..=self.k).map(|l| self.get(i, l)).collect()
    }

    fn check(&self, i: usize, level: usize) -> Result<()> {
        if i > self.m || level == 0 || level > self.k {
            return Err(SegError::param(format!(
                "cell (i={i}, level={level}) outside table of m={}, k={}",
                self.m, self.k
            )));
        }
        Ok(())
    }

    /// Walks backpointers from `(i, level)` to an explicit segmentation.
    pub fn reconstruct(&self, i: usize, level: usize) -> Result<Segmentation> {
        let back = self
            .back
            .as_ref()
            .ok_or(SegError::Unsupported("table has no backpointers"))?;
        self.check(i, level)?;
        let mut boundaries = vec![0; level + 1];
        let mut end = i;
        for l in (1..=level).rev() {
            boundaries[l] = end;
            end = back[self.index(end, l)];
        }
        debug_assert_eq!(end, 0);
        Ok(Segmentation::from_sorted(boundaries))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::penalty::{PenaltySource, Series};

    #[test]
    fn validates_boundaries() {
        assert!(Segmentation::new(vec![0, 2, 2, 5]).is_ok());
        assert!(Segmentation::new(vec![]).is_err());
        assert!(Segmentation::new(vec![1, 2]).is_err());
        assert!(Segmentation::new(vec![0, 3, 2]).is_err());
    }

    #[test]
    fn aggregates() {
        let p = PenaltySource::build_l2(&Series::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap());
        let s = Segmentation::new(vec![0, 1, 4]).unwrap();
        assert_eq!(s.k(), 2);
        assert_eq!(s.end(), 4);
        assert_eq!(s.segment_costs(&p), vec![0.0, 2.0]);
        assert_eq!(s.sum_cost(&p), 2.0);
        assert_eq!(s.max_cost(&p), 2.0);
    }

    #[test]
    fn reconstruct_without_backpointers_is_unsupported() {
        let t = CostTable::new(3, 2, false);
        assert!(matches!(t.reconstruct(3, 2), Err(SegError::Unsupported(_))));
    }

    #[test]
    fn out_of_range_cells() {
        let t = CostTable::new(3, 2, true);
        assert!(t.try_get(4, 1).is_err());
        assert!(t.try_get(0, 0).is_err());
        assert!(t.try_get(0, 3).is_err());
        assert!(t.reconstruct(3, 3).is_err());
        assert_eq!(t.try_get(3, 2).unwrap(), 0.0);
    }
}
