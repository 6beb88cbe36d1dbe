// SPDX-License-Identifier: MIT OR Apache-2.0

//! k-segmentation of numeric sequences.
//!
//! Given a series of `m` points and a monotone segment penalty, partition the
//! series into `k` contiguous segments minimizing either the sum or the
//! maximum of the segment penalties. The crate provides:
//!
//! - [`exact_dp`]: the O(m²k) dynamic program, used as ground truth;
//! - [`maxseg`]: the exact min-max optimum in O(k² log² m) evaluations;
//! - [`approx`]: a (1+ε)-approximation whose cost is independent of the
//!   magnitude of the data, seeded by the min-max optimum;
//! - [`cumulative`]: all prefixes and levels at once, approximately for the
//!   sum objective and exactly for the min-max objective, in time linear in `m`;
//! - [`cli`]: ingestion, report formatting and the benchmark harness behind
//!   the `strongseg` binary.

#![allow(clippy::needless_range_loop)]

pub mod approx;
pub mod cli;
pub mod cumulative;
pub mod error;
pub mod exact_dp;
pub mod maxseg;
pub mod penalty;
pub mod segmentation;

pub use approx::{estimate, oracle, solve_approx, solve_approx_with, ApproxOutcome, OracleResult, SeedStrategy};
pub use cumulative::{all_dp, all_dp_traced, all_ms, all_ms_observed, reconstruct_cumulative, sparsify};
pub use error::{Result, SegError};
pub use exact_dp::{bellman_all, brute_force_seg, solve_exact};
pub use maxseg::{brute_force_maxseg, greedy, ms_fast, reconstruct_maxseg, solve_maxseg, MaxSegResult};
pub use penalty::{Counted, Penalty, PenaltyKind, PenaltySource, Series};
pub use segmentation::{CostTable, CumulativeTable, Segmentation};
