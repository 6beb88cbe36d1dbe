// SPDX-License-Identifier: MIT OR Apache-2.0

//! C ABI over the `strongseg` solvers.
//!
//! Every fallible function returns an [`SsStatus`]. On failure a description
//! is available from [`ss_last_error`] on the same thread. Outputs are
//! written through caller-provided pointers and only on success. Boundary
//! buffers must hold `k + 1` entries.
//!
//! Handles are opaque. A handle created by `*_new` or a solver must be
//! released with the matching `*_free` function exactly once.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use strongseg::{
    all_dp, all_ms, reconstruct_cumulative, reconstruct_maxseg, solve_approx, solve_exact,
    solve_maxseg, CostTable, Penalty, PenaltyKind, PenaltySource, SegError, Segmentation,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NonFinite = 3,
    Infeasible = 4,
    Unsupported = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SsPenaltyKind {
    L2 = 0,
    Range = 1,
}

/// Segment penalty built over a series.
pub struct SsPenalty(PenaltySource);

/// Cost table over all prefixes and levels.
pub struct SsTable {
    table: CostTable,
    objective: Objective,
}

enum Objective {
    Sum,
    Max,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(status: SsStatus, msg: impl Into<String>) -> SsStatus {
    set_error(msg);
    status
}

fn status_of(e: &SegError) -> SsStatus {
    match e {
        SegError::EmptySeries
        | SegError::InvalidRange { .. }
        | SegError::InvalidParameter(_)
        | SegError::EnumerationBudget { .. } => SsStatus::InvalidArgument,
        SegError::NonFinite { .. } => SsStatus::NonFinite,
        SegError::Infeasible(_) => SsStatus::Infeasible,
        SegError::Unsupported(_) => SsStatus::Unsupported,
    }
}

struct Failure(SsStatus, String);

impl From<SegError> for Failure {
    fn from(e: SegError) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(SsStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SsStatus::Ok,
        Ok(Err(Failure(status, msg))) => fail(status, msg),
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(SsStatus::Panic, format!("panic: {msg}"))
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_boundaries(seg: &Segmentation, out: *mut usize) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("boundaries"));
    }
    let b = seg.boundaries();
    ptr::copy_nonoverlapping(b.as_ptr(), out, b.len());
    Ok(())
}

/// Message describing the last failure on this thread, or null if none.
/// The pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn ss_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ss_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a penalty over `len` points. `values` is copied.
///
/// # Safety
/// `values` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_penalty_new(
    kind: SsPenaltyKind,
    values: *const f64,
    len: usize,
    out: *mut *mut SsPenalty,
) -> SsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if values.is_null() && len > 0 {
            return Err(null("values"));
        }
        let slice = if len == 0 { &[][..] } else { std::slice::from_raw_parts(values, len) };
        let kind = match kind {
            SsPenaltyKind::L2 => PenaltyKind::L2,
            SsPenaltyKind::Range => PenaltyKind::Range,
        };
        let p = PenaltySource::from_values(kind, slice)?;
        out.write(Box::into_raw(Box::new(SsPenalty(p))));
        Ok(())
    })
}

/// # Safety
/// `p` must be null or a handle from [`ss_penalty_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ss_penalty_free(p: *mut SsPenalty) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `p` must be a live penalty handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_penalty_len(p: *const SsPenalty, out: *mut usize) -> SsStatus {
    guard(|| write(out, deref(p, "penalty")?.0.num_points(), "out"))
}

/// Cost of segment `(a, b]`, covering points `a..b` zero-based.
///
/// # Safety
/// `p` must be a live penalty handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_penalty_eval(
    p: *const SsPenalty,
    a: usize,
    b: usize,
    out: *mut f64,
) -> SsStatus {
    guard(|| {
        let v = deref(p, "penalty")?.0.eval(a, b)?;
        write(out, v, "out")
    })
}

/// Optimal sum-cost `k`-segmentation.
///
/// # Safety
/// `p` must be a live penalty handle; `boundaries` must hold `k + 1`
/// entries; `cost` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_solve_exact(
    p: *const SsPenalty,
    k: usize,
    boundaries: *mut usize,
    cost: *mut f64,
) -> SsStatus {
    guard(|| {
        let (seg, c) = solve_exact(&deref(p, "penalty")?.0, k)?;
        write(cost, c, "cost")?;
        write_boundaries(&seg, boundaries)
    })
}

/// Optimal min-max `k`-segmentation.
///
/// # Safety
/// As for [`ss_solve_exact`].
#[no_mangle]
pub unsafe extern "C" fn ss_solve_maxseg(
    p: *const SsPenalty,
    k: usize,
    boundaries: *mut usize,
    cost: *mut f64,
) -> SsStatus {
    guard(|| {
        let r = solve_maxseg(&deref(p, "penalty")?.0, k)?;
        write(cost, r.value, "cost")?;
        let seg = r.boundaries.ok_or_else(|| Failure(SsStatus::Infeasible, "no segmentation".into()))?;
        write_boundaries(&seg, boundaries)
    })
}

/// `(1 + epsilon)`-approximate sum-cost `k`-segmentation. `iterations` may
/// be null; otherwise it receives the number of estimation passes.
///
/// # Safety
/// As for [`ss_solve_exact`]; `iterations` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn ss_solve_approx(
    p: *const SsPenalty,
    k: usize,
    epsilon: f64,
    boundaries: *mut usize,
    cost: *mut f64,
    iterations: *mut usize,
) -> SsStatus {
    guard(|| {
        let out = solve_approx(&deref(p, "penalty")?.0, k, epsilon)?;
        write(cost, out.cost, "cost")?;
        write_boundaries(&out.segmentation, boundaries)?;
        if !iterations.is_null() {
            iterations.write(out.estimate_iterations);
        }
        Ok(())
    })
}

unsafe fn new_table(
    out: *mut *mut SsTable,
    build: impl FnOnce() -> Result<SsTable, Failure>,
) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    let table = build()?;
    out.write(Box::into_raw(Box::new(table)));
    Ok(())
}

/// Approximate sum-cost table for every prefix and every level up to `k`.
///
/// # Safety
/// `p` must be a live penalty handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_cumulative_sum(
    p: *const SsPenalty,
    k: usize,
    epsilon: f64,
    out: *mut *mut SsTable,
) -> SsStatus {
    guard(|| {
        new_table(out, || {
            Ok(SsTable {
                table: all_dp(&deref(p, "penalty")?.0, k, epsilon)?,
                objective: Objective::Sum,
            })
        })
    })
}

/// Exact min-max table for every prefix and every level up to `k`.
///
/// # Safety
/// `p` must be a live penalty handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_cumulative_max(
    p: *const SsPenalty,
    k: usize,
    out: *mut *mut SsTable,
) -> SsStatus {
    guard(|| {
        new_table(out, || {
            Ok(SsTable {
                table: all_ms(&deref(p, "penalty")?.0, k)?,
                objective: Objective::Max,
            })
        })
    })
}

/// # Safety
/// `t` must be null or a table handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ss_table_free(t: *mut SsTable) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Number of points `m` and levels `k` of the table.
///
/// # Safety
/// `t` must be a live table handle; `m` and `k` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_table_dims(t: *const SsTable, m: *mut usize, k: *mut usize) -> SsStatus {
    guard(|| {
        let t = &deref(t, "table")?.table;
        write(m, t.m(), "m")?;
        write(k, t.k(), "k")
    })
}

/// Entry for prefix `i` (`0..=m`) at `level` (`1..=k`).
///
/// # Safety
/// `t` must be a live table handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_table_get(
    t: *const SsTable,
    i: usize,
    level: usize,
    out: *mut f64,
) -> SsStatus {
    guard(|| {
        let v = deref(t, "table")?.table.try_get(i, level)?;
        write(out, v, "out")
    })
}

/// Segmentation of prefix `i` into `level` segments attaining the table
/// entry. Min-max tables need the penalty they were built from and support
/// only `i == m`; sum tables ignore `p`, which may be null.
///
/// # Safety
/// `t` must be a live table handle; `p` must be null or a live penalty
/// handle; `boundaries` must hold `level + 1` entries.
#[no_mangle]
pub unsafe extern "C" fn ss_table_reconstruct(
    t: *const SsTable,
    p: *const SsPenalty,
    i: usize,
    level: usize,
    boundaries: *mut usize,
) -> SsStatus {
    guard(|| {
        let t = deref(t, "table")?;
        let seg = match t.objective {
            Objective::Sum => reconstruct_cumulative(&t.table, i, level)?,
            Objective::Max => {
                let p = &deref(p, "penalty")?.0;
                if i != t.table.m() || p.num_points() != t.table.m() {
                    return Err(Failure(
                        SsStatus::Unsupported,
                        "min-max reconstruction needs the full prefix and its penalty".into(),
                    ));
                }
                let value = t.table.try_get(i, level)?;
                reconstruct_maxseg(p, level, value)?
            }
        };
        write_boundaries(&seg, boundaries)
    })
}
