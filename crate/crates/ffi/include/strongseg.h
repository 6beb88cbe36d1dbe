/* SPDX-License-Identifier: MIT OR Apache-2.0 */

#ifndef STRONGSEG_H
#define STRONGSEG_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum SsStatus {
  SS_STATUS_OK = 0,
  SS_STATUS_NULL_POINTER = 1,
  SS_STATUS_INVALID_ARGUMENT = 2,
  SS_STATUS_NON_FINITE = 3,
  SS_STATUS_INFEASIBLE = 4,
  SS_STATUS_UNSUPPORTED = 5,
  SS_STATUS_PANIC = 6,
} SsStatus;

typedef enum SsPenaltyKind {
  SS_PENALTY_KIND_L2 = 0,
  SS_PENALTY_KIND_RANGE = 1,
} SsPenaltyKind;

/**
 * Segment penalty built over a series.
 */
typedef struct SsPenalty SsPenalty;

/**
 * Cost table over all prefixes and levels.
 */
typedef struct SsTable SsTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or null if none.
 * The pointer stays valid until the next failing call on this thread.
 */
const char *ss_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ss_version(void);

/**
 * Builds a penalty over `len` points. `values` is copied.
 *
 * # Safety
 * `values` must point to `len` readable doubles; `out` must be writable.
 */
enum SsStatus ss_penalty_new(enum SsPenaltyKind kind,
                             const double *values,
                             size_t len,
                             struct SsPenalty **out);

/**
 * # Safety
 * `p` must be null or a handle from [`ss_penalty_new`] not yet freed.
 */
void ss_penalty_free(struct SsPenalty *p);

/**
 * # Safety
 * `p` must be a live penalty handle; `out` must be writable.
 */
enum SsStatus ss_penalty_len(const struct SsPenalty *p, size_t *out);

/**
 * Cost of segment `(a, b]`, covering points `a..b` zero-based.
 *
 * # Safety
 * `p` must be a live penalty handle; `out` must be writable.
 */
enum SsStatus ss_penalty_eval(const struct SsPenalty *p, size_t a, size_t b, double *out);

/**
 * Optimal sum-cost `k`-segmentation.
 *
 * # Safety
 * `p` must be a live penalty handle; `boundaries` must hold `k + 1`
 * entries; `cost` must be writable.
 */
enum SsStatus ss_solve_exact(const struct SsPenalty *p, size_t k, size_t *boundaries, double *cost);

/**
 * Optimal min-max `k`-segmentation.
 *
 * # Safety
 * As for [`ss_solve_exact`].
 */
enum SsStatus ss_solve_maxseg(const struct SsPenalty *p,
                              size_t k,
                              size_t *boundaries,
                              double *cost);

/**
 * `(1 + epsilon)`-approximate sum-cost `k`-segmentation. `iterations` may
 * be null; otherwise it receives the number of estimation passes.
 *
 * # Safety
 * As for [`ss_solve_exact`]; `iterations` must be null or writable.
 */
enum SsStatus ss_solve_approx(const struct SsPenalty *p,
                              size_t k,
                              double epsilon,
                              size_t *boundaries,
                              double *cost,
                              size_t *iterations);

/**
 * Approximate sum-cost table for every prefix and every level up to `k`.
 *
 * # Safety
 * `p` must be a live penalty handle; `out` must be writable.
 */
enum SsStatus ss_cumulative_sum(const struct SsPenalty *p,
                                size_t k,
                                double epsilon,
                                struct SsTable **out);

/**
 * Exact min-max table for every prefix and every level up to `k`.
 *
 * # Safety
 * `p` must be a live penalty handle; `out` must be writable.
 */
enum SsStatus ss_cumulative_max(const struct SsPenalty *p, size_t k, struct SsTable **out);

/**
 * # Safety
 * `t` must be null or a table handle not yet freed.
 */
void ss_table_free(struct SsTable *t);

/**
 * Number of points `m` and levels `k` of the table.
 *
 * # Safety
 * `t` must be a live table handle; `m` and `k` must be writable.
 */
enum SsStatus ss_table_dims(const struct SsTable *t, size_t *m, size_t *k);

/**
 * Entry for prefix `i` (`0..=m`) at `level` (`1..=k`).
 *
 * # Safety
 * `t` must be a live table handle; `out` must be writable.
 */
enum SsStatus ss_table_get(const struct SsTable *t, size_t i, size_t level, double *out);

/**
 * Segmentation of prefix `i` into `level` segments attaining the table
 * entry. Min-max tables need the penalty they were built from and support
 * only `i == m`; sum tables ignore `p`, which may be null.
 *
 * # Safety
 * `t` must be a live table handle; `p` must be null or a live penalty
 * handle; `boundaries` must hold `level + 1` entries.
 */
enum SsStatus ss_table_reconstruct(const struct SsTable *t,
                                   const struct SsPenalty *p,
                                   size_t i,
                                   size_t level,
                                   size_t *boundaries);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STRONGSEG_H */
