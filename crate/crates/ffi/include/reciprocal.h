#ifndef RECIPROCAL_H
#define RECIPROCAL_H

#pragma once

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes. Zero is success; a completed check that fails is reported
 * through its `pass` output, not through the status.
 */
typedef enum {
  RC_STATUS_OK = 0,
  RC_STATUS_NULL_POINTER = 1,
  RC_STATUS_INVALID_UTF8 = 2,
  RC_STATUS_PARSE = 3,
  RC_STATUS_INVALID_PARAMS = 4,
  RC_STATUS_UNKNOWN_ENTRY = 5,
  RC_STATUS_DOMAIN = 6,
  RC_STATUS_NUMERIC = 7,
  RC_STATUS_INPUT = 8,
  RC_STATUS_SYMBOLIC = 9,
  RC_STATUS_PANIC = 10,
} RcStatus;

/**
 * A canonical rational expression.
 */
typedef struct RcExpr RcExpr;

/**
 * A generator with five field slots and the action on `dx, dy`.
 */
typedef struct RcGenerator RcGenerator;

/**
 * A reciprocal map.
 */
typedef struct RcMap RcMap;

/**
 * Field values of a solution on a rectangular grid.
 */
typedef struct RcSolution RcSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *rc_last_error(void);

/**
 * Version of the library as a static string.
 */
const char *rc_version(void);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void rc_string_free(char *s);

/**
 * # Safety
 * `src` must be a NUL-terminated string and `out` writable.
 */
RcStatus rc_expr_parse(const char *src, RcExpr **out);

/**
 * Canonical text of an expression.
 *
 * # Safety
 * `e` must be a live handle and `out` writable.
 */
RcStatus rc_expr_to_string(const RcExpr *e, char **out);

/**
 * Partial derivative with respect to a variable.
 *
 * # Safety
 * `e` must be a live handle, `var` NUL-terminated and `out` writable.
 */
RcStatus rc_expr_diff(const RcExpr *e, const char *var, RcExpr **out);

/**
 * Writes 1 when the two expressions are equal as rational functions.
 *
 * # Safety
 * Both handles must be live and `out` writable.
 */
RcStatus rc_expr_equal(const RcExpr *a, const RcExpr *b, int *out);

/**
 * # Safety
 * `e` must come from this library or be null.
 */
void rc_expr_free(RcExpr *e);

/**
 * A catalog map. `params_json` is an object of expression strings or null.
 *
 * # Safety
 * `name` must be NUL-terminated, `params_json` NUL-terminated or null, `out` writable.
 */
RcStatus rc_map_catalog(const char *name, const char *params_json, RcMap **out);

/**
 * A map from the JSON map layout (`R, U, V, P, H, form, params`).
 *
 * # Safety
 * `json` must be NUL-terminated and `out` writable.
 */
RcStatus rc_map_from_json(const char *json, RcMap **out);

/**
 * Symbolic reciprocity check; writes the verdict and, if `report` is not null, the JSON report.
 *
 * # Safety
 * `m` must be a live handle, `pass` writable, `report` writable or null.
 */
RcStatus rc_map_verify(const RcMap *m, uint64_t seed, int *pass, char **report);

/**
 * # Safety
 * `m` must come from this library or be null.
 */
void rc_map_free(RcMap *m);

/**
 * One of `X1`..`X5`, `Y`, `X_h`, `X_F`.
 *
 * # Safety
 * `name` must be NUL-terminated and `out` writable.
 */
RcStatus rc_generator_named(const char *name, RcGenerator **out);

/**
 * A generator from the JSON layout (`zeta_rho .. zeta_S, form`).
 *
 * # Safety
 * `json` must be NUL-terminated and `out` writable.
 */
RcStatus rc_generator_from_json(const char *json, RcGenerator **out);

/**
 * Determining equations of the generator.
 *
 * # Safety
 * `g` must be a live handle, `pass` writable, `report` writable or null.
 */
RcStatus rc_generator_verify(const RcGenerator *g, int *pass, char **report);

/**
 * # Safety
 * `g` must come from this library or be null.
 */
void rc_generator_free(RcGenerator *g);

/**
 * Samples `constant`, `shear` or `vortex` on `[x0, x1] x [y0, y1]` with `n * n` nodes.
 *
 * # Safety
 * `family` must be NUL-terminated, `params_json` NUL-terminated or null, `out` writable.
 */
RcStatus rc_solution_make(const char *family,
                          const char *params_json,
                          double x0,
                          double x1,
                          double y0,
                          double y1,
                          size_t n,
                          RcSolution **out);

/**
 * The solution mapped by `m` and resampled on a primed grid.
 *
 * # Safety
 * `s`, `m` must be live handles and `out` writable.
 */
RcStatus rc_solution_transform(const RcSolution *s, const RcMap *m, RcSolution **out);

/**
 * Grid origin, spacings and node counts.
 *
 * # Safety
 * `s` must be a live handle; every output pointer writable.
 */
RcStatus rc_solution_grid(const RcSolution *s,
                          double (*origin)[2],
                          double (*spacing)[2],
                          size_t (*nodes)[2]);

/**
 * Copies field `k` (0 = rho, 1 = u, 2 = v, 3 = p, 4 = S) into `buf`, indexed `i + nx * j`.
 *
 * # Safety
 * `s` must be a live handle and `buf` hold `len` doubles.
 */
RcStatus rc_solution_field(const RcSolution *s, size_t k, double *buf, size_t len);

/**
 * Max-norm central-difference residuals of the four equations.
 *
 * # Safety
 * `s` must be a live handle and `out` writable.
 */
RcStatus rc_solution_fd_residuals(const RcSolution *s, double (*out)[4]);

/**
 * `|oint dx'| + |oint dy'|` around the unit square at `(x0, y0)`.
 *
 * # Safety
 * `s`, `m` must be live handles and `out` writable.
 */
RcStatus rc_loop_closedness(const RcSolution *s, const RcMap *m, double x0, double y0, double *out);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void rc_solution_free(RcSolution *s);

/**
 * Runs one reference criterion (1..10) with default tolerances.
 *
 * # Safety
 * `pass` must be writable and `report` writable or null.
 */
RcStatus rc_criterion_run(uint32_t id, uint64_t seed, int *pass, char **report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RECIPROCAL_H */
