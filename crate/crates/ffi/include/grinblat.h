#ifndef GRINBLAT_H
#define GRINBLAT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum GrinblatStatus {
  GRINBLAT_STATUS_OK = 0,
  /**
   * The instance has no rainbow matching.
   */
  GRINBLAT_STATUS_NO_MATCHING = 1,
  /**
   * Null pointer or out-of-range argument.
   */
  GRINBLAT_STATUS_INVALID_ARGUMENT = 2,
  GRINBLAT_STATUS_PARSE = 3,
  /**
   * Kernels are below `ceil(16n/5) + c`.
   */
  GRINBLAT_STATUS_HYPOTHESIS = 4,
  /**
   * The node budget ran out before a verdict.
   */
  GRINBLAT_STATUS_BUDGET = 5,
  /**
   * A matching failed verification.
   */
  GRINBLAT_STATUS_INVALID_MATCHING = 6,
  GRINBLAT_STATUS_INTERNAL = 7,
} GrinblatStatus;

/**
 * Opaque instance handle.
 */
typedef struct GrinblatInstance GrinblatInstance;

/**
 * Opaque matching handle.
 */
typedef struct GrinblatMatching GrinblatMatching;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *grinblat_last_error(void);

/**
 * Parses the text format (`grinblat 1 <n> <ground_size>` ...).
 *
 * # Safety
 * `data` must point to `len` readable bytes; `out` must be valid for writes.
 */
enum GrinblatStatus grinblat_instance_parse(const uint8_t *data,
                                            size_t len,
                                            struct GrinblatInstance **out);

/**
 * Builds an instance from flat arrays. Relation `r` has `class_counts[r]`
 * classes; class sizes are read in order from `class_sizes` and elements in
 * order from `elements`.
 *
 * # Safety
 * `class_counts` must hold `n` values, `class_sizes` their sum, and
 * `elements` the sum of the class sizes.
 */
enum GrinblatStatus grinblat_instance_new(size_t ground_size,
                                          size_t n,
                                          const size_t *class_counts,
                                          const size_t *class_sizes,
                                          const uint32_t *elements,
                                          struct GrinblatInstance **out);

/**
 * `n` identical relations of `n - 1` triples; `n >= 2`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum GrinblatStatus grinblat_gen_lower_bound(size_t n, struct GrinblatInstance **out);

/**
 * Random instance with every kernel at least `ceil(16n/5) + c + slack`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum GrinblatStatus grinblat_gen_random(size_t n,
                                        uint64_t c,
                                        uint64_t seed,
                                        size_t slack,
                                        struct GrinblatInstance **out);

/**
 * # Safety
 * `inst` must be null or a handle from this library not yet freed.
 */
void grinblat_instance_free(struct GrinblatInstance *inst);

/**
 * Number of relations; 0 for a null handle.
 *
 * # Safety
 * `inst` must be null or a live handle.
 */
size_t grinblat_instance_len(const struct GrinblatInstance *inst);

/**
 * # Safety
 * `inst` must be null or a live handle.
 */
size_t grinblat_instance_ground_size(const struct GrinblatInstance *inst);

/**
 * Smallest kernel size; 0 for a null handle or an instance without relations.
 *
 * # Safety
 * `inst` must be null or a live handle.
 */
size_t grinblat_instance_min_kernel(const struct GrinblatInstance *inst);

/**
 * Serializes to the text format. Free the result with [`grinblat_string_free`].
 *
 * # Safety
 * `inst` must be a live handle; `out` must be valid for writes.
 */
enum GrinblatStatus grinblat_instance_write(const struct GrinblatInstance *inst, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void grinblat_string_free(char *s);

/**
 * Constructive solver. `n_min` 0 selects the default.
 *
 * # Safety
 * `inst` must be a live handle; `out` must be valid for writes.
 */
enum GrinblatStatus grinblat_solve(const struct GrinblatInstance *inst,
                                   uint64_t c,
                                   size_t n_min,
                                   uint64_t exact_budget,
                                   struct GrinblatMatching **out);

/**
 * Exact backtracking solver with a node budget.
 *
 * # Safety
 * `inst` must be a live handle; `out` must be valid for writes.
 */
enum GrinblatStatus grinblat_exact(const struct GrinblatInstance *inst,
                                   uint64_t budget,
                                   struct GrinblatMatching **out);

/**
 * Checks `pairs` (`2 * n` elements, relation by relation) against `inst`.
 *
 * # Safety
 * `inst` must be a live handle; `pairs` must hold `2 * n` values.
 */
enum GrinblatStatus grinblat_verify(const struct GrinblatInstance *inst,
                                    const uint32_t *pairs,
                                    size_t n);

/**
 * Number of pairs; 0 for a null handle.
 *
 * # Safety
 * `m` must be null or a live handle.
 */
size_t grinblat_matching_len(const struct GrinblatMatching *m);

/**
 * Copies the pairs as `a_1, b_1, a_2, b_2, ...` into `out`, which must have
 * room for `2 * grinblat_matching_len(m)` values.
 *
 * # Safety
 * `m` must be a live handle; `out` must be valid for `cap` writes.
 */
enum GrinblatStatus grinblat_matching_pairs(const struct GrinblatMatching *m,
                                            uint32_t *out,
                                            size_t cap);

/**
 * # Safety
 * `m` must be null or a handle from this library not yet freed.
 */
void grinblat_matching_free(struct GrinblatMatching *m);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GRINBLAT_H */
