/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef ARRAYCODE_H
#define ARRAYCODE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define AC_FAMILY_EVENODD 0

#define AC_FAMILY_EXTENDED_EVENODD 1

#define AC_FAMILY_RDP 2

#define AC_FAMILY_XCODE 3

#define AC_FAMILY_STAR 4

typedef enum AcStatus {
  AC_OK = 0,
  AC_NULL_POINTER = 1,
  AC_INVALID_ARGUMENT = 2,
  AC_UNRECOVERABLE = 3,
  AC_BUFFER_TOO_SMALL = 4,
  AC_VERIFY_FAILED = 5,
  AC_PANIC = 6,
} AcStatus;

/**
 * Opaque cluster handle.
 */
typedef struct AcCluster AcCluster;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until the
 * next call into this library on the same thread.
 */
const char *ac_last_error(void);

/**
 * Encode `len` bytes of `data` (zero padded; `data` may be NULL when `len`
 * is 0) into a new cluster. `r` is read only for the extended family.
 *
 * # Safety
 * `data` must point to `len` readable bytes and `out` to writable storage.
 */
enum AcStatus ac_cluster_new(uint32_t family,
                             uint32_t p,
                             uint32_t r,
                             uint32_t block_size,
                             const uint8_t *data,
                             size_t len,
                             struct AcCluster **out);

/**
 * Release a cluster. NULL is ignored.
 *
 * # Safety
 * `cluster` must come from [`ac_cluster_new`] and not be used afterwards.
 */
void ac_cluster_free(struct AcCluster *cluster);

/**
 * Number of nodes (columns), or 0 for NULL.
 *
 * # Safety
 * `cluster` must be NULL or a live handle.
 */
size_t ac_cluster_node_count(const struct AcCluster *cluster);

/**
 * Mark `n` nodes (1-based ids) as failed.
 *
 * # Safety
 * `ids` must point to `n` readable values.
 */
enum AcStatus ac_cluster_fail(struct AcCluster *cluster, const uint32_t *ids, size_t n);

/**
 * Rebuild failed node `target`. `naive` non-zero downloads whole columns.
 * Blocks transferred go to `blocks_out` when it is not NULL. Returns
 * `AC_VERIFY_FAILED` if the rebuilt column differs from the original.
 *
 * # Safety
 * `cluster` must be a live handle; `blocks_out` NULL or writable.
 */
enum AcStatus ac_cluster_repair(struct AcCluster *cluster,
                                uint32_t target,
                                int32_t naive,
                                uint64_t *blocks_out);

/**
 * Copy the column of live node `id` into `buf`. `written` receives the
 * column size in bytes, also when `cap` is too small.
 *
 * # Safety
 * `buf` must have `cap` writable bytes; `written` must be writable.
 */
enum AcStatus ac_cluster_read_node(const struct AcCluster *cluster,
                                   uint32_t id,
                                   uint8_t *buf,
                                   size_t cap,
                                   size_t *written);

/**
 * EVENODD single-erasure bandwidth for `x` horizontal groups, or 0 when
 * `p` is not an odd prime or `x >= p`.
 */
uint64_t ac_evenodd_gamma(uint32_t p, uint32_t x);

/**
 * Repair plan for failed columns `fail[0..n]` (rebuilding `fail[0]`) as a
 * JSON string. Free it with [`ac_string_free`].
 *
 * # Safety
 * `fail` must point to `n` readable values; `out` must be writable.
 */
enum AcStatus ac_plan_json(uint32_t family,
                           uint32_t p,
                           uint32_t r,
                           const uint32_t *fail,
                           size_t n,
                           char **out);

/**
 * Release a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void ac_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ARRAYCODE_H */
