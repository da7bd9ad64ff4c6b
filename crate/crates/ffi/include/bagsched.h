#ifndef BAGSCHED_H
#define BAGSCHED_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BagschedObjective {
  BAGSCHED_OBJECTIVE_MAKESPAN = 0,
  BAGSCHED_OBJECTIVE_SANTA_CLAUS = 1,
} BagschedObjective;

typedef enum BagschedStatus {
  BAGSCHED_STATUS_OK = 0,
  BAGSCHED_STATUS_NULL_POINTER = 1,
  BAGSCHED_STATUS_VALIDATION = 2,
  BAGSCHED_STATUS_CAPACITY = 3,
  BAGSCHED_STATUS_DOMAIN = 4,
  BAGSCHED_STATUS_INTERNAL = 5,
  BAGSCHED_STATUS_PANIC = 6,
} BagschedStatus;

/**
 * Opaque instance handle.
 */
typedef struct BagschedInstance BagschedInstance;

/**
 * Opaque solve result: a bagging and its exact expected value.
 */
typedef struct BagschedResult BagschedResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *bagsched_last_error(void);

/**
 * Builds an instance from `n` processing times and `m` machine weights.
 *
 * # Safety
 * The arrays must hold `n` and `m` values; `out` must be writable.
 */
enum BagschedStatus bagsched_instance_new(const uint64_t *processing_times,
                                          size_t n,
                                          const uint64_t *machine_weights,
                                          size_t m,
                                          struct BagschedInstance **out);

/**
 * Parses the JSON instance format used by the CLI.
 *
 * # Safety
 * `json` must be a nul-terminated string; `out` must be writable.
 */
enum BagschedStatus bagsched_instance_from_json(const char *json, struct BagschedInstance **out);

/**
 * # Safety
 * `instance` must come from this library and not be freed twice; null is ignored.
 */
void bagsched_instance_free(struct BagschedInstance *instance);

/**
 * Runs the approximation scheme for `objective` with ε = 1/`epsilon_inverse`.
 *
 * # Safety
 * `instance` must be a live handle; `out` must be writable.
 */
enum BagschedStatus bagsched_solve(const struct BagschedInstance *instance,
                                   enum BagschedObjective objective,
                                   uint32_t epsilon_inverse,
                                   struct BagschedResult **out);

/**
 * Exact optimum by enumeration; small instances only.
 *
 * # Safety
 * `instance` must be a live handle; `out` must be writable.
 */
enum BagschedStatus bagsched_oracle(const struct BagschedInstance *instance,
                                    enum BagschedObjective objective,
                                    struct BagschedResult **out);

/**
 * Number of nonempty bags; 0 for a null handle.
 *
 * # Safety
 * `result` must be a live handle or null.
 */
size_t bagsched_result_bag_count(const struct BagschedResult *result);

/**
 * Writes the bag index of every job into `bag_of_job[0..len]`; `len` must equal the job count.
 *
 * # Safety
 * `result` must be a live handle; `bag_of_job` must hold `len` writable slots.
 */
enum BagschedStatus bagsched_result_assignment(const struct BagschedResult *result,
                                               size_t *bag_of_job,
                                               size_t len);

/**
 * Expected objective value as a double (rounded).
 *
 * # Safety
 * `result` must be a live handle or null (NaN).
 */
double bagsched_result_value(const struct BagschedResult *result);

/**
 * Exact expected value as "num/den"; valid while the result lives.
 *
 * # Safety
 * `result` must be a live handle or null (returns null).
 */
const char *bagsched_result_value_exact(const struct BagschedResult *result);

/**
 * # Safety
 * `result` must come from this library and not be freed twice; null is ignored.
 */
void bagsched_result_free(struct BagschedResult *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BAGSCHED_H */
