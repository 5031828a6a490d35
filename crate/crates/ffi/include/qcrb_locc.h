#ifndef QCRB_LOCC_H
#define QCRB_LOCC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QcrbStatus {
  QcrbStatus_Ok = 0,
  QcrbStatus_NullPointer = 1,
  QcrbStatus_InvalidArgument = 2,
  QcrbStatus_NonConvergence = 3,
  QcrbStatus_Panic = 4,
} QcrbStatus;

/**
 * A named state family with its theta grid.
 */
typedef struct QcrbScenario QcrbScenario;

/**
 * An adaptive one-way LOCC measurement.
 */
typedef struct QcrbTree QcrbTree;

/**
 * Saturation check of a tree at one theta.
 */
typedef struct QcrbVerifyReport {
  double fisher_info;
  double qfi;
  double condition_residual;
  double regularity_residual;
  bool saturating;
} QcrbVerifyReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL
 * terminated, truncated to `cap`). Returns the full message length
 * without the NUL; 0 when there is no error.
 *
 * # Safety
 * `buf` must be null or valid for `cap` bytes.
 */
size_t qcrb_last_error(char *buf, size_t cap);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void qcrb_string_free(char *s);

/**
 * Looks up a built-in scenario such as `"ghz3"` or `"chain4"`.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum QcrbStatus qcrb_scenario_builtin(const char *name, struct QcrbScenario **out);

/**
 * Parses a scenario from its JSON description.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum QcrbStatus qcrb_scenario_from_json(const char *json, struct QcrbScenario **out);

/**
 * # Safety
 * `s` must be null or a handle from this library, not yet freed.
 */
void qcrb_scenario_free(struct QcrbScenario *s);

/**
 * Total Hilbert-space dimension.
 *
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum QcrbStatus qcrb_scenario_dimension(const struct QcrbScenario *s, size_t *out);

/**
 * Number of subsystems.
 *
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum QcrbStatus qcrb_scenario_subsystems(const struct QcrbScenario *s, size_t *out);

/**
 * Quantum Fisher information at `theta`.
 *
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum QcrbStatus qcrb_qfi(const struct QcrbScenario *s, double theta, double *out);

/**
 * Synthesizes a saturating tree. `order` lists 0-based subsystems; pass
 * null and 0 for the layout order.
 *
 * # Safety
 * `s` must be a live handle; `order` must be null or valid for `order_len`
 * reads; `out` must be writable.
 */
enum QcrbStatus qcrb_synthesize(const struct QcrbScenario *s,
                                double theta,
                                const size_t *order,
                                size_t order_len,
                                struct QcrbTree **out);

/**
 * # Safety
 * `t` must be null or a handle from this library, not yet freed.
 */
void qcrb_tree_free(struct QcrbTree *t);

/**
 * Number of leaves (outcomes) of a tree.
 *
 * # Safety
 * `t` must be a live handle; `out` must be writable.
 */
enum QcrbStatus qcrb_tree_outcomes(const struct QcrbTree *t, size_t *out);

/**
 * Serializes a tree; free the string with [`qcrb_string_free`].
 *
 * # Safety
 * `t` must be a live handle; `out` must be writable.
 */
enum QcrbStatus qcrb_tree_to_json(const struct QcrbTree *t, char **out);

/**
 * Parses and validates a tree.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum QcrbStatus qcrb_tree_from_json(const char *json, struct QcrbTree **out);

/**
 * Checks whether a tree saturates the scenario's bound at `theta`.
 *
 * # Safety
 * `t` and `s` must be live handles; `out` must be writable.
 */
enum QcrbStatus qcrb_verify(const struct QcrbTree *t,
                            const struct QcrbScenario *s,
                            double theta,
                            struct QcrbVerifyReport *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QCRB_LOCC_H */
