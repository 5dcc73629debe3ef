#ifndef FPR_CONSENSUS_H
#define FPR_CONSENSUS_H

/* Generated by cbindgen from crates/ffi. Do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result code of every fallible call.
 */
typedef enum FprStatus {
  FPR_STATUS_OK = 0,
  FPR_STATUS_NULL_POINTER = 1,
  FPR_STATUS_INVALID_UTF8 = 2,
  /*
   Malformed document, out-of-range value, bad weights or parameters.
   */
  FPR_STATUS_INVALID_INPUT = 3,
  /*
   Missing cells could not be estimated.
   */
  FPR_STATUS_UNESTIMABLE = 4,
  /*
   Expert, row or column index out of range.
   */
  FPR_STATUS_OUT_OF_RANGE = 5,
  /*
   A Rust panic was caught at the boundary.
   */
  FPR_STATUS_INTERNAL = 99,
} FprStatus;

typedef enum FprTermination {
  FPR_TERMINATION_THRESHOLD_REACHED = 0,
  FPR_TERMINATION_FROZEN = 1,
  FPR_TERMINATION_TRIAL_CAP_HIT = 2,
} FprTermination;

/*
 Opaque annealing outcome.
 */
typedef struct FprOptimization FprOptimization;

/*
 Opaque expert panel, possibly incomplete.
 */
typedef struct FprPanel FprPanel;

/*
 Annealing parameters. A `temp0` of zero or less selects the adaptive start
 temperature.
 */
typedef struct FprSaConfig {
  double temp0;
  double fastfactor;
  double tempfactor;
  uint32_t frzlim;
  uint32_t sizefactor;
  double minpercent;
  double tcent;
  double move_width;
  double value_grid;
  uint64_t seed;
  uint64_t max_trials;
  bool enforce_reciprocity;
} FprSaConfig;

/*
 Panel-level metrics.
 */
typedef struct FprAnalysis {
  double global_cl;
  double cr;
  double ccl;
} FprAnalysis;

/*
 One suggested modification. Indices are zero-based.
 */
typedef struct FprSuggestion {
  size_t expert;
  size_t row;
  size_t col;
  double from;
  double to;
} FprSuggestion;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message describing the last failure on this thread, or NULL. The pointer
 stays valid until the next call into this library from the same thread.
 */
const char *fpr_last_error_message(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *fpr_version(void);

/*
 Releases a string returned by this library.

 # Safety
 `s` must be NULL or a pointer obtained from this library that has not been freed.
 */
void fpr_string_free(char *s);

/*
 Default annealing parameters.
 */
struct FprSaConfig fpr_sa_config_default(void);

/*
 Parses a JSON panel document into a new panel handle.

 # Safety
 `json` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum FprStatus fpr_panel_from_json(const char *json, struct FprPanel **out);

/*
 Releases a panel handle.

 # Safety
 `panel` must be NULL or a handle from [`fpr_panel_from_json`] not yet freed.
 */
void fpr_panel_free(struct FprPanel *panel);

/*
 Number of experts in the panel.

 # Safety
 `panel` must be a live handle and `out` a valid pointer.
 */
enum FprStatus fpr_panel_expert_count(const struct FprPanel *panel, size_t *out);

/*
 Number of alternatives in the panel.

 # Safety
 `panel` must be a live handle and `out` a valid pointer.
 */
enum FprStatus fpr_panel_alternative_count(const struct FprPanel *panel, size_t *out);

/*
 Estimates all missing cells. Idempotent.

 # Safety
 `panel` must be a live handle.
 */
enum FprStatus fpr_panel_complete(struct FprPanel *panel);

/*
 Reads one cell. Before completion, `*out_known` is false for missing cells
 and `*out_value` is left untouched; after [`fpr_panel_complete`] every cell
 is known.

 # Safety
 `panel` must be a live handle; `out_value` and `out_known` valid pointers.
 */
enum FprStatus fpr_panel_get_cell(const struct FprPanel *panel,
                                  size_t expert,
                                  size_t row,
                                  size_t col,
                                  double *out_value,
                                  bool *out_known);

/*
 Completes the panel if needed and computes CL, CR and CCL for `delta`.

 # Safety
 `panel` must be a live handle and `out` a valid pointer.
 */
enum FprStatus fpr_panel_analyze(struct FprPanel *panel, double delta, struct FprAnalysis *out);

/*
 Full analysis report as JSON, in the same layout the command-line tool writes.

 # Safety
 `panel` must be a live handle and `out_json` a valid pointer.
 */
enum FprStatus fpr_panel_analysis_json(struct FprPanel *panel, double delta, char **out_json);

/*
 Panel as a JSON document: completed values once [`fpr_panel_complete`] has
 run, the original cells otherwise.

 # Safety
 `panel` must be a live handle and `out_json` a valid pointer.
 */
enum FprStatus fpr_panel_to_json(const struct FprPanel *panel, char **out_json);

/*
 Completes the panel if needed and anneals it. `config` may be NULL for defaults.

 # Safety
 `panel` must be a live handle, `config` NULL or valid, `out` a valid pointer.
 */
enum FprStatus fpr_panel_optimize(struct FprPanel *panel,
                                  double delta,
                                  double gamma,
                                  const struct FprSaConfig *config,
                                  struct FprOptimization **out);

/*
 Releases an optimization handle.

 # Safety
 `opt` must be NULL or a handle from [`fpr_panel_optimize`] not yet freed.
 */
void fpr_optimization_free(struct FprOptimization *opt);

/*
 Best CCL found, or NaN for a NULL handle.

 # Safety
 `opt` must be NULL or a live handle.
 */
double fpr_optimization_best_ccl(const struct FprOptimization *opt);

/*
 # Safety
 `opt` must be a live handle and `out` a valid pointer.
 */
enum FprStatus fpr_optimization_termination(const struct FprOptimization *opt,
                                            enum FprTermination *out);

/*
 Total annealing trials, or 0 for a NULL handle.

 # Safety
 `opt` must be NULL or a live handle.
 */
uint64_t fpr_optimization_trials_used(const struct FprOptimization *opt);

/*
 Number of changed cells, grouped by expert and ordered by decreasing magnitude.

 # Safety
 `opt` must be NULL or a live handle.
 */
size_t fpr_optimization_suggestion_count(const struct FprOptimization *opt);

/*
 Number of experts whose relation was left unchanged.

 # Safety
 `opt` must be NULL or a live handle.
 */
size_t fpr_optimization_unchanged_expert_count(const struct FprOptimization *opt);

/*
 # Safety
 `opt` must be a live handle and `out` a valid pointer.
 */
enum FprStatus fpr_optimization_get_suggestion(const struct FprOptimization *opt,
                                               size_t index,
                                               struct FprSuggestion *out);

/*
 Reads one cell of the best panel found.

 # Safety
 `opt` must be a live handle and `out` a valid pointer.
 */
enum FprStatus fpr_optimization_best_cell(const struct FprOptimization *opt,
                                          size_t expert,
                                          size_t row,
                                          size_t col,
                                          double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FPR_CONSENSUS_H */
