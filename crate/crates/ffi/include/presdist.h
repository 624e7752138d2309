#ifndef PRESDIST_H
#define PRESDIST_H

#include <stddef.h>
#include <stdint.h>

typedef enum pd_status {
  PD_STATUS_OK = 0,
  PD_STATUS_NULL_POINTER = 1,
  PD_STATUS_INVALID_UTF8 = 2,
  PD_STATUS_PARSE = 3,
  PD_STATUS_INVALID_INPUT = 4,
  PD_STATUS_LIMIT_EXCEEDED = 5,
  PD_STATUS_INCONSISTENT = 6,
  PD_STATUS_PANIC = 7,
} pd_status;

typedef struct pd_barcode pd_barcode;

typedef struct pd_merge_tree pd_merge_tree;

typedef struct pd_module pd_module;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread, or null. Valid until the
 next call into this library on the same thread.
 */
const char *pd_last_error(void);

/*
 Library version as a static string.
 */
const char *pd_version(void);

/*
 # Safety
 `s` is null or was returned by this library and not yet freed.
 */
void pd_string_free(char *s);

/*
 # Safety
 `json` is a nul-terminated string; `out` is writable.
 */
enum pd_status pd_merge_tree_from_json(const char *json, struct pd_merge_tree **out);

/*
 # Safety
 `tree` is null or a live handle from [`pd_merge_tree_from_json`].
 */
void pd_merge_tree_free(struct pd_merge_tree *tree);

/*
 Elder-rule barcode of a merge tree.

 # Safety
 `tree` is a live handle; `out` is writable.
 */
enum pd_status pd_merge_tree_barcode(const struct pd_merge_tree *tree, struct pd_barcode **out);

/*
 # Safety
 `json` is a nul-terminated string; `out` is writable.
 */
enum pd_status pd_module_from_json(const char *json, struct pd_module **out);

/*
 # Safety
 `module` is null or a live handle from [`pd_module_from_json`].
 */
void pd_module_free(struct pd_module *module);

/*
 Dimension at the grade `(x, y)`, each given as a rational such as `"-3/2"`.

 # Safety
 `module` is a live handle; `x` and `y` are nul-terminated; `out` is writable.
 */
enum pd_status pd_module_dim_at(const struct pd_module *module,
                                const char *x,
                                const char *y,
                                size_t *out);

/*
 Barcode of the projection onto the first coordinate; one interval per generator.

 # Safety
 `module` is a live handle; `out` is writable.
 */
enum pd_status pd_module_projected_barcode(const struct pd_module *module, struct pd_barcode **out);

/*
 # Safety
 `json` is a nul-terminated string; `out` is writable.
 */
enum pd_status pd_barcode_from_json(const char *json, struct pd_barcode **out);

/*
 # Safety
 `barcode` is null or a live barcode handle.
 */
void pd_barcode_free(struct pd_barcode *barcode);

/*
 Number of intervals, counted with multiplicity.

 # Safety
 `barcode` is a live handle; `out` is writable.
 */
enum pd_status pd_barcode_len(const struct pd_barcode *barcode, size_t *out);

/*
 # Safety
 `barcode` is a live handle; `out` is writable. Free the result with [`pd_string_free`].
 */
enum pd_status pd_barcode_to_json(const struct pd_barcode *barcode, char **out);

/*
 Optimal p-Wasserstein cost; `p` is at least 1 or `INFINITY`.

 `out_pow_p` receives the p-th power as text (exact when `p` is an integer
 or infinite); `out_value` receives the cost itself.

 # Safety
 `x` and `y` are live handles; out pointers are writable. Free the text with [`pd_string_free`].
 */
enum pd_status pd_wasserstein(const struct pd_barcode *x,
                              const struct pd_barcode *y,
                              double p,
                              char **out_pow_p,
                              double *out_value);

/*
 Gadget trees or modules of an instance `{"balpart": ...}` or `{"ci": ...}` as JSON.

 # Safety
 `instance` is nul-terminated; `out` is writable. Free the result with [`pd_string_free`].
 */
enum pd_status pd_gadget_json(const char *instance, double p, uint32_t field, char **out);

/*
 Solves, certifies and cross-checks an instance; writes the report as JSON.

 Returns [`PdStatus::Inconsistent`] with the report still written when a
 check fails. `limit` of 0 selects the solver default.

 # Safety
 `instance` is nul-terminated; `out` is writable. Free the result with [`pd_string_free`].
 */
enum pd_status pd_pipeline_json(const char *instance,
                                double p,
                                uint32_t field,
                                uint64_t limit,
                                char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PRESDIST_H */
