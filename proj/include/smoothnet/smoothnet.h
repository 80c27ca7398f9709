#ifndef SMOOTHNET_SMOOTHNET_H
#define SMOOTHNET_SMOOTHNET_H

/* C interface to the experiment pipeline: synthesis, training, unit
 * classification, and artifact emission. Handles are opaque; every entry
 * point returns a status code and the per-thread message from
 * smoothnet_last_error explains the most recent failure. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    SMOOTHNET_OK = 0,
    SMOOTHNET_INVALID_ARGUMENT = 1, /* rejected input or configuration */
    SMOOTHNET_CAPABILITY = 2,       /* outside what the build supports */
    SMOOTHNET_DOMAIN = 3,           /* evaluation left the valid domain */
    SMOOTHNET_NUMERIC = 4           /* runtime numerical failure */
} smoothnet_status;

const char* smoothnet_status_name(smoothnet_status status);

/* Message for the last failing call on this thread; empty when the last
 * call succeeded. The pointer stays valid until the next call. */
const char* smoothnet_last_error(void);

/* ---- experiment specs ------------------------------------------------ */

typedef struct smoothnet_spec smoothnet_spec;

/* Fresh spec with default values. */
smoothnet_status smoothnet_spec_create(smoothnet_spec** out);

/* Spec from its JSON document form. */
smoothnet_status smoothnet_spec_parse(const char* text, smoothnet_spec** out);

void smoothnet_spec_destroy(smoothnet_spec* spec);

/* JSON form of the spec; free the string with smoothnet_string_free. */
smoothnet_status smoothnet_spec_format(const smoothnet_spec* spec, char** out);

/* String fields: name, function, mode (synthesize|train|analyze|full),
 * network, kind (logistic|tanh). */
smoothnet_status smoothnet_spec_set_string(smoothnet_spec* spec, const char* key,
                                           const char* value);

/* Numeric fields: grid_step, dim, normalize, theta, lr, steps, init_lo,
 * init_hi, train_output_bias, gamma1..gamma4, scan_step, synth_order,
 * synth_pieces, synth_tol. Booleans take 0 or 1. */
smoothnet_status smoothnet_spec_set_number(smoothnet_spec* spec, const char* key, double value);

smoothnet_status smoothnet_spec_set_seeds(smoothnet_spec* spec, const uint64_t* seeds,
                                          size_t count);

/* ---- runs ------------------------------------------------------------ */

typedef struct smoothnet_summary smoothnet_summary;

/* Executes the spec into out_dir and leaves the artifact set there; the
 * returned summary aggregates per-seed outcomes. Individual training
 * divergence is recorded in the summary, not reported as a status. */
smoothnet_status smoothnet_run(const smoothnet_spec* spec, const char* out_dir,
                               smoothnet_summary** out);

/* Rebuilds the summary from artifacts already in out_dir. */
smoothnet_status smoothnet_reaggregate(const smoothnet_spec* spec, const char* out_dir,
                                       smoothnet_summary** out);

void smoothnet_summary_destroy(smoothnet_summary* summary);

smoothnet_status smoothnet_summary_format(const smoothnet_summary* summary, char** out);

size_t smoothnet_summary_runs(const smoothnet_summary* summary);
size_t smoothnet_summary_diverged(const smoothnet_summary* summary);
size_t smoothnet_summary_failed(const smoothnet_summary* summary);

/* ---- expressions ----------------------------------------------------- */

/* Parses text; on success stores the input dimension (1 or 2). */
smoothnet_status smoothnet_expression_check(const char* text, int* input_dim);

/* Evaluates text at point[0..dim-1]. */
smoothnet_status smoothnet_expression_eval(const char* text, const double* point, size_t dim,
                                           double* out);

void smoothnet_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif
