/* C interface to the pair-laser simulator. All functions return pl_status;
 * results are reached through opaque handles. Strings returned by getters
 * stay owned by the handle they came from. Not thread-safe per session;
 * use one session per thread. */
#ifndef PAIRLASER_H
#define PAIRLASER_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pl_status {
    PL_OK = 0,
    PL_ERR_VALIDATION = 1, /* bad config or arguments; see pl_last_error */
    PL_ERR_RUNTIME = 2,    /* solver failure */
    PL_ERR_INTERNAL = 3
} pl_status;

typedef struct pl_session pl_session;
typedef struct pl_run pl_run;

pl_session* pl_session_new(void);
void pl_session_free(pl_session* s);

/* Message for the most recent failure on this session ("" if none). */
const char* pl_last_error(const pl_session* s);

pl_status pl_set_threads(pl_session* s, int threads);
pl_status pl_set_seed(pl_session* s, uint64_t seed);
/* "csv" or "json"; overrides the config's [scenario] format when set. */
pl_status pl_set_format(pl_session* s, const char* format);

/* Parse and cross-validate a config. On success *normalized (when non-NULL)
 * receives the canonical serialization, owned by the session until the next
 * call. Validation failures put the full error list into pl_last_error. */
pl_status pl_validate(pl_session* s, const char* config_text, const char** normalized);

/* Run one scenario config; the run owns its artifacts. */
pl_status pl_run_scenario(pl_session* s, const char* config_text, pl_run** out);

/* Run a pre-registered figure recipe: fig2 fig3 fig4a fig4b fig5a fig5b. */
pl_status pl_run_figure(pl_session* s, const char* figure_id, pl_run** out);

void pl_run_free(pl_run* r);
int pl_run_artifact_count(const pl_run* r);
const char* pl_run_artifact_name(const pl_run* r, int index);
const char* pl_run_artifact_data(const pl_run* r, int index);
/* 1 when any scan point failed (artifacts still carry the flagged rows). */
int pl_run_had_point_failures(const pl_run* r);

const char* pl_version(void);

#ifdef __cplusplus
}
#endif

#endif /* PAIRLASER_H */
