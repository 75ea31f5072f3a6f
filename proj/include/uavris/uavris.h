/* C interface to the secure UAV-relay optimizer. All functions return a
 * uavris_status; on failure uavris_last_error() holds a thread-local message.
 * Objects are opaque handles released with the matching *_free function, and
 * every returned string is released with uavris_string_free. */

#ifndef UAVRIS_H
#define UAVRIS_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum uavris_status {
  UAVRIS_OK = 0,
  UAVRIS_ERR_ARGUMENT = 1,   /* null pointer or invalid parameter */
  UAVRIS_ERR_PARSE = 2,      /* malformed or inconsistent scenario document */
  UAVRIS_ERR_INFEASIBLE = 3, /* state violates a model constraint */
  UAVRIS_ERR_RUNTIME = 4     /* optimization or internal failure */
} uavris_status;

typedef struct uavris_scenario uavris_scenario;
typedef struct uavris_result uavris_result;
typedef struct uavris_sweep uavris_sweep;

typedef struct uavris_run_options {
  int scheme;               /* 1 = aligned phases + trajectory, 2 = joint */
  int baseline_af;          /* nonzero: relay baseline instead of the surface */
  unsigned long long seed;  /* recorded for reproducibility bookkeeping */
} uavris_run_options;

const char* uavris_version(void);
const char* uavris_last_error(void);
void uavris_string_free(char* s);

/* Scenario documents are JSON; keys suffixed _db / _dbm are converted to
 * linear units on load and serialized back in linear SI units. */
uavris_status uavris_scenario_parse(const char* text, uavris_scenario** out);
uavris_status uavris_scenario_default(uavris_scenario** out);
uavris_status uavris_scenario_serialize(const uavris_scenario* sc, char** out_text);
void uavris_scenario_free(uavris_scenario* sc);

uavris_status uavris_run(const uavris_scenario* sc, const uavris_run_options* opts,
                         uavris_result** out);
uavris_status uavris_result_metrics(const uavris_result* res, double* zeta, double* gamma);
uavris_status uavris_result_converged(const uavris_result* res, int* converged,
                                      int* outer_iterations);
uavris_status uavris_result_trace_csv(const uavris_result* res, char** out);
uavris_status uavris_result_solution_json(const uavris_result* res, char** out);
uavris_status uavris_result_trajectory_svg(const uavris_result* res, char** out);
uavris_status uavris_result_convergence_svg(const uavris_result* res, char** out);
void uavris_result_free(uavris_result* res);

/* Overlay chart of several finished runs (scheme or baseline comparisons). */
uavris_status uavris_comparison_svg(const uavris_result* const* results,
                                    const char* const* labels, int count, char** out);

/* axis: one of "H", "alpha", "Pk", "M", "vmax". Points run concurrently up
 * to the jobs limit; per-point failures are recorded in the CSV. */
uavris_status uavris_sweep_run(const uavris_scenario* sc, const char* axis,
                               const double* values, int num_values,
                               const uavris_run_options* opts, int with_baseline, int jobs,
                               uavris_sweep** out);
uavris_status uavris_sweep_csv(const uavris_sweep* sw, char** out);
uavris_status uavris_sweep_svg(const uavris_sweep* sw, char** out);
void uavris_sweep_free(uavris_sweep* sw);

#ifdef __cplusplus
}
#endif

#endif /* UAVRIS_H */
