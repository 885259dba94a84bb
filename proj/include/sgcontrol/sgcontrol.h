/* sgcontrol: speed-gradient control toolkit, C API.
 *
 * The library runs closed-loop simulations of nonsmooth speed-gradient
 * feedback laws (the Brockett integrator stabilizer and the vibrating-string
 * energy controller), grid scans certifying the nonvanishing-gradient
 * assumption, and report summaries. All state lives behind opaque handles;
 * every call returns an sgc_status, with details from sgc_last_error().
 */
#ifndef SGCONTROL_H
#define SGCONTROL_H

#include <stddef.h>

#if defined(_WIN32)
#define SGC_EXPORT __declspec(dllexport)
#else
#define SGC_EXPORT __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sgc_status {
  SGC_OK = 0,
  SGC_ERROR_INVALID_ARGUMENT = 1,
  SGC_ERROR_PARSE = 2,      /* config rejected; sgc_last_error() has line/field */
  SGC_ERROR_IO = 3,
  SGC_ERROR_RUNTIME = 4,
} sgc_status;

typedef enum sgc_termination {
  SGC_TERM_CONVERGED = 0,
  SGC_TERM_HORIZON = 1,
  SGC_TERM_EVENT_STOP = 2,
  SGC_TERM_ENTERED_C = 3,
  SGC_TERM_SOLVER_FAILURE = 4,
  SGC_TERM_ENERGY_BLOWUP = 5,
} sgc_termination;

SGC_EXPORT const char* sgc_version(void);

/* Message for the most recent failing call on this thread; never NULL. */
SGC_EXPORT const char* sgc_last_error(void);

/* An experiment handle owns a parsed config plus any overrides. */
typedef struct sgc_experiment sgc_experiment;

SGC_EXPORT sgc_status sgc_experiment_load(const char* path, sgc_experiment** out);
SGC_EXPORT sgc_status sgc_experiment_load_string(const char* text, const char* label,
                                                 sgc_experiment** out);
/* Override a config key (e.g. "dt", "t_max"); overrides win over file values. */
SGC_EXPORT sgc_status sgc_experiment_override(sgc_experiment* exp, const char* key,
                                              const char* value);
SGC_EXPORT void sgc_experiment_free(sgc_experiment* exp);

typedef struct sgc_run_result {
  int termination;          /* sgc_termination */
  int converged;            /* 1 iff termination == SGC_TERM_CONVERGED */
  double convergence_time;  /* NaN when not converged */
  double final_time;
  double final_goal;
  double max_decrease_violation;
  double max_control_norm;  /* over pre-convergence samples; NaN if none */
  double max_control_jump;
  int event_count;
  int checks_enabled;
  int checks_failed;
  int experimental; /* 1 for runs started on the excluded set (heuristic push-off) */
} sgc_run_result;

/* Runs the experiment; writes trajectory.csv, events.json and report.json
 * into out_dir. result may be NULL. A failing enabled check is not an API
 * error: inspect checks_failed. */
SGC_EXPORT sgc_status sgc_experiment_run(sgc_experiment* exp, const char* out_dir,
                                         sgc_run_result* result);

typedef struct sgc_scan_result {
  int empty_region; /* 1 when no grid point is admissible (not an error) */
  double a_lower_bound;
  double argmin[3];
  long admissible_count;
} sgc_scan_result;

/* Grid scan for the lower bound a with |g| >= a on {Q >= delta, |x| <= radius}
 * off the excluded set. plant must be "brockett". out_json_path may be NULL. */
SGC_EXPORT sgc_status sgc_scan(const char* plant, double delta, double radius, int resolution,
                               const char* out_json_path, sgc_scan_result* result);

/* Comparison table over run reports: fixed-width text plus a JSON row array.
 * out_json_path may be NULL. */
SGC_EXPORT sgc_status sgc_summarize(const char* const* report_paths, size_t count,
                                    const char* out_text_path, const char* out_json_path);

#ifdef __cplusplus
}
#endif

#endif /* SGCONTROL_H */
