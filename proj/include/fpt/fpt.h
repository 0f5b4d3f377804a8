#ifndef FPT_H
#define FPT_H

/* C interface to the first-passage solver. Every call returns an fpt_status;
   on failure fpt_last_error() describes the problem (per thread). */

#include <stddef.h>
#include <stdint.h>

#if defined(FPT_BUILDING_LIBRARY)
#define FPT_API __attribute__((visibility("default")))
#else
#define FPT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fpt_status {
  FPT_OK = 0,
  FPT_ERR_VALIDATION = 1, /* bad config or argument */
  FPT_ERR_NUMERIC = 2,    /* a method failed to converge or lost accuracy */
  FPT_ERR_TOLERANCE = 3,  /* compare: tolerance breached (outputs still filled) */
  FPT_ERR_IO = 4,
  FPT_ERR_INTERNAL = 5
} fpt_status;

typedef struct fpt_experiment fpt_experiment;
typedef struct fpt_table fpt_table;

typedef struct fpt_mc_summary {
  long n_traj;
  long censored;
  double dt;
  double horizon;
  double fraction_lower, sigma_lower;
  double fraction_upper, sigma_upper;
} fpt_mc_summary;

typedef struct fpt_compare_report {
  double sup;
  double l1;
  double max_abs_z;
  int z_points;
  int has_mc;
  int breached;
} fpt_compare_report;

FPT_API const char* fpt_version(void);
/* Message for the last failed call on this thread; "" if none. */
FPT_API const char* fpt_last_error(void);

/* Experiments: defaults, then JSON, then path=value overrides. */
FPT_API fpt_status fpt_experiment_new(fpt_experiment** out);
FPT_API fpt_status fpt_experiment_from_json(const char* json, fpt_experiment** out);
FPT_API fpt_status fpt_experiment_load(const char* path, fpt_experiment** out);
FPT_API fpt_status fpt_experiment_set(fpt_experiment* ex, const char* assignment);
/* Parses and validates without computing anything. */
FPT_API fpt_status fpt_experiment_validate(const fpt_experiment* ex);
/* Output path from the config, or NULL when unset. Owned by ex. */
FPT_API const char* fpt_experiment_output(const fpt_experiment* ex);
FPT_API void fpt_experiment_free(fpt_experiment* ex);

/* Runs. Each result table is owned by the caller (fpt_table_free). */
FPT_API fpt_status fpt_run_density(const fpt_experiment* ex, fpt_table** out);
FPT_API fpt_status fpt_run_terms(const fpt_experiment* ex, fpt_table** out);
FPT_API fpt_status fpt_run_mc(const fpt_experiment* ex, fpt_table** out, fpt_mc_summary* summary);
FPT_API fpt_status fpt_run_spectrum(const fpt_experiment* ex, fpt_table** out);
/* Tolerances come from a. report_text is owned by the table. */
FPT_API fpt_status fpt_compare(const fpt_experiment* a, const fpt_experiment* b, fpt_table** out,
                               fpt_compare_report* report);
FPT_API const char* fpt_table_report(const fpt_table* t);

/* Probability of leaving through the configured target before the other boundary. */
FPT_API fpt_status fpt_splitting_probability(const fpt_experiment* ex, double* out);

FPT_API size_t fpt_table_rows(const fpt_table* t);
FPT_API size_t fpt_table_columns(const fpt_table* t);
FPT_API const char* fpt_table_column_name(const fpt_table* t, size_t col);
/* FPT_ERR_VALIDATION for text columns or out-of-range indices. */
FPT_API fpt_status fpt_table_value(const fpt_table* t, size_t row, size_t col, double* out);
FPT_API size_t fpt_table_warning_count(const fpt_table* t);
FPT_API const char* fpt_table_warning(const fpt_table* t, size_t i);
FPT_API fpt_status fpt_table_write_csv(const fpt_table* t, const char* path);
/* CSV text, owned by the table and valid until the next call on it. */
FPT_API const char* fpt_table_csv(fpt_table* t);
FPT_API void fpt_table_free(fpt_table* t);

#ifdef __cplusplus
}
#endif

#endif
