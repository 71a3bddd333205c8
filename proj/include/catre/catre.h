/*
 * C interface to the catastrophe-reinsurance solver.
 *
 * All functions return a catre_status. On failure a thread-local message is
 * available from catre_last_error() until the next call on the same thread.
 * Handles are opaque and must be released with the matching *_free function.
 */
#ifndef CATRE_CATRE_H
#define CATRE_CATRE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CATRE_API __declspec(dllexport)
#else
#define CATRE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum catre_status {
  CATRE_OK = 0,
  CATRE_ERR_INVALID_ARGUMENT = 1,
  CATRE_ERR_DIVERGENT_INTEGRAL = 2,
  CATRE_ERR_NO_CONVERGENCE = 3,
  CATRE_ERR_ZERO_LIKELIHOOD = 4,
  CATRE_ERR_STEP_TOO_LARGE = 5,
  CATRE_ERR_CONFIG = 6,
  CATRE_ERR_IO = 7,
  CATRE_ERR_INTERNAL = 8
} catre_status;

typedef enum catre_regime {
  CATRE_REGIME_INTERIOR = 0,
  CATRE_REGIME_CLAMPED_AT_ZERO = 1,
  CATRE_REGIME_CLAMPED_AT_ONE = 2
} catre_regime;

typedef struct catre_config catre_config;
typedef struct catre_value_grid catre_value_grid;

typedef struct catre_full_solution {
  double xi;
  double b;
  catre_regime regime;
  double A;
  double B;
  double residual_v1;
  double residual_v2;
} catre_full_solution;

/* Outcome of a report run. `violations` counts failed enabled assertions. */
typedef struct catre_run_result {
  int violations;
  char* summary; /* human-readable, release with catre_string_free */
} catre_run_result;

CATRE_API const char* catre_version(void);
CATRE_API const char* catre_status_string(catre_status status);
CATRE_API const char* catre_last_error(void);
CATRE_API void catre_string_free(char* s);

CATRE_API catre_status catre_config_load(const char* path, catre_config** out);
CATRE_API catre_status catre_config_parse(const char* text, catre_config** out);
CATRE_API void catre_config_free(catre_config* config);
CATRE_API catre_status catre_config_set_seed(catre_config* config, uint64_t seed);
CATRE_API catre_status catre_config_family_count(const catre_config* config, size_t* out);

/* Full-information solve for claim family `family` at time t. A NaN threshold keeps the configured L. */
CATRE_API catre_status catre_solve_full(const catre_config* config, size_t family, double t, double threshold,
                                        catre_full_solution* out);

/* Subcommands. Output files are written into `out_dir`, which is created if missing. */
CATRE_API catre_status catre_run_sweep(const catre_config* config, const char* out_dir, int assert_golden,
                                       catre_run_result* out);
CATRE_API catre_status catre_run_bayes(const catre_config* config, const char* out_dir, catre_run_result* out);
CATRE_API catre_status catre_run_validate(const catre_config* config, const char* out_dir, catre_run_result* out);

/* Filter. `p` and `out` have one entry per claim family. */
CATRE_API catre_status catre_jump_update(const catre_config* config, const double* p, size_t m, double y,
                                         double* out);
CATRE_API catre_status catre_batch_posterior(const catre_config* config, const double* prior, size_t m,
                                             const double* claims, size_t n, double* out);

/* Value iteration on the configured grid. */
CATRE_API catre_status catre_value_grid_create(const catre_config* config, catre_value_grid** out);
CATRE_API catre_status catre_value_grid_g(const catre_value_grid* grid, double t, const double* p, size_t m,
                                          double* out);
CATRE_API catre_status catre_value_grid_strategy(const catre_value_grid* grid, double t, const double* p, size_t m,
                                                 double* xi, double* b);
CATRE_API catre_status catre_value_grid_write_csv(const catre_value_grid* grid, const char* path);
CATRE_API void catre_value_grid_free(catre_value_grid* grid);

#ifdef __cplusplus
}
#endif

#endif /* CATRE_CATRE_H */
