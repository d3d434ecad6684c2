#ifndef LMLDS_CAPI_H
#define LMLDS_CAPI_H

/*
 * C interface to the transform-domain multilinear dynamical system library.
 *
 * All functions return an lmlds_status code; on failure a human-readable
 * message is available from lmlds_last_error() (thread-local). Handles are
 * opaque and must be released with the matching *_free function.
 *
 * Matrices cross this boundary as dense column-major double arrays.
 */

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lmlds_status {
    LMLDS_OK = 0,
    LMLDS_ERR_CONFIG = 1,  /* invalid arguments or configuration */
    LMLDS_ERR_DATA = 2,    /* malformed or inconsistent data */
    LMLDS_ERR_NUMERIC = 3, /* numerical failure */
    LMLDS_ERR_IO = 4,      /* filesystem failure */
    LMLDS_ERR_INTERNAL = 5
} lmlds_status;

typedef struct lmlds_series lmlds_series;
typedef struct lmlds_model lmlds_model;

const char* lmlds_version(void);
const char* lmlds_last_error(void);

/* ---- tensor series ---------------------------------------------------- */

lmlds_status lmlds_series_load(const char* manifest_path, const char* data_path,
                               lmlds_series** out);
lmlds_status lmlds_series_save(const lmlds_series* series, const char* manifest_path,
                               const char* data_path, int overwrite);
/* data: length * rows * tubes doubles, epoch-major, column-major matrices. */
lmlds_status lmlds_series_create(int rows, int tubes, int length, const char* name,
                                 const double* data, lmlds_series** out);
/* Samples a ground-truth model and a series drawn from it. Either output
 * pointer may be NULL if not wanted. */
lmlds_status lmlds_series_generate(int rows, int latent, int tubes,
                                   const char* transform, uint64_t seed, int length,
                                   double rho, double noise_scale,
                                   lmlds_series** out_series,
                                   lmlds_model** out_truth);
void lmlds_series_free(lmlds_series* series);

lmlds_status lmlds_series_dims(const lmlds_series* series, int* length, int* rows,
                               int* tubes);
const char* lmlds_series_name(const lmlds_series* series);
/* out: rows * tubes doubles, column-major. epoch is 1-based. */
lmlds_status lmlds_series_epoch(const lmlds_series* series, int epoch, double* out);

/* ---- training --------------------------------------------------------- */

/* Trains on the first n_train epochs. mode is "diagonal" or "full";
 * transform is "dft", "dct", "dwt" or "identity". workers <= 0 selects the
 * hardware concurrency; results are identical for any worker count. */
lmlds_status lmlds_train(const lmlds_series* series, int n_train, int latent,
                         const char* transform, const char* mode, uint64_t seed,
                         int max_iters, double tol, int workers, lmlds_model** out);

/* Vectorized-LDS baseline over flattened observations with the given
 * (total) latent dimension. */
lmlds_status lmlds_train_baseline(const lmlds_series* series, int n_train,
                                  int latent, const char* mode, uint64_t seed,
                                  int max_iters, double tol, lmlds_model** out);

/* ---- models ----------------------------------------------------------- */

lmlds_status lmlds_model_save(const lmlds_model* model, const char* path,
                              int overwrite);
lmlds_status lmlds_model_load(const char* path, lmlds_model** out);
void lmlds_model_free(lmlds_model* model);

lmlds_status lmlds_model_dims(const lmlds_model* model, int* rows, int* latent,
                              int* tubes, int* n_train);
const char* lmlds_model_transform(const lmlds_model* model);
const char* lmlds_model_mode(const lmlds_model* model);
uint64_t lmlds_model_seed(const lmlds_model* model);

/* Per-slice EM log-likelihood trace from the training run that produced
 * this handle (not persisted). slice is 1-based. Returns the trace length;
 * copies min(capacity, length) values into out when out is non-NULL. */
lmlds_status lmlds_model_trace(const lmlds_model* model, int slice, double* out,
                               int capacity, int* length);

/* Forecasts horizon epochs past the training span. out receives
 * horizon * rows * tubes doubles, epoch-major, column-major matrices (for a
 * baseline model, in the original pre-flattening shape). max_imag_out (may
 * be NULL) receives the discarded imaginary residue. */
lmlds_status lmlds_predict(const lmlds_model* model, int horizon, double* out,
                           double* max_imag_out);

/* ---- accounting and metrics ------------------------------------------- */

/* family: "lds", "mlds" or "lmlds". */
lmlds_status lmlds_param_count(const char* family, int rows, int latent, int tubes,
                               long long* out);
lmlds_status lmlds_latent_dim_for_budget(const char* family, int rows, int tubes,
                                         long long budget, int* out);
lmlds_status lmlds_relative_error(const double* predicted, const double* actual,
                                  int rows, int tubes, double* out);

#ifdef __cplusplus
}
#endif

#endif /* LMLDS_CAPI_H */
