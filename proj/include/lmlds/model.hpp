#pragma once

//
// The transform-domain multilinear dynamical system: initialization,
// slice-parallel EM training, forecasting and parameter accounting.
//

#include <cstdint>
#include <vector>

#include "lmlds/lds.hpp"
#include "lmlds/series_io.hpp"
#include "lmlds/transform.hpp"

namespace lmlds {

// Trained forecaster: one transform-domain LDS per frontal slice.
struct LMLDSModel {
    TransformKind kind = TransformKind::Identity;
    Eigen::Index rows = 0;    // I
    Eigen::Index latent = 0;  // J
    Eigen::Index tubes = 0;   // K
    CovarianceMode mode = CovarianceMode::Full;
    uint64_t seed = 0;
    int n_train = 0;
    std::vector<SliceLDSParams> slices;
    // Smoothed latent mean at the end of training, per slice; empty until trained.
    std::vector<Vector> last_means;
    // Nonzero when this model is a vectorized baseline over a flattened
    // rows x tubes series (then kind == Identity and tubes == 1).
    Eigen::Index flattened_rows = 0;
    Eigen::Index flattened_tubes = 0;

    bool is_baseline() const { return flattened_rows > 0; }
    void validate() const;
};

enum class ModelFamily { LDS, MLDS, L_MLDS };

ModelFamily model_family_from_string(std::string_view s);

// Deterministic per-slice seed derivation (splitmix64 mix of master and index).
uint64_t derive_seed(uint64_t master, uint64_t index);

// Fresh slice parameters: u0 standard-normal, unit covariances, a and c from
// left singular vectors of standard-normal matrices. Real draws when
// real_valued, circularly-symmetric complex draws otherwise.
SliceLDSParams init_slice_params(Eigen::Index obs_dim, Eigen::Index latent_dim,
                                 uint64_t seed, bool real_valued);

// Untrained model. Real transforms get real slice draws; under Dft the
// self-conjugate slices are real and mirror slices are conjugate pairs, so
// real series stay real through reconstruction.
LMLDSModel init_model(Eigen::Index rows, Eigen::Index latent, Eigen::Index tubes,
                      TransformKind kind, CovarianceMode mode, uint64_t seed);

struct TrainOptions {
    EMOptions em;
    int workers = 0;  // 0 = hardware concurrency
    // Under Dft, fit only the independent half of the slices and mirror the
    // rest by conjugation.
    bool exploit_conjugate_symmetry = true;
};

struct TrainResult {
    LMLDSModel model;
    std::vector<std::vector<double>> traces;  // per-slice log-likelihood traces
    std::vector<int> em_iters;                // per-slice iteration counts
};

// Index range [0, count) of slices that must actually be fitted; the rest
// follow by conjugation. count == tubes unless Dft symmetry applies.
Eigen::Index independent_slice_count(TransformKind kind, Eigen::Index tubes,
                                     bool exploit_symmetry);

TrainResult train(const TensorSeries& series, int n_train, Eigen::Index latent,
                  TransformKind kind, CovarianceMode mode, uint64_t seed,
                  const TrainOptions& opts = {});

// Vectorized-LDS baseline: flattens each I x K observation to a length-IK
// vector and fits a single system with the given latent dimension.
TrainResult fit_baseline_lds(const TensorSeries& series, int n_train,
                             Eigen::Index latent, CovarianceMode mode, uint64_t seed,
                             const TrainOptions& opts = {});

// Per-slice h-step forecasts stacked, inverse-transformed and realified.
// Residual imaginary magnitude above 1e-6 signals broken conjugate symmetry.
std::vector<RealMatrix> predict(const LMLDSModel& model,
                                const std::vector<Vector>& last_means, int horizon,
                                double* max_imag_out = nullptr);
std::vector<RealMatrix> predict(const LMLDSModel& model, int horizon,
                                double* max_imag_out = nullptr);

long long param_count(ModelFamily family, long long rows, long long latent,
                      long long tubes);

// Largest J with param_count(L_MLDS) <= budget, or smallest J with
// param_count(LDS) >= budget, per the evaluation protocol.
Eigen::Index latent_dim_for_budget(ModelFamily family, Eigen::Index rows,
                                   Eigen::Index tubes, long long budget);

}  // namespace lmlds
