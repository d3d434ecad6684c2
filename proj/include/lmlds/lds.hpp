#pragma once

//
// Complex-capable linear-Gaussian state-space engine: Kalman filter,
// RTS smoother, EM identification, sampling and forecasting.
//

#include <cstdint>
#include <vector>

#include "lmlds/tensor.hpp"

namespace lmlds {

enum class CovarianceMode { Diagonal, Full };

CovarianceMode covariance_mode_from_string(std::string_view s);
const char* to_string(CovarianceMode mode);

// One transform-domain slice system:
//   x_1 ~ CN(u0, q0), x_{n+1} | x_n ~ CN(a x_n, q), y_n | x_n ~ CN(c x_n, r).
struct SliceLDSParams {
    Vector u0;   // J
    Matrix q0;   // J x J, Hermitian PSD
    Matrix a;    // J x J
    Matrix q;    // J x J, Hermitian PSD
    Matrix c;    // I x J
    Matrix r;    // I x I, Hermitian PSD

    Eigen::Index latent_dim() const { return a.rows(); }
    Eigen::Index obs_dim() const { return c.rows(); }

    // Dimension consistency plus Hermitian-PSD covariance checks.
    void validate(double herm_tol = 1e-12, double eig_floor = -1e-10) const;

    SliceLDSParams conjugated() const;
};

struct FilterResult {
    std::vector<Vector> means;       // posterior mean after seeing y_1..y_n
    std::vector<Matrix> covs;
    std::vector<Vector> pred_means;  // one-step prior at each n
    std::vector<Matrix> pred_covs;
    Matrix last_gain;                // Kalman gain at n = N, for the smoother
    double log_likelihood = 0.0;     // complex-Gaussian data log-likelihood
};

struct SmootherResult {
    std::vector<Vector> filtered_means;
    std::vector<Matrix> filtered_covs;
    std::vector<Vector> smoothed_means;
    std::vector<Matrix> smoothed_covs;
    // lag_one_covs[n] = Cov(x_{n+1}, x_n | y_1..y_N) for n in [0, N-2].
    std::vector<Matrix> lag_one_covs;
    double log_likelihood = 0.0;
};

FilterResult kalman_filter(const SliceLDSParams& params,
                           const std::vector<Vector>& obs);

SmootherResult rts_smoother(const SliceLDSParams& params,
                            const FilterResult& filt);

struct EMOptions {
    int max_iters = 100;
    double tol = 1e-6;  // relative log-likelihood improvement threshold
    CovarianceMode mode = CovarianceMode::Full;
};

struct EMResult {
    SliceLDSParams params;
    std::vector<double> loglik_trace;   // one entry per E-step
    Vector last_smoothed_mean;          // E[x_N | y_1..y_N] under final params
    double final_log_likelihood = 0.0;  // under final params
};

// Alternates filter+smoother E-steps with closed-form M-step updates.
// Diagonal mode keeps all covariance estimates exactly diagonal. With a
// single observation only u0, q0, c, r are updated.
EMResult em_fit(const SliceLDSParams& init, const std::vector<Vector>& obs,
                const EMOptions& opts);

struct Trajectory {
    std::vector<Vector> latents;
    std::vector<Vector> observations;
};

// Ancestral sampling, deterministic given the seed. With real_noise the
// draws are standard real normals instead of circularly-symmetric CN(0,1)
// (whose real/imaginary parts carry variance 1/2 each).
Trajectory sample_trajectory(const SliceLDSParams& params, int n_steps,
                             uint64_t seed, bool real_noise = false);

// h-step-ahead predictions c * a^h * last_mean, h = 1..horizon.
std::vector<Vector> forecast(const SliceLDSParams& params, const Vector& last_mean,
                             int horizon);

// (m + m^H)/2 with eigenvalues floored; keeps M-step covariances Hermitian PSD.
Matrix make_hermitian_psd(const Matrix& m, double floor = 1e-12);

// Factor F with F F^H == m (Hermitian PSD m); tolerates zero eigenvalues.
Matrix psd_sqrt_factor(const Matrix& m);

bool is_hermitian_psd(const Matrix& m, double herm_tol = 1e-12,
                      double eig_floor = -1e-10);

}  // namespace lmlds
