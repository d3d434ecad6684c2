#include "lmlds/lds.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace lmlds {

namespace {

void check_finite(const Matrix& m, const char* what, int step) {
    if (!m.allFinite())
        throw NumericError(std::string(what) + " non-finite at step " +
                           std::to_string(step + 1));
}

Matrix repair_covariance(const Matrix& s, CovarianceMode mode, double floor = 1e-12) {
    if (mode == CovarianceMode::Diagonal) {
        RealVector d = s.diagonal().real().cwiseMax(floor);
        return d.cast<Complex>().asDiagonal();
    }
    return make_hermitian_psd(s, floor);
}

// Solves X * B = A for X with Hermitian positive (semi)definite B.
Matrix solve_right(const Matrix& a, const Matrix& b, const char* what) {
    Eigen::LDLT<Matrix> ldlt(b);
    if (ldlt.info() != Eigen::Success)
        throw NumericError(std::string(what) + ": singular coefficient matrix");
    Matrix x = ldlt.solve(a.adjoint()).adjoint();
    if (!x.allFinite())
        throw NumericError(std::string(what) + ": non-finite solve result");
    return x;
}

}  // namespace

CovarianceMode covariance_mode_from_string(std::string_view s) {
    if (s == "diagonal") return CovarianceMode::Diagonal;
    if (s == "full") return CovarianceMode::Full;
    throw ConfigError("unknown covariance mode: " + std::string(s));
}

const char* to_string(CovarianceMode mode) {
    return mode == CovarianceMode::Diagonal ? "diagonal" : "full";
}

void SliceLDSParams::validate(double herm_tol, double eig_floor) const {
    const Eigen::Index j = latent_dim();
    const Eigen::Index i = obs_dim();
    if (u0.size() != j || q0.rows() != j || q0.cols() != j || q.rows() != j ||
        q.cols() != j || a.cols() != j || c.cols() != j || r.rows() != i ||
        r.cols() != i)
        throw ConfigError("SliceLDSParams: inconsistent dimensions");
    if (!is_hermitian_psd(q0, herm_tol, eig_floor))
        throw NumericError("SliceLDSParams: q0 not Hermitian PSD");
    if (!is_hermitian_psd(q, herm_tol, eig_floor))
        throw NumericError("SliceLDSParams: q not Hermitian PSD");
    if (!is_hermitian_psd(r, herm_tol, eig_floor))
        throw NumericError("SliceLDSParams: r not Hermitian PSD");
}

SliceLDSParams SliceLDSParams::conjugated() const {
    SliceLDSParams p;
    p.u0 = u0.conjugate();
    p.q0 = q0.conjugate();
    p.a = a.conjugate();
    p.q = q.conjugate();
    p.c = c.conjugate();
    p.r = r.conjugate();
    return p;
}

bool is_hermitian_psd(const Matrix& m, double herm_tol, double eig_floor) {
    if (m.rows() != m.cols()) return false;
    const double scale = std::max(1.0, m.norm());
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > herm_tol * scale) return false;
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    return es.info() == Eigen::Success && es.eigenvalues().minCoeff() >= eig_floor * scale;
}

Matrix make_hermitian_psd(const Matrix& m, double floor) {
    Matrix sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
    if (es.info() != Eigen::Success)
        throw NumericError("make_hermitian_psd: eigendecomposition failed");
    RealVector ev = es.eigenvalues().cwiseMax(floor);
    Matrix out = es.eigenvectors() * ev.cast<Complex>().asDiagonal() *
                 es.eigenvectors().adjoint();
    return 0.5 * (out + out.adjoint());
}

Matrix psd_sqrt_factor(const Matrix& m) {
    Matrix sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
    if (es.info() != Eigen::Success)
        throw NumericError("psd_sqrt_factor: eigendecomposition failed");
    RealVector ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.cast<Complex>().asDiagonal() *
           es.eigenvectors().adjoint();
}

FilterResult kalman_filter(const SliceLDSParams& params,
                           const std::vector<Vector>& obs) {
    const auto n_steps = static_cast<int>(obs.size());
    if (n_steps < 1) throw ConfigError("kalman_filter: empty observation sequence");
    const Eigen::Index dim_obs = params.obs_dim();
    for (const auto& y : obs)
        if (y.size() != dim_obs)
            throw ConfigError("kalman_filter: observation dimension mismatch");

    FilterResult out;
    out.means.reserve(obs.size());
    out.covs.reserve(obs.size());
    out.pred_means.reserve(obs.size());
    out.pred_covs.reserve(obs.size());

    const double log_pi = std::log(std::numbers::pi);
    Vector mean;
    Matrix cov;
    for (int n = 0; n < n_steps; ++n) {
        Vector pred_mean = (n == 0) ? params.u0 : Vector(params.a * mean);
        Matrix pred_cov = (n == 0)
                              ? params.q0
                              : Matrix(params.a * cov * params.a.adjoint() + params.q);
        pred_cov = 0.5 * (pred_cov + pred_cov.adjoint());
        check_finite(pred_cov, "predicted covariance", n);

        const Matrix innov_cov = params.c * pred_cov * params.c.adjoint() + params.r;
        Eigen::LLT<Matrix> llt(0.5 * (innov_cov + innov_cov.adjoint()));
        if (llt.info() != Eigen::Success)
            throw NumericError("singular innovation covariance at step " +
                               std::to_string(n + 1));
        const Vector innov = obs[static_cast<size_t>(n)] - params.c * pred_mean;
        const Vector whitened = llt.solve(innov);
        // gain = pred_cov c^H S^{-1}
        const Matrix gain = llt.solve(params.c * pred_cov).adjoint();

        mean = pred_mean + gain * innov;
        cov = pred_cov - gain * innov_cov * gain.adjoint();
        cov = 0.5 * (cov + cov.adjoint());
        check_finite(cov, "filtered covariance", n);

        double log_det = 0.0;
        for (Eigen::Index i = 0; i < dim_obs; ++i)
            log_det += 2.0 * std::log(llt.matrixL()(i, i).real());
        const double step_ll = -static_cast<double>(dim_obs) * log_pi - log_det -
                               innov.dot(whitened).real();
        if (!std::isfinite(step_ll))
            throw NumericError("non-finite log-likelihood at step " +
                               std::to_string(n + 1));
        out.log_likelihood += step_ll;

        out.pred_means.push_back(std::move(pred_mean));
        out.pred_covs.push_back(std::move(pred_cov));
        out.means.push_back(mean);
        out.covs.push_back(cov);
        if (n == n_steps - 1) out.last_gain = gain;
    }
    return out;
}

SmootherResult rts_smoother(const SliceLDSParams& params, const FilterResult& filt) {
    const auto n_steps = static_cast<int>(filt.means.size());
    if (n_steps < 1) throw ConfigError("rts_smoother: empty filter output");

    SmootherResult out;
    out.filtered_means = filt.means;
    out.filtered_covs = filt.covs;
    out.log_likelihood = filt.log_likelihood;
    out.smoothed_means.resize(filt.means.size());
    out.smoothed_covs.resize(filt.covs.size());

    out.smoothed_means[static_cast<size_t>(n_steps - 1)] = filt.means.back();
    out.smoothed_covs[static_cast<size_t>(n_steps - 1)] = filt.covs.back();
    if (n_steps == 1) return out;

    // Smoother gains J_n for transitions n -> n+1.
    std::vector<Matrix> gains(static_cast<size_t>(n_steps - 1));
    for (int n = 0; n < n_steps - 1; ++n) {
        Eigen::LDLT<Matrix> ldlt(filt.pred_covs[static_cast<size_t>(n + 1)]);
        if (ldlt.info() != Eigen::Success)
            throw NumericError("rts_smoother: singular predicted covariance at step " +
                               std::to_string(n + 2));
        gains[static_cast<size_t>(n)] =
            ldlt.solve(params.a * filt.covs[static_cast<size_t>(n)]).adjoint();
        check_finite(gains[static_cast<size_t>(n)], "smoother gain", n);
    }

    for (int n = n_steps - 2; n >= 0; --n) {
        const auto un = static_cast<size_t>(n);
        const Matrix& g = gains[un];
        out.smoothed_means[un] =
            filt.means[un] + g * (out.smoothed_means[un + 1] - filt.pred_means[un + 1]);
        Matrix cov = filt.covs[un] +
                     g * (out.smoothed_covs[un + 1] - filt.pred_covs[un + 1]) * g.adjoint();
        out.smoothed_covs[un] = 0.5 * (cov + cov.adjoint());
        check_finite(out.smoothed_covs[un], "smoothed covariance", n);
    }

    // Lag-one covariances Cov(x_{n+1}, x_n | all data).
    out.lag_one_covs.resize(static_cast<size_t>(n_steps - 1));
    const auto last = static_cast<size_t>(n_steps - 1);
    const Eigen::Index j = params.latent_dim();
    out.lag_one_covs[last - 1] = (Matrix::Identity(j, j) - filt.last_gain * params.c) *
                                 params.a * filt.covs[last - 1];
    for (int n = n_steps - 2; n >= 1; --n) {
        const auto un = static_cast<size_t>(n);
        out.lag_one_covs[un - 1] =
            filt.covs[un] * gains[un - 1].adjoint() +
            gains[un] * (out.lag_one_covs[un] - params.a * filt.covs[un]) *
                gains[un - 1].adjoint();
    }
    return out;
}

namespace {

void m_step(SliceLDSParams& params, const SmootherResult& sm,
            const std::vector<Vector>& obs, CovarianceMode mode) {
    const auto n_steps = static_cast<int>(obs.size());
    const Eigen::Index j = params.latent_dim();

    // Second moments E[x_n x_n^H] and E[x_n x_{n-1}^H].
    std::vector<Matrix> xx(static_cast<size_t>(n_steps));
    for (int n = 0; n < n_steps; ++n) {
        const auto un = static_cast<size_t>(n);
        xx[un] = sm.smoothed_covs[un] +
                 sm.smoothed_means[un] * sm.smoothed_means[un].adjoint();
    }
    std::vector<Matrix> xlag(static_cast<size_t>(std::max(0, n_steps - 1)));
    for (int n = 1; n < n_steps; ++n) {
        const auto un = static_cast<size_t>(n);
        xlag[un - 1] = sm.lag_one_covs[un - 1] +
                       sm.smoothed_means[un] * sm.smoothed_means[un - 1].adjoint();
    }

    // Projection and observation noise.
    Matrix sum_yx = Matrix::Zero(params.obs_dim(), j);
    Matrix sum_xx = Matrix::Zero(j, j);
    for (int n = 0; n < n_steps; ++n) {
        const auto un = static_cast<size_t>(n);
        sum_yx += obs[un] * sm.smoothed_means[un].adjoint();
        sum_xx += xx[un];
    }
    params.c = solve_right(sum_yx, sum_xx, "M-step projection update");
    Matrix r_acc = Matrix::Zero(params.obs_dim(), params.obs_dim());
    for (int n = 0; n < n_steps; ++n) {
        const auto un = static_cast<size_t>(n);
        const Vector resid = obs[un] - params.c * sm.smoothed_means[un];
        r_acc += resid * resid.adjoint() +
                 params.c * sm.smoothed_covs[un] * params.c.adjoint();
    }
    params.r = repair_covariance(r_acc / static_cast<double>(n_steps), mode);

    // Transition and process noise: need at least one observed transition.
    if (n_steps >= 2) {
        Matrix sum_lag = Matrix::Zero(j, j);
        Matrix sum_prev = Matrix::Zero(j, j);
        for (int n = 1; n < n_steps; ++n) {
            sum_lag += xlag[static_cast<size_t>(n - 1)];
            sum_prev += xx[static_cast<size_t>(n - 1)];
        }
        params.a = solve_right(sum_lag, sum_prev, "M-step transition update");
        Matrix q_acc = Matrix::Zero(j, j);
        for (int n = 1; n < n_steps; ++n) {
            const auto un = static_cast<size_t>(n);
            q_acc += xx[un] - params.a * xlag[un - 1].adjoint() -
                     xlag[un - 1] * params.a.adjoint() +
                     params.a * xx[un - 1] * params.a.adjoint();
        }
        params.q = repair_covariance(q_acc / static_cast<double>(n_steps - 1), mode);
    }

    params.u0 = sm.smoothed_means[0];
    params.q0 = repair_covariance(sm.smoothed_covs[0], mode);
}

}  // namespace

EMResult em_fit(const SliceLDSParams& init, const std::vector<Vector>& obs,
                const EMOptions& opts) {
    if (opts.max_iters < 1) throw ConfigError("em_fit: max_iters must be >= 1");
    init.validate();

    EMResult out;
    out.params = init;
    double prev_ll = 0.0;
    for (int iter = 1; iter <= opts.max_iters; ++iter) {
        SmootherResult sm;
        try {
            sm = rts_smoother(out.params, kalman_filter(out.params, obs));
        } catch (const NumericError& e) {
            throw NumericError("EM iteration " + std::to_string(iter) + ": " + e.what());
        }
        const double ll = sm.log_likelihood;
        out.loglik_trace.push_back(ll);
        if (iter > 1 && ll - prev_ll < opts.tol * std::max(1.0, std::abs(prev_ll)))
            break;
        prev_ll = ll;
        m_step(out.params, sm, obs, opts.mode);
    }

    // Final E-step: latent estimate at the end of training under final params.
    const SmootherResult final_sm =
        rts_smoother(out.params, kalman_filter(out.params, obs));
    out.last_smoothed_mean = final_sm.smoothed_means.back();
    out.final_log_likelihood = final_sm.log_likelihood;
    return out;
}

Trajectory sample_trajectory(const SliceLDSParams& params, int n_steps,
                             uint64_t seed, bool real_noise) {
    if (n_steps < 1) throw ConfigError("sample_trajectory: n_steps must be >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    auto draw = [&](Eigen::Index n) {
        Vector v(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (real_noise) {
                v(i) = Complex(gauss(rng), 0.0);
            } else {
                const double re = gauss(rng);
                const double im = gauss(rng);
                v(i) = Complex(re * inv_sqrt2, im * inv_sqrt2);
            }
        }
        return v;
    };

    const Matrix f_q0 = psd_sqrt_factor(params.q0);
    const Matrix f_q = psd_sqrt_factor(params.q);
    const Matrix f_r = psd_sqrt_factor(params.r);

    Trajectory t;
    t.latents.reserve(static_cast<size_t>(n_steps));
    t.observations.reserve(static_cast<size_t>(n_steps));
    Vector x;
    for (int n = 0; n < n_steps; ++n) {
        if (n == 0)
            x = params.u0 + f_q0 * draw(params.latent_dim());
        else
            x = params.a * x + f_q * draw(params.latent_dim());
        t.latents.push_back(x);
        t.observations.push_back(params.c * x + f_r * draw(params.obs_dim()));
    }
    return t;
}

std::vector<Vector> forecast(const SliceLDSParams& params, const Vector& last_mean,
                             int horizon) {
    if (horizon < 1) throw ConfigError("forecast: horizon must be >= 1");
    if (last_mean.size() != params.latent_dim())
        throw ConfigError("forecast: latent mean dimension mismatch");
    std::vector<Vector> out;
    out.reserve(static_cast<size_t>(horizon));
    Vector state = last_mean;
    for (int h = 0; h < horizon; ++h) {
        state = params.a * state;
        out.emplace_back(params.c * state);
    }
    return out;
}

}  // namespace lmlds
