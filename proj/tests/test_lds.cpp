#include <doctest.h>

#include "lmlds/lds.hpp"
#include "oracle.hpp"
#include "test_util.hpp"

using namespace lmlds;
using namespace lmlds::testing;

namespace {

SliceLDSParams scalar_system(Complex a, Complex c, double q, double r, Complex u0,
                             double q0) {
    SliceLDSParams p;
    p.u0 = Vector::Constant(1, u0);
    p.q0 = Matrix::Constant(1, 1, q0);
    p.a = Matrix::Constant(1, 1, a);
    p.q = Matrix::Constant(1, 1, q);
    p.c = Matrix::Constant(1, 1, c);
    p.r = Matrix::Constant(1, 1, r);
    return p;
}

}  // namespace

TEST_CASE("filter tracks observations when state noise dwarfs sensor noise") {
    std::vector<Vector> obs;
    for (double v : {1.5, -0.25, 3.0, 0.75})
        obs.push_back(Vector::Constant(1, Complex(v)));
    const SliceLDSParams p = scalar_system(1.0, 1.0, 1e4, 1e-4, 0.0, 1e4);
    const FilterResult f = kalman_filter(p, obs);
    for (size_t n = 0; n < obs.size(); ++n)
        CHECK(std::abs(f.means[n](0) - obs[n](0)) < 1e-6);
}

TEST_CASE("single-step filter equals the conditional-Gaussian posterior") {
    std::mt19937_64 rng(101);
    const SliceLDSParams p = random_stable_system(rng, 3, 2);
    const std::vector<Vector> obs = random_observations(rng, 3, 1);

    const FilterResult f = kalman_filter(p, obs);
    // Sigma = (q0^-1 + c^H r^-1 c)^-1, mean = Sigma (c^H r^-1 y + q0^-1 u0)
    const Matrix q0_inv = p.q0.inverse();
    const Matrix r_inv = p.r.inverse();
    const Matrix sigma = (q0_inv + p.c.adjoint() * r_inv * p.c).inverse();
    const Vector mean = sigma * (p.c.adjoint() * r_inv * obs[0] + q0_inv * p.u0);
    CHECK((f.means[0] - mean).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((f.covs[0] - sigma).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("single-step log-likelihood equals the marginal CN density") {
    std::mt19937_64 rng(103);
    const SliceLDSParams p = random_stable_system(rng, 2, 2);
    const std::vector<Vector> obs = random_observations(rng, 2, 1);

    const FilterResult f = kalman_filter(p, obs);
    const Matrix s = p.c * p.q0 * p.c.adjoint() + p.r;
    const Vector e = obs[0] - p.c * p.u0;
    const double expected = -2.0 * std::log(std::numbers::pi) -
                            std::log(s.determinant().real()) -
                            e.dot(s.inverse() * e).real();
    CHECK(f.log_likelihood == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("filter and smoother match exact joint-Gaussian conditioning") {
    std::mt19937_64 rng(107);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index obs_dim = 2 + static_cast<Eigen::Index>(rng() % 2);
        const Eigen::Index lat_dim = 2 + static_cast<Eigen::Index>(rng() % 2);
        const int n = 2 + static_cast<int>(rng() % 3);
        const SliceLDSParams p = random_stable_system(rng, obs_dim, lat_dim);
        const auto obs = random_observations(rng, obs_dim, n);

        const JointPosterior oracle = exact_posterior_bruteforce(p, obs);
        const FilterResult f = kalman_filter(p, obs);
        const SmootherResult sm = rts_smoother(p, f);

        // filtered marginal at N equals the full posterior at N
        CHECK((f.means.back() - oracle.means.back()).cwiseAbs().maxCoeff() < 1e-8);
        CHECK(f.log_likelihood == doctest::Approx(oracle.log_likelihood).epsilon(1e-8));
        for (int t = 0; t < n; ++t) {
            const auto ut = static_cast<size_t>(t);
            CHECK((sm.smoothed_means[ut] - oracle.means[ut]).cwiseAbs().maxCoeff() < 1e-8);
            CHECK((sm.smoothed_covs[ut] - oracle.covs[ut]).cwiseAbs().maxCoeff() < 1e-8);
        }
        for (int t = 0; t + 1 < n; ++t) {
            const auto ut = static_cast<size_t>(t);
            CHECK((sm.lag_one_covs[ut] - oracle.lag_one_covs[ut]).cwiseAbs().maxCoeff() <
                  1e-8);
        }
    }
}

TEST_CASE("oracle decouples across steps when the transition is zero") {
    std::mt19937_64 rng(109);
    SliceLDSParams p = random_stable_system(rng, 2, 2);
    p.a.setZero();
    p.u0.setZero();
    p.q0 = p.q;  // every step is then an i.i.d. draw
    const auto obs = random_observations(rng, 2, 3);
    const JointPosterior oracle = exact_posterior_bruteforce(p, obs);
    // posterior for step t must match the single-observation posterior on y_t
    for (int t = 0; t < 3; ++t) {
        const JointPosterior single =
            exact_posterior_bruteforce(p, {obs[static_cast<size_t>(t)]});
        CHECK((oracle.means[static_cast<size_t>(t)] - single.means[0])
                  .cwiseAbs()
                  .maxCoeff() < 1e-10);
    }
}

TEST_CASE("smoother equals filter at the final step") {
    std::mt19937_64 rng(113);
    const SliceLDSParams p = random_stable_system(rng, 2, 2);
    const auto obs = random_observations(rng, 2, 6);
    const FilterResult f = kalman_filter(p, obs);
    const SmootherResult sm = rts_smoother(p, f);
    CHECK((sm.smoothed_means.back() - f.means.back()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((sm.smoothed_covs.back() - f.covs.back()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("smoother recovers latents through an invertible projection, low noise") {
    std::mt19937_64 rng(127);
    SliceLDSParams p = random_stable_system(rng, 2, 2);
    p.q.setZero();
    p.r = 1e-10 * Matrix::Identity(2, 2);
    const Trajectory traj = sample_trajectory(p, 5, 999);
    const SmootherResult sm = rts_smoother(p, kalman_filter(p, traj.observations));
    const Matrix c_inv = p.c.inverse();
    for (size_t n = 0; n < traj.observations.size(); ++n)
        CHECK((sm.smoothed_means[n] - c_inv * traj.observations[n]).cwiseAbs().maxCoeff() <
              1e-4);
}

TEST_CASE("filter reports the failing step for a singular innovation covariance") {
    const SliceLDSParams p = scalar_system(1.0, 0.0, 0.0, 0.0, 1.0, 0.0);
    std::vector<Vector> obs{Vector::Constant(1, Complex(1.0))};
    CHECK_THROWS_WITH_AS(kalman_filter(p, obs),
                         "singular innovation covariance at step 1", NumericError);
}

TEST_CASE("filter and smoother preserve Hermitian PSD covariances") {
    std::mt19937_64 rng(131);
    const SliceLDSParams p = random_stable_system(rng, 3, 2);
    const auto obs = random_observations(rng, 3, 10);
    const SmootherResult sm = rts_smoother(p, kalman_filter(p, obs));
    for (const auto& cov : sm.filtered_covs) CHECK(is_hermitian_psd(cov, 1e-10, -1e-10));
    for (const auto& cov : sm.smoothed_covs) CHECK(is_hermitian_psd(cov, 1e-10, -1e-10));
}

TEST_CASE("em log-likelihood trace is monotone on random problems") {
    std::mt19937_64 rng(137);
    for (auto mode : {CovarianceMode::Full, CovarianceMode::Diagonal}) {
        for (int trial = 0; trial < 5; ++trial) {
            const SliceLDSParams truth = random_stable_system(rng, 3, 2);
            const Trajectory traj =
                sample_trajectory(truth, 200, 1000 + static_cast<uint64_t>(trial));
            const SliceLDSParams init = random_stable_system(rng, 3, 2);
            EMOptions opts;
            opts.max_iters = 30;
            opts.tol = 0.0;
            opts.mode = mode;
            const EMResult fit = em_fit(init, traj.observations, opts);
            for (size_t i = 1; i < fit.loglik_trace.size(); ++i)
                CHECK(fit.loglik_trace[i] >= fit.loglik_trace[i - 1] - 1e-8);
            CHECK(fit.loglik_trace.back() >= fit.loglik_trace.front());
        }
    }
}

TEST_CASE("a converged em fit is a fixed point of one more iteration") {
    std::mt19937_64 rng(139);
    const SliceLDSParams truth = random_stable_system(rng, 2, 1);
    const Trajectory traj = sample_trajectory(truth, 300, 4242);
    EMOptions opts;
    opts.max_iters = 2000;
    opts.tol = 1e-9;
    const EMResult fit = em_fit(random_stable_system(rng, 2, 1), traj.observations, opts);
    REQUIRE(fit.loglik_trace.size() < 2000);  // actually converged

    EMOptions one;
    one.max_iters = 1;
    const EMResult refit = em_fit(fit.params, traj.observations, one);
    CHECK(refit.final_log_likelihood ==
          doctest::Approx(fit.final_log_likelihood).epsilon(1e-9));
    CHECK((refit.params.a - fit.params.a).cwiseAbs().maxCoeff() < 1e-3);
    CHECK((refit.params.c - fit.params.c).cwiseAbs().maxCoeff() < 1e-3);
    CHECK((refit.params.q - fit.params.q).cwiseAbs().maxCoeff() < 1e-3);
    CHECK((refit.params.r - fit.params.r).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("single observation leaves transition parameters untouched") {
    std::mt19937_64 rng(149);
    const SliceLDSParams init = random_stable_system(rng, 2, 2);
    const auto obs = random_observations(rng, 2, 1);
    EMOptions opts;
    opts.max_iters = 5;
    const EMResult fit = em_fit(init, obs, opts);
    CHECK((fit.params.a - init.a).cwiseAbs().maxCoeff() == 0.0);
    CHECK((fit.params.q - init.q).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("em covariance outputs satisfy the parameter invariants") {
    std::mt19937_64 rng(151);
    for (auto mode : {CovarianceMode::Full, CovarianceMode::Diagonal}) {
        const SliceLDSParams truth = random_stable_system(rng, 3, 2);
        const Trajectory traj = sample_trajectory(truth, 100, 77);
        EMOptions opts;
        opts.max_iters = 20;
        opts.mode = mode;
        const EMResult fit = em_fit(random_stable_system(rng, 3, 2), traj.observations,
                                    opts);
        fit.params.validate();
        if (mode == CovarianceMode::Diagonal) {
            auto off_diag_max = [](const Matrix& m) {
                Matrix t = m;
                t.diagonal().setZero();
                return t.cwiseAbs().maxCoeff();
            };
            CHECK(off_diag_max(fit.params.q0) == 0.0);
            CHECK(off_diag_max(fit.params.q) == 0.0);
            CHECK(off_diag_max(fit.params.r) == 0.0);
        }
    }
}

TEST_CASE("real parameters and data stay real through inference and em") {
    std::mt19937_64 rng(157);
    SliceLDSParams p = random_stable_system(rng, 3, 2);
    p.u0 = p.u0.real().cast<Complex>();
    p.q0 = p.q0.real().cast<Complex>();
    p.a = p.a.real().cast<Complex>();
    p.q = p.q.real().cast<Complex>();
    p.c = p.c.real().cast<Complex>();
    p.r = p.r.real().cast<Complex>();
    p.q0 = make_hermitian_psd(p.q0);
    p.q = make_hermitian_psd(p.q);
    p.r = make_hermitian_psd(p.r);

    const Trajectory traj = sample_trajectory(p, 50, 5, /*real_noise=*/true);
    for (const auto& y : traj.observations) CHECK(y.imag().cwiseAbs().maxCoeff() <= 1e-12);

    EMOptions opts;
    opts.max_iters = 10;
    const EMResult fit = em_fit(p, traj.observations, opts);
    CHECK(fit.params.a.imag().cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(fit.params.c.imag().cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(fit.params.q.imag().cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(fit.params.r.imag().cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(fit.last_smoothed_mean.imag().cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("zero-noise trajectory follows the deterministic orbit") {
    std::mt19937_64 rng(163);
    SliceLDSParams p = random_stable_system(rng, 2, 2);
    p.q0.setZero();
    p.q.setZero();
    p.r.setZero();
    const Trajectory traj = sample_trajectory(p, 6, 11);
    Vector x = p.u0;
    for (int n = 0; n < 6; ++n) {
        if (n > 0) x = p.a * x;
        CHECK((traj.observations[static_cast<size_t>(n)] - p.c * x).cwiseAbs().maxCoeff() <
              1e-12);
    }
}

TEST_CASE("zero transition gives iid observations") {
    std::mt19937_64 rng(167);
    SliceLDSParams p = random_stable_system(rng, 2, 2);
    p.a.setZero();
    p.c = Matrix::Identity(2, 2);
    p.r.setZero();
    const Trajectory traj = sample_trajectory(p, 4, 21);
    for (size_t n = 1; n < 4; ++n)
        CHECK((traj.observations[n] - traj.latents[n]).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("empirical covariance of initial draws matches q0") {
    std::mt19937_64 rng(173);
    SliceLDSParams p = random_stable_system(rng, 2, 2);
    const int n_samples = 10000;
    Matrix acc = Matrix::Zero(2, 2);
    for (int s = 0; s < n_samples; ++s) {
        const Trajectory traj = sample_trajectory(p, 1, 50000 + static_cast<uint64_t>(s));
        const Vector centered = traj.latents[0] - p.u0;
        acc += centered * centered.adjoint();
    }
    acc /= static_cast<double>(n_samples);
    CHECK((acc - p.q0).norm() / p.q0.norm() < 0.05);
}

TEST_CASE("trajectories are deterministic given the seed") {
    std::mt19937_64 rng(179);
    const SliceLDSParams p = random_stable_system(rng, 2, 2);
    const Trajectory a = sample_trajectory(p, 10, 31);
    const Trajectory b = sample_trajectory(p, 10, 31);
    const Trajectory c = sample_trajectory(p, 10, 32);
    for (size_t n = 0; n < 10; ++n)
        CHECK(a.observations[n] == b.observations[n]);
    CHECK(a.observations[0] != c.observations[0]);
}

TEST_CASE("forecast with identity dynamics repeats the projection") {
    std::mt19937_64 rng(181);
    SliceLDSParams p = random_stable_system(rng, 3, 2);
    p.a = Matrix::Identity(2, 2);
    const Vector mean = random_complex_matrix(rng, 2, 1).col(0);
    const auto fc = forecast(p, mean, 4);
    for (const auto& y : fc) CHECK((y - p.c * mean).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("scalar forecast hand check") {
    const SliceLDSParams p = scalar_system(0.5, 2.0, 0.0, 0.0, 1.0, 0.0);
    const auto fc = forecast(p, Vector::Constant(1, Complex(1.0)), 3);
    CHECK(std::abs(fc[0](0) - Complex(1.0)) < 1e-14);
    CHECK(std::abs(fc[1](0) - Complex(0.5)) < 1e-14);
    CHECK(std::abs(fc[2](0) - Complex(0.25)) < 1e-14);

    // horizon one is c * a * mean by definition
    const auto one = forecast(p, Vector::Constant(1, Complex(3.0)), 1);
    CHECK(std::abs(one[0](0) - Complex(3.0)) < 1e-14);
}
