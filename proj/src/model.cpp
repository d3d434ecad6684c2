#include "lmlds/model.hpp"

#include <atomic>
#include <random>
#include <thread>

#include <Eigen/SVD>

namespace lmlds {

namespace {

constexpr double kImagErrorThreshold = 1e-6;

void fill_standard_normal(std::mt19937_64& rng, Matrix& m, bool real_valued) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            if (real_valued) {
                m(i, j) = Complex(gauss(rng), 0.0);
            } else {
                const double re = gauss(rng);
                const double im = gauss(rng);
                m(i, j) = Complex(re * inv_sqrt2, im * inv_sqrt2);
            }
        }
}

Matrix left_singular_vectors(const Matrix& m, Eigen::Index count, bool real_valued) {
    if (real_valued) {
        Eigen::JacobiSVD<RealMatrix> svd(m.real(), Eigen::ComputeThinU);
        return svd.matrixU().leftCols(count).cast<Complex>();
    }
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
    return svd.matrixU().leftCols(count);
}

// Runs fn(k) for k in [0, count); exceptions are re-raised in slice order
// with the slice index attached. Results are identical for any worker count.
template <typename Fn>
void for_each_slice(Eigen::Index count, int workers, Fn&& fn) {
    std::vector<std::exception_ptr> errors(static_cast<size_t>(count));
    int n_workers = workers > 0
                        ? workers
                        : static_cast<int>(std::thread::hardware_concurrency());
    n_workers = std::max(1, std::min<int>(n_workers, static_cast<int>(count)));

    if (n_workers == 1) {
        for (Eigen::Index k = 0; k < count; ++k) {
            try {
                fn(k);
            } catch (...) {
                errors[static_cast<size_t>(k)] = std::current_exception();
            }
        }
    } else {
        std::atomic<Eigen::Index> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(n_workers));
        for (int w = 0; w < n_workers; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    const Eigen::Index k = next.fetch_add(1);
                    if (k >= count) return;
                    try {
                        fn(k);
                    } catch (...) {
                        errors[static_cast<size_t>(k)] = std::current_exception();
                    }
                }
            });
        for (auto& t : pool) t.join();
    }

    for (Eigen::Index k = 0; k < count; ++k) {
        if (!errors[static_cast<size_t>(k)]) continue;
        const std::string where = "slice " + std::to_string(k + 1) + ": ";
        try {
            std::rethrow_exception(errors[static_cast<size_t>(k)]);
        } catch (const NumericError& e) {
            throw NumericError(where + e.what());
        } catch (const ConfigError& e) {
            throw ConfigError(where + e.what());
        } catch (const DataError& e) {
            throw DataError(where + e.what());
        }
    }
}

bool dft_slice_is_real(Eigen::Index k, Eigen::Index tubes) {
    return k == 0 || 2 * k == tubes;
}

}  // namespace

ModelFamily model_family_from_string(std::string_view s) {
    if (s == "lds") return ModelFamily::LDS;
    if (s == "mlds") return ModelFamily::MLDS;
    if (s == "lmlds") return ModelFamily::L_MLDS;
    throw ConfigError("unknown model family: " + std::string(s));
}

uint64_t derive_seed(uint64_t master, uint64_t index) {
    // splitmix64 finalizer over master advanced by the slice index
    uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

void LMLDSModel::validate() const {
    if (rows < 1 || latent < 1 || tubes < 1)
        throw ConfigError("LMLDSModel: dimensions must be positive");
    if (static_cast<Eigen::Index>(slices.size()) != tubes)
        throw DataError("LMLDSModel: slice count does not match tube dimension");
    for (const auto& s : slices) {
        if (s.latent_dim() != latent || s.obs_dim() != rows)
            throw DataError("LMLDSModel: slice parameter dimensions inconsistent");
        s.validate();
    }
    if (!last_means.empty()) {
        if (static_cast<Eigen::Index>(last_means.size()) != tubes)
            throw DataError("LMLDSModel: latent-state count does not match tubes");
        for (const auto& m : last_means)
            if (m.size() != latent)
                throw DataError("LMLDSModel: latent-state dimension inconsistent");
    }
}

SliceLDSParams init_slice_params(Eigen::Index obs_dim, Eigen::Index latent_dim,
                                 uint64_t seed, bool real_valued) {
    if (obs_dim < 1 || latent_dim < 1)
        throw ConfigError("init_slice_params: dimensions must be positive");
    if (latent_dim > obs_dim)
        throw ConfigError("init_slice_params: latent dimension exceeds observation dimension");
    std::mt19937_64 rng(seed);

    SliceLDSParams p;
    Matrix u0(latent_dim, 1);
    fill_standard_normal(rng, u0, real_valued);
    p.u0 = u0.col(0);

    Matrix ga(latent_dim, latent_dim);
    fill_standard_normal(rng, ga, real_valued);
    p.a = left_singular_vectors(ga, latent_dim, real_valued);

    Matrix gc(obs_dim, latent_dim);
    fill_standard_normal(rng, gc, real_valued);
    p.c = left_singular_vectors(gc, latent_dim, real_valued);

    p.q0 = Matrix::Identity(latent_dim, latent_dim);
    p.q = Matrix::Identity(latent_dim, latent_dim);
    p.r = Matrix::Identity(obs_dim, obs_dim);
    return p;
}

LMLDSModel init_model(Eigen::Index rows, Eigen::Index latent, Eigen::Index tubes,
                      TransformKind kind, CovarianceMode mode, uint64_t seed) {
    if (rows < 1 || latent < 1 || tubes < 1)
        throw ConfigError("init_model: dimensions must be positive");
    if (latent > rows)
        throw ConfigError("init_model: latent dimension must not exceed row dimension");
    require_length(kind, tubes);

    LMLDSModel model;
    model.kind = kind;
    model.rows = rows;
    model.latent = latent;
    model.tubes = tubes;
    model.mode = mode;
    model.seed = seed;
    model.slices.resize(static_cast<size_t>(tubes));
    for (Eigen::Index k = 0; k < tubes; ++k) {
        if (kind == TransformKind::Dft && 2 * k > tubes) {
            // Mirror slice: conjugate of its partner keeps real series real.
            model.slices[static_cast<size_t>(k)] =
                model.slices[static_cast<size_t>(tubes - k)].conjugated();
        } else {
            const bool real_valued =
                kind != TransformKind::Dft || dft_slice_is_real(k, tubes);
            model.slices[static_cast<size_t>(k)] = init_slice_params(
                rows, latent, derive_seed(seed, static_cast<uint64_t>(k)), real_valued);
        }
    }
    return model;
}

Eigen::Index independent_slice_count(TransformKind kind, Eigen::Index tubes,
                                     bool exploit_symmetry) {
    if (kind == TransformKind::Dft && exploit_symmetry) return tubes / 2 + 1;
    return tubes;
}

TrainResult train(const TensorSeries& series, int n_train, Eigen::Index latent,
                  TransformKind kind, CovarianceMode mode, uint64_t seed,
                  const TrainOptions& opts) {
    series.validate();
    if (n_train < 2) throw ConfigError("train: need at least 2 training epochs");
    if (n_train > series.length())
        throw ConfigError("train: training length " + std::to_string(n_train) +
                          " exceeds series length " + std::to_string(series.length()));
    require_length(kind, series.tubes);

    const Eigen::Index rows = series.rows;
    const Eigen::Index tubes = series.tubes;

    LMLDSModel model = init_model(rows, latent, tubes, kind, mode, seed);
    model.n_train = n_train;

    // Transform each observation along mode 3; slice k then sees column k.
    const Matrix fwd = transform_matrix(kind, tubes);
    std::vector<std::vector<Vector>> slice_obs(
        static_cast<size_t>(tubes), std::vector<Vector>(static_cast<size_t>(n_train)));
    for (int n = 0; n < n_train; ++n) {
        const Matrix transformed =
            series.observations[static_cast<size_t>(n)].cast<Complex>() * fwd.transpose();
        for (Eigen::Index k = 0; k < tubes; ++k)
            slice_obs[static_cast<size_t>(k)][static_cast<size_t>(n)] =
                transformed.col(k);
    }

    const Eigen::Index n_fit =
        independent_slice_count(kind, tubes, opts.exploit_conjugate_symmetry);

    TrainResult out;
    out.model = std::move(model);
    out.traces.resize(static_cast<size_t>(tubes));
    out.em_iters.resize(static_cast<size_t>(tubes), 0);
    out.model.last_means.resize(static_cast<size_t>(tubes));

    for_each_slice(n_fit, opts.workers, [&](Eigen::Index k) {
        const auto uk = static_cast<size_t>(k);
        EMResult fit = em_fit(out.model.slices[uk], slice_obs[uk], opts.em);
        out.model.slices[uk] = std::move(fit.params);
        out.model.last_means[uk] = std::move(fit.last_smoothed_mean);
        out.em_iters[uk] = static_cast<int>(fit.loglik_trace.size());
        out.traces[uk] = std::move(fit.loglik_trace);
    });

    for (Eigen::Index k = n_fit; k < tubes; ++k) {
        const auto uk = static_cast<size_t>(k);
        const auto um = static_cast<size_t>(tubes - k);
        out.model.slices[uk] = out.model.slices[um].conjugated();
        out.model.last_means[uk] = out.model.last_means[um].conjugate();
        out.em_iters[uk] = out.em_iters[um];
        out.traces[uk] = out.traces[um];
    }
    return out;
}

TrainResult fit_baseline_lds(const TensorSeries& series, int n_train,
                             Eigen::Index latent, CovarianceMode mode, uint64_t seed,
                             const TrainOptions& opts) {
    series.validate();
    TensorSeries flat;
    flat.name = series.name;
    flat.rows = series.rows * series.tubes;
    flat.tubes = 1;
    flat.observations.reserve(series.observations.size());
    for (const auto& y : series.observations)
        flat.observations.push_back(
            Eigen::Map<const RealMatrix>(y.data(), flat.rows, 1));

    TrainResult out = train(flat, n_train, latent, TransformKind::Identity, mode,
                            seed, opts);
    out.model.flattened_rows = series.rows;
    out.model.flattened_tubes = series.tubes;
    return out;
}

std::vector<RealMatrix> predict(const LMLDSModel& model,
                                const std::vector<Vector>& last_means, int horizon,
                                double* max_imag_out) {
    if (horizon < 1) throw ConfigError("predict: horizon must be >= 1");
    if (static_cast<Eigen::Index>(last_means.size()) != model.tubes)
        throw ConfigError("predict: need one latent state per slice");

    std::vector<std::vector<Vector>> slice_fc(static_cast<size_t>(model.tubes));
    for (Eigen::Index k = 0; k < model.tubes; ++k)
        slice_fc[static_cast<size_t>(k)] = forecast(
            model.slices[static_cast<size_t>(k)], last_means[static_cast<size_t>(k)],
            horizon);

    const Matrix inv = inverse_transform_matrix(model.kind, model.tubes);
    double max_imag = 0.0;
    std::vector<RealMatrix> out;
    out.reserve(static_cast<size_t>(horizon));
    for (int h = 0; h < horizon; ++h) {
        Matrix transformed(model.rows, model.tubes);
        for (Eigen::Index k = 0; k < model.tubes; ++k)
            transformed.col(k) = slice_fc[static_cast<size_t>(k)][static_cast<size_t>(h)];
        const Matrix y = transformed * inv.transpose();
        max_imag = std::max(max_imag, y.imag().cwiseAbs().maxCoeff());
        RealMatrix yr = y.real();
        if (model.is_baseline())
            out.emplace_back(Eigen::Map<const RealMatrix>(
                yr.data(), model.flattened_rows, model.flattened_tubes));
        else
            out.push_back(std::move(yr));
    }
    if (max_imag > kImagErrorThreshold)
        throw NumericError("predict: reconstruction failure, imaginary residue " +
                           std::to_string(max_imag) + " exceeds 1e-6");
    if (max_imag_out) *max_imag_out = max_imag;
    return out;
}

std::vector<RealMatrix> predict(const LMLDSModel& model, int horizon,
                                double* max_imag_out) {
    if (model.last_means.empty())
        throw ConfigError("predict: model has no stored latent state (untrained?)");
    return predict(model, model.last_means, horizon, max_imag_out);
}

long long param_count(ModelFamily family, long long rows, long long latent,
                      long long tubes) {
    if (rows < 1 || latent < 1 || tubes < 1)
        throw ConfigError("param_count: dimensions must be positive");
    const long long i = rows, j = latent, k = tubes;
    switch (family) {
        case ModelFamily::LDS:
            return (j * k) * (j * k) + i * j * k * k + 2 * (j * k) * (j * k) +
                   (i * k) * (i * k);
        case ModelFamily::MLDS:
            return i * j + j * j + 2 * k * k + (i * k) * (i * k) +
                   2 * (j * k) * (j * k);
        case ModelFamily::L_MLDS:
            return j * j * k + i * j * k + 2 * j * j * k + i * i * k;
    }
    throw ConfigError("param_count: unknown family");
}

Eigen::Index latent_dim_for_budget(ModelFamily family, Eigen::Index rows,
                                   Eigen::Index tubes, long long budget) {
    if (family == ModelFamily::L_MLDS) {
        if (param_count(family, rows, 1, tubes) > budget)
            throw ConfigError("latent_dim_for_budget: no latent dimension fits budget " +
                              std::to_string(budget));
        Eigen::Index j = 1;
        while (param_count(family, rows, j + 1, tubes) <= budget) ++j;
        return j;
    }
    if (family == ModelFamily::LDS) {
        Eigen::Index j = 1;
        while (param_count(family, rows, j, tubes) < budget) ++j;
        return j;
    }
    throw ConfigError("latent_dim_for_budget: rule defined only for lds and lmlds");
}

}  // namespace lmlds
