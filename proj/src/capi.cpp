#include "lmlds/capi.h"

#include <cstring>
#include <string>

#include "lmlds/model_io.hpp"

struct lmlds_series {
    lmlds::TensorSeries s;
};

struct lmlds_model {
    lmlds::LMLDSModel m;
    std::vector<std::vector<double>> traces;  // from training, not persisted
};

namespace {

thread_local std::string g_last_error;

lmlds_status fail(lmlds_status code, const std::string& msg) {
    g_last_error = msg;
    return code;
}

template <typename Fn>
lmlds_status guarded(Fn&& fn) {
    try {
        fn();
        return LMLDS_OK;
    } catch (const lmlds::ConfigError& e) {
        return fail(LMLDS_ERR_CONFIG, e.what());
    } catch (const lmlds::DataError& e) {
        return fail(LMLDS_ERR_DATA, e.what());
    } catch (const lmlds::NumericError& e) {
        return fail(LMLDS_ERR_NUMERIC, e.what());
    } catch (const lmlds::IoError& e) {
        return fail(LMLDS_ERR_IO, e.what());
    } catch (const std::exception& e) {
        return fail(LMLDS_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(LMLDS_ERR_INTERNAL, "unknown error");
    }
}

lmlds_status require(bool ok, const char* msg) {
    return ok ? LMLDS_OK : fail(LMLDS_ERR_CONFIG, msg);
}

}  // namespace

extern "C" {

const char* lmlds_version(void) { return "1.0.0"; }

const char* lmlds_last_error(void) { return g_last_error.c_str(); }

lmlds_status lmlds_series_load(const char* manifest_path, const char* data_path,
                               lmlds_series** out) {
    if (auto rc = require(manifest_path && data_path && out, "null argument")) return rc;
    return guarded([&] {
        auto* h = new lmlds_series{lmlds::load_series(manifest_path, data_path)};
        *out = h;
    });
}

lmlds_status lmlds_series_save(const lmlds_series* series, const char* manifest_path,
                               const char* data_path, int overwrite) {
    if (auto rc = require(series && manifest_path && data_path, "null argument"))
        return rc;
    return guarded([&] {
        lmlds::save_series(series->s, manifest_path, data_path, overwrite != 0);
    });
}

lmlds_status lmlds_series_create(int rows, int tubes, int length, const char* name,
                                 const double* data, lmlds_series** out) {
    if (auto rc = require(data && out, "null argument")) return rc;
    return guarded([&] {
        lmlds::TensorSeries s;
        s.name = name ? name : "";
        s.rows = rows;
        s.tubes = tubes;
        if (rows < 1 || tubes < 1 || length < 1)
            throw lmlds::ConfigError("series dimensions must be positive");
        s.observations.reserve(static_cast<size_t>(length));
        const auto per_epoch = static_cast<size_t>(rows) * static_cast<size_t>(tubes);
        for (int n = 0; n < length; ++n)
            s.observations.push_back(Eigen::Map<const lmlds::RealMatrix>(
                data + static_cast<size_t>(n) * per_epoch, rows, tubes));
        s.validate();
        *out = new lmlds_series{std::move(s)};
    });
}

lmlds_status lmlds_series_generate(int rows, int latent, int tubes,
                                   const char* transform, uint64_t seed, int length,
                                   double rho, double noise_scale,
                                   lmlds_series** out_series, lmlds_model** out_truth) {
    if (auto rc = require(transform && (out_series || out_truth), "null argument"))
        return rc;
    return guarded([&] {
        auto [series, truth] = lmlds::generate_synthetic(
            rows, latent, tubes, lmlds::transform_kind_from_string(transform), seed,
            length, rho, noise_scale);
        if (out_series) *out_series = new lmlds_series{std::move(series)};
        if (out_truth) *out_truth = new lmlds_model{std::move(truth), {}};
    });
}

void lmlds_series_free(lmlds_series* series) { delete series; }

lmlds_status lmlds_series_dims(const lmlds_series* series, int* length, int* rows,
                               int* tubes) {
    if (auto rc = require(series != nullptr, "null series")) return rc;
    if (length) *length = static_cast<int>(series->s.length());
    if (rows) *rows = static_cast<int>(series->s.rows);
    if (tubes) *tubes = static_cast<int>(series->s.tubes);
    return LMLDS_OK;
}

const char* lmlds_series_name(const lmlds_series* series) {
    return series ? series->s.name.c_str() : "";
}

lmlds_status lmlds_series_epoch(const lmlds_series* series, int epoch, double* out) {
    if (auto rc = require(series && out, "null argument")) return rc;
    if (epoch < 1 || epoch > series->s.length())
        return fail(LMLDS_ERR_CONFIG, "epoch out of range");
    const auto& m = series->s.observations[static_cast<size_t>(epoch - 1)];
    std::memcpy(out, m.data(), sizeof(double) * static_cast<size_t>(m.size()));
    return LMLDS_OK;
}

lmlds_status lmlds_train(const lmlds_series* series, int n_train, int latent,
                         const char* transform, const char* mode, uint64_t seed,
                         int max_iters, double tol, int workers, lmlds_model** out) {
    if (auto rc = require(series && transform && mode && out, "null argument"))
        return rc;
    return guarded([&] {
        lmlds::TrainOptions opts;
        opts.em.max_iters = max_iters;
        opts.em.tol = tol;
        opts.em.mode = lmlds::covariance_mode_from_string(mode);
        opts.workers = workers;
        lmlds::TrainResult r =
            lmlds::train(series->s, n_train, latent,
                         lmlds::transform_kind_from_string(transform), opts.em.mode,
                         seed, opts);
        *out = new lmlds_model{std::move(r.model), std::move(r.traces)};
    });
}

lmlds_status lmlds_train_baseline(const lmlds_series* series, int n_train,
                                  int latent, const char* mode, uint64_t seed,
                                  int max_iters, double tol, lmlds_model** out) {
    if (auto rc = require(series && mode && out, "null argument")) return rc;
    return guarded([&] {
        lmlds::TrainOptions opts;
        opts.em.max_iters = max_iters;
        opts.em.tol = tol;
        opts.em.mode = lmlds::covariance_mode_from_string(mode);
        lmlds::TrainResult r = lmlds::fit_baseline_lds(series->s, n_train, latent,
                                                       opts.em.mode, seed, opts);
        *out = new lmlds_model{std::move(r.model), std::move(r.traces)};
    });
}

lmlds_status lmlds_model_save(const lmlds_model* model, const char* path,
                              int overwrite) {
    if (auto rc = require(model && path, "null argument")) return rc;
    return guarded([&] { lmlds::save_model(model->m, path, overwrite != 0); });
}

lmlds_status lmlds_model_load(const char* path, lmlds_model** out) {
    if (auto rc = require(path && out, "null argument")) return rc;
    return guarded([&] { *out = new lmlds_model{lmlds::load_model(path), {}}; });
}

void lmlds_model_free(lmlds_model* model) { delete model; }

lmlds_status lmlds_model_dims(const lmlds_model* model, int* rows, int* latent,
                              int* tubes, int* n_train) {
    if (auto rc = require(model != nullptr, "null model")) return rc;
    if (rows) *rows = static_cast<int>(model->m.rows);
    if (latent) *latent = static_cast<int>(model->m.latent);
    if (tubes) *tubes = static_cast<int>(model->m.tubes);
    if (n_train) *n_train = model->m.n_train;
    return LMLDS_OK;
}

const char* lmlds_model_transform(const lmlds_model* model) {
    return model ? lmlds::to_string(model->m.kind) : "";
}

const char* lmlds_model_mode(const lmlds_model* model) {
    return model ? lmlds::to_string(model->m.mode) : "";
}

uint64_t lmlds_model_seed(const lmlds_model* model) {
    return model ? model->m.seed : 0;
}

lmlds_status lmlds_model_trace(const lmlds_model* model, int slice, double* out,
                               int capacity, int* length) {
    if (auto rc = require(model != nullptr, "null model")) return rc;
    if (slice < 1 || static_cast<size_t>(slice) > model->traces.size())
        return fail(LMLDS_ERR_CONFIG, "slice index out of range (or model not trained "
                                      "in this process)");
    const auto& trace = model->traces[static_cast<size_t>(slice - 1)];
    if (length) *length = static_cast<int>(trace.size());
    if (out && capacity > 0) {
        const auto n = std::min<size_t>(trace.size(), static_cast<size_t>(capacity));
        std::memcpy(out, trace.data(), sizeof(double) * n);
    }
    return LMLDS_OK;
}

lmlds_status lmlds_predict(const lmlds_model* model, int horizon, double* out,
                           double* max_imag_out) {
    if (auto rc = require(model && out, "null argument")) return rc;
    return guarded([&] {
        const auto preds = lmlds::predict(model->m, horizon, max_imag_out);
        size_t offset = 0;
        for (const auto& p : preds) {
            std::memcpy(out + offset, p.data(),
                        sizeof(double) * static_cast<size_t>(p.size()));
            offset += static_cast<size_t>(p.size());
        }
    });
}

lmlds_status lmlds_param_count(const char* family, int rows, int latent, int tubes,
                               long long* out) {
    if (auto rc = require(family && out, "null argument")) return rc;
    return guarded([&] {
        *out = lmlds::param_count(lmlds::model_family_from_string(family), rows,
                                  latent, tubes);
    });
}

lmlds_status lmlds_latent_dim_for_budget(const char* family, int rows, int tubes,
                                         long long budget, int* out) {
    if (auto rc = require(family && out, "null argument")) return rc;
    return guarded([&] {
        *out = static_cast<int>(lmlds::latent_dim_for_budget(
            lmlds::model_family_from_string(family), rows, tubes, budget));
    });
}

lmlds_status lmlds_relative_error(const double* predicted, const double* actual,
                                  int rows, int tubes, double* out) {
    if (auto rc = require(predicted && actual && out, "null argument")) return rc;
    return guarded([&] {
        if (rows < 1 || tubes < 1)
            throw lmlds::ConfigError("relative_error: dimensions must be positive");
        Eigen::Map<const lmlds::RealMatrix> p(predicted, rows, tubes);
        Eigen::Map<const lmlds::RealMatrix> a(actual, rows, tubes);
        *out = lmlds::relative_error(p, a);
    });
}

}  // extern "C"
