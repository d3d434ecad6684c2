#include "lmlds/model_io.hpp"

#include <filesystem>
#include <fstream>

#include <Eigen/Eigenvalues>
#include <json.hpp>

namespace lmlds {

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

json complex_to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2)
        throw DataError("model file: complex entry is not a [re, im] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols,
                        const char* what) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
        throw DataError(std::string("model file: ") + what + " has wrong row count");
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const json& row = j[static_cast<size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw DataError(std::string("model file: ") + what + " has wrong column count");
        for (Eigen::Index c = 0; c < cols; ++c)
            m(i, c) = complex_from_json(row[static_cast<size_t>(c)]);
    }
    return m;
}

json vector_to_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
    return out;
}

Vector vector_from_json(const json& j, Eigen::Index n, const char* what) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != n)
        throw DataError(std::string("model file: ") + what + " has wrong length");
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = complex_from_json(j[static_cast<size_t>(i)]);
    return v;
}

bool dft_slice_is_real(Eigen::Index k, Eigen::Index tubes) {
    return k == 0 || 2 * k == tubes;
}

}  // namespace

void save_model(const LMLDSModel& model, const std::string& path, bool overwrite) {
    model.validate();
    if (!overwrite && std::filesystem::exists(path))
        throw IoError("refusing to overwrite existing file: " + path + " (pass overwrite)");

    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["transform"] = to_string(model.kind);
    doc["rows"] = model.rows;
    doc["latent"] = model.latent;
    doc["tubes"] = model.tubes;
    doc["mode"] = to_string(model.mode);
    doc["seed"] = model.seed;
    doc["n_train"] = model.n_train;
    if (model.is_baseline()) {
        doc["flattened_rows"] = model.flattened_rows;
        doc["flattened_tubes"] = model.flattened_tubes;
    }
    json slices = json::array();
    for (size_t k = 0; k < model.slices.size(); ++k) {
        const auto& s = model.slices[k];
        json js;
        js["u0"] = vector_to_json(s.u0);
        js["q0"] = matrix_to_json(s.q0);
        js["a"] = matrix_to_json(s.a);
        js["q"] = matrix_to_json(s.q);
        js["c"] = matrix_to_json(s.c);
        js["r"] = matrix_to_json(s.r);
        if (!model.last_means.empty()) js["last_mean"] = vector_to_json(model.last_means[k]);
        slices.push_back(std::move(js));
    }
    doc["slices"] = std::move(slices);

    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write model file: " + path);
    out << doc.dump(1) << "\n";
    if (!out) throw IoError("write failure on " + path);
}

LMLDSModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open model file: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw DataError("model file parse error in " + path + ": " + e.what());
    }
    if (!doc.contains("schema_version") || doc["schema_version"].get<int>() != kSchemaVersion)
        throw DataError("model file: unsupported schema version");

    LMLDSModel m;
    m.kind = transform_kind_from_string(doc.at("transform").get<std::string>());
    m.rows = doc.at("rows").get<Eigen::Index>();
    m.latent = doc.at("latent").get<Eigen::Index>();
    m.tubes = doc.at("tubes").get<Eigen::Index>();
    m.mode = covariance_mode_from_string(doc.at("mode").get<std::string>());
    m.seed = doc.at("seed").get<uint64_t>();
    m.n_train = doc.at("n_train").get<int>();
    if (doc.contains("flattened_rows")) {
        m.flattened_rows = doc["flattened_rows"].get<Eigen::Index>();
        m.flattened_tubes = doc["flattened_tubes"].get<Eigen::Index>();
        if (m.flattened_rows * m.flattened_tubes != m.rows * m.tubes)
            throw DataError("model file: flattened dimensions inconsistent");
    }

    const json& slices = doc.at("slices");
    if (!slices.is_array() || static_cast<Eigen::Index>(slices.size()) != m.tubes)
        throw DataError("model file: slice count does not match tube dimension");
    bool any_last_mean = false;
    for (const auto& js : slices) {
        SliceLDSParams s;
        s.u0 = vector_from_json(js.at("u0"), m.latent, "u0");
        s.q0 = matrix_from_json(js.at("q0"), m.latent, m.latent, "q0");
        s.a = matrix_from_json(js.at("a"), m.latent, m.latent, "a");
        s.q = matrix_from_json(js.at("q"), m.latent, m.latent, "q");
        s.c = matrix_from_json(js.at("c"), m.rows, m.latent, "c");
        s.r = matrix_from_json(js.at("r"), m.rows, m.rows, "r");
        m.slices.push_back(std::move(s));
        if (js.contains("last_mean")) any_last_mean = true;
    }
    if (any_last_mean) {
        for (const auto& js : slices)
            m.last_means.push_back(vector_from_json(js.at("last_mean"), m.latent, "last_mean"));
    }
    try {
        m.validate();
    } catch (const NumericError& e) {
        throw DataError(std::string("model file: ") + e.what());
    }
    return m;
}

std::pair<TensorSeries, LMLDSModel> generate_synthetic(
    Eigen::Index rows, Eigen::Index latent, Eigen::Index tubes, TransformKind kind,
    uint64_t seed, int n_steps, double rho, double noise_scale) {
    if (rho <= 0.0 || rho >= 1.0)
        throw ConfigError("generate_synthetic: rho must be in (0, 1)");
    if (n_steps < 1) throw ConfigError("generate_synthetic: n_steps must be >= 1");
    if (noise_scale < 0.0)
        throw ConfigError("generate_synthetic: noise_scale must be >= 0");

    LMLDSModel truth = init_model(rows, latent, tubes, kind, CovarianceMode::Full, seed);
    const Eigen::Index n_indep = independent_slice_count(kind, tubes, true);
    for (Eigen::Index k = 0; k < n_indep; ++k) {
        auto& s = truth.slices[static_cast<size_t>(k)];
        Eigen::ComplexEigenSolver<Matrix> es(s.a, false);
        const double radius = es.eigenvalues().cwiseAbs().maxCoeff();
        if (radius <= 0.0)
            throw NumericError("generate_synthetic: nilpotent transition slice");
        s.a *= rho / radius;
        s.q0 *= noise_scale;
        s.q *= noise_scale;
        s.r *= noise_scale;
    }
    for (Eigen::Index k = n_indep; k < tubes; ++k)
        truth.slices[static_cast<size_t>(k)] =
            truth.slices[static_cast<size_t>(tubes - k)].conjugated();

    // Sample the independent slices, mirror the rest by conjugation so the
    // assembled transform-domain tensor inverts to a real series.
    std::vector<std::vector<Vector>> slice_obs(static_cast<size_t>(tubes));
    for (Eigen::Index k = 0; k < n_indep; ++k) {
        const bool real_noise =
            kind != TransformKind::Dft || dft_slice_is_real(k, tubes);
        const Trajectory traj = sample_trajectory(
            truth.slices[static_cast<size_t>(k)], n_steps,
            derive_seed(seed, static_cast<uint64_t>(tubes + k)), real_noise);
        slice_obs[static_cast<size_t>(k)] = traj.observations;
    }
    for (Eigen::Index k = n_indep; k < tubes; ++k) {
        const auto& src = slice_obs[static_cast<size_t>(tubes - k)];
        auto& dst = slice_obs[static_cast<size_t>(k)];
        dst.reserve(src.size());
        for (const auto& v : src) dst.push_back(v.conjugate());
    }

    const Matrix inv = inverse_transform_matrix(kind, tubes);
    TensorSeries series;
    series.name = "synthetic";
    series.rows = rows;
    series.tubes = tubes;
    series.observations.reserve(static_cast<size_t>(n_steps));
    for (int n = 0; n < n_steps; ++n) {
        Matrix transformed(rows, tubes);
        for (Eigen::Index k = 0; k < tubes; ++k)
            transformed.col(k) = slice_obs[static_cast<size_t>(k)][static_cast<size_t>(n)];
        const Matrix y = transformed * inv.transpose();
        if (y.imag().cwiseAbs().maxCoeff() > 1e-9)
            throw NumericError("generate_synthetic: imaginary residue above 1e-9");
        series.observations.push_back(y.real());
    }
    return {std::move(series), std::move(truth)};
}

}  // namespace lmlds
