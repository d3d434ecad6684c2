#include "lmlds/series_io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace lmlds {

namespace {

using nlohmann::json;

void require_absent_or_overwrite(const std::string& path, bool overwrite) {
    if (!overwrite && std::filesystem::exists(path))
        throw IoError("refusing to overwrite existing file: " + path +
                      " (pass overwrite)");
}

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void TensorSeries::validate() const {
    if (rows < 1 || tubes < 1)
        throw DataError("TensorSeries: dimensions must be positive");
    if (observations.empty()) throw DataError("TensorSeries: empty series");
    for (const auto& y : observations) {
        if (y.rows() != rows || y.cols() != tubes)
            throw DataError("TensorSeries: observation dimensions inconsistent");
        if (!y.allFinite())
            throw DataError("TensorSeries: non-finite observation entry");
    }
}

void SplitSpec::validate(Eigen::Index series_length) const {
    if (n_train < 2) throw ConfigError("split: need at least 2 training epochs");
    if (n_test < 1) throw ConfigError("split: need at least 1 test epoch");
    if (n_train + n_test > series_length)
        throw ConfigError("split: train+test (" + std::to_string(n_train + n_test) +
                          ") exceeds series length " + std::to_string(series_length));
}

TensorSeries load_series(const std::string& manifest_path,
                         const std::string& data_path) {
    std::ifstream mf(manifest_path);
    if (!mf) throw IoError("cannot open manifest: " + manifest_path);
    json manifest;
    try {
        manifest = json::parse(mf);
    } catch (const json::exception& e) {
        throw DataError("manifest parse error in " + manifest_path + ": " + e.what());
    }
    for (const char* key : {"rows", "tubes", "length", "name"})
        if (!manifest.contains(key))
            throw DataError("manifest missing key '" + std::string(key) + "'");

    TensorSeries s;
    s.rows = manifest["rows"].get<Eigen::Index>();
    s.tubes = manifest["tubes"].get<Eigen::Index>();
    const auto length = manifest["length"].get<Eigen::Index>();
    s.name = manifest["name"].get<std::string>();
    if (s.rows < 1 || s.tubes < 1 || length < 1)
        throw DataError("manifest dimensions must be positive");
    s.observations.assign(static_cast<size_t>(length),
                          RealMatrix::Zero(s.rows, s.tubes));

    std::ifstream df(data_path);
    if (!df) throw IoError("cannot open data file: " + data_path);
    std::vector<bool> seen(static_cast<size_t>(length * s.rows * s.tubes), false);

    std::string line;
    long line_no = 0;
    while (std::getline(df, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        long epoch = 0, row = 0, tube = 0;
        char c1 = 0, c2 = 0, c3 = 0;
        std::string value_str;
        if (!(ls >> epoch >> c1 >> row >> c2 >> tube >> c3) || c1 != ',' ||
            c2 != ',' || c3 != ',' || !std::getline(ls, value_str) || value_str.empty())
            throw DataError("malformed record at line " + std::to_string(line_no) +
                            " of " + data_path);
        // strtod so that inf/nan parse and hit the finiteness check below
        char* end = nullptr;
        const double value = std::strtod(value_str.c_str(), &end);
        if (end == value_str.c_str())
            throw DataError("malformed record at line " + std::to_string(line_no) +
                            " of " + data_path);
        for (; *end; ++end)
            if (!std::isspace(static_cast<unsigned char>(*end)))
                throw DataError("trailing content at line " + std::to_string(line_no));
        if (epoch < 1 || epoch > length || row < 1 || row > s.rows || tube < 1 ||
            tube > s.tubes)
            throw DataError("index out of range at line " + std::to_string(line_no));
        if (!std::isfinite(value))
            throw DataError("non-finite value at line " + std::to_string(line_no));
        const size_t cell = static_cast<size_t>(
            ((epoch - 1) * s.rows + (row - 1)) * s.tubes + (tube - 1));
        if (seen[cell])
            throw DataError("duplicate cell (" + std::to_string(epoch) + "," +
                            std::to_string(row) + "," + std::to_string(tube) +
                            ") at line " + std::to_string(line_no));
        seen[cell] = true;
        s.observations[static_cast<size_t>(epoch - 1)](row - 1, tube - 1) = value;
    }
    for (size_t cell = 0; cell < seen.size(); ++cell)
        if (!seen[cell]) {
            const auto per_epoch = static_cast<size_t>(s.rows * s.tubes);
            const size_t epoch = cell / per_epoch;
            const size_t rem = cell % per_epoch;
            throw DataError("missing cell (" + std::to_string(epoch + 1) + "," +
                            std::to_string(rem / static_cast<size_t>(s.tubes) + 1) +
                            "," +
                            std::to_string(rem % static_cast<size_t>(s.tubes) + 1) +
                            ") in " + data_path);
        }
    return s;
}

void save_series(const TensorSeries& series, const std::string& manifest_path,
                 const std::string& data_path, bool overwrite) {
    series.validate();
    require_absent_or_overwrite(manifest_path, overwrite);
    require_absent_or_overwrite(data_path, overwrite);

    json manifest = {{"rows", series.rows},
                     {"tubes", series.tubes},
                     {"length", series.length()},
                     {"name", series.name}};
    std::ofstream mf(manifest_path, std::ios::trunc);
    if (!mf) throw IoError("cannot write manifest: " + manifest_path);
    mf << manifest.dump(2) << "\n";

    std::ofstream df(data_path, std::ios::trunc);
    if (!df) throw IoError("cannot write data file: " + data_path);
    for (Eigen::Index n = 0; n < series.length(); ++n)
        for (Eigen::Index i = 0; i < series.rows; ++i)
            for (Eigen::Index k = 0; k < series.tubes; ++k)
                df << (n + 1) << ',' << (i + 1) << ',' << (k + 1) << ','
                   << format_value(series.observations[static_cast<size_t>(n)](i, k))
                   << '\n';
    if (!df) throw IoError("write failure on " + data_path);
}

double relative_error(const RealMatrix& predicted, const RealMatrix& actual) {
    if (predicted.rows() != actual.rows() || predicted.cols() != actual.cols())
        throw ConfigError("relative_error: dimension mismatch");
    const double denom = actual.norm();
    if (denom == 0.0)
        throw DataError("relative_error: undefined for zero-norm actual");
    return (predicted - actual).norm() / denom;
}

}  // namespace lmlds
