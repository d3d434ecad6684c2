#include <doctest.h>

#include <chrono>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "lmlds/capi.h"

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("lmlds-capi-" +
                std::to_string(
                    std::chrono::steady_clock::now().time_since_epoch().count()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("version string is available") {
    REQUIRE(lmlds_version() != nullptr);
    CHECK(std::strlen(lmlds_version()) > 0);
}

TEST_CASE("series create, dims, epoch and save/load round trip") {
    TempDir dir;
    // 2 epochs of 2x2: epoch-major, column-major
    const std::vector<double> data{1, 2, 3, 4, 5, 6, 7, 8};
    lmlds_series* s = nullptr;
    REQUIRE(lmlds_series_create(2, 2, 2, "demo", data.data(), &s) == LMLDS_OK);

    int length = 0, rows = 0, tubes = 0;
    REQUIRE(lmlds_series_dims(s, &length, &rows, &tubes) == LMLDS_OK);
    CHECK(length == 2);
    CHECK(rows == 2);
    CHECK(tubes == 2);
    CHECK(std::string(lmlds_series_name(s)) == "demo");

    double epoch[4] = {};
    REQUIRE(lmlds_series_epoch(s, 2, epoch) == LMLDS_OK);
    CHECK(epoch[0] == 5);
    CHECK(epoch[3] == 8);
    CHECK(lmlds_series_epoch(s, 3, epoch) == LMLDS_ERR_CONFIG);

    REQUIRE(lmlds_series_save(s, dir.file("m.json").c_str(), dir.file("d.csv").c_str(),
                              0) == LMLDS_OK);
    CHECK(lmlds_series_save(s, dir.file("m.json").c_str(), dir.file("d.csv").c_str(),
                            0) == LMLDS_ERR_IO);

    lmlds_series* back = nullptr;
    REQUIRE(lmlds_series_load(dir.file("m.json").c_str(), dir.file("d.csv").c_str(),
                              &back) == LMLDS_OK);
    double round[4] = {};
    REQUIRE(lmlds_series_epoch(back, 1, round) == LMLDS_OK);
    CHECK(round[0] == 1);
    CHECK(round[2] == 3);

    lmlds_series_free(back);
    lmlds_series_free(s);
}

TEST_CASE("load failures set status and message") {
    lmlds_series* s = nullptr;
    CHECK(lmlds_series_load("/nonexistent/m.json", "/nonexistent/d.csv", &s) ==
          LMLDS_ERR_IO);
    CHECK(s == nullptr);
    CHECK(std::string(lmlds_last_error()).find("manifest") != std::string::npos);
}

TEST_CASE("generate, train, predict, persist through the C surface") {
    TempDir dir;
    lmlds_series* series = nullptr;
    lmlds_model* truth = nullptr;
    REQUIRE(lmlds_series_generate(4, 2, 4, "dft", 42, 80, 0.9, 1.0, &series, &truth) ==
            LMLDS_OK);
    REQUIRE(series != nullptr);
    REQUIRE(truth != nullptr);

    lmlds_model* model = nullptr;
    REQUIRE(lmlds_train(series, 70, 2, "dft", "full", 7, 20, 1e-6, 2, &model) ==
            LMLDS_OK);

    int rows = 0, latent = 0, tubes = 0, n_train = 0;
    REQUIRE(lmlds_model_dims(model, &rows, &latent, &tubes, &n_train) == LMLDS_OK);
    CHECK(rows == 4);
    CHECK(latent == 2);
    CHECK(tubes == 4);
    CHECK(n_train == 70);
    CHECK(std::string(lmlds_model_transform(model)) == "dft");
    CHECK(std::string(lmlds_model_mode(model)) == "full");
    CHECK(lmlds_model_seed(model) == 7);

    int trace_len = 0;
    REQUIRE(lmlds_model_trace(model, 1, nullptr, 0, &trace_len) == LMLDS_OK);
    CHECK(trace_len >= 1);
    std::vector<double> trace(static_cast<size_t>(trace_len));
    REQUIRE(lmlds_model_trace(model, 1, trace.data(), trace_len, &trace_len) ==
            LMLDS_OK);
    for (size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] >= trace[i - 1] - 1e-8);
    CHECK(lmlds_model_trace(model, 5, nullptr, 0, &trace_len) == LMLDS_ERR_CONFIG);

    std::vector<double> preds(static_cast<size_t>(3 * 4 * 4));
    double max_imag = -1.0;
    REQUIRE(lmlds_predict(model, 3, preds.data(), &max_imag) == LMLDS_OK);
    CHECK(max_imag >= 0.0);
    CHECK(max_imag < 1e-9);

    // one-step error against the held-out epoch 71
    std::vector<double> actual(16);
    REQUIRE(lmlds_series_epoch(series, 71, actual.data()) == LMLDS_OK);
    double err = -1.0;
    REQUIRE(lmlds_relative_error(preds.data(), actual.data(), 4, 4, &err) == LMLDS_OK);
    CHECK(err >= 0.0);

    REQUIRE(lmlds_model_save(model, dir.file("model.json").c_str(), 0) == LMLDS_OK);
    lmlds_model* back = nullptr;
    REQUIRE(lmlds_model_load(dir.file("model.json").c_str(), &back) == LMLDS_OK);
    std::vector<double> preds2(preds.size());
    REQUIRE(lmlds_predict(back, 3, preds2.data(), nullptr) == LMLDS_OK);
    for (size_t i = 0; i < preds.size(); ++i) CHECK(preds[i] == preds2[i]);

    lmlds_model_free(back);
    lmlds_model_free(model);
    lmlds_model_free(truth);
    lmlds_series_free(series);
}

TEST_CASE("baseline training through the C surface") {
    lmlds_series* series = nullptr;
    REQUIRE(lmlds_series_generate(3, 2, 4, "dct", 9, 40, 0.9, 1.0, &series, nullptr) ==
            LMLDS_OK);
    lmlds_model* model = nullptr;
    REQUIRE(lmlds_train_baseline(series, 40, 3, "full", 5, 10, 1e-6, &model) ==
            LMLDS_OK);
    int rows = 0, latent = 0, tubes = 0, n_train = 0;
    REQUIRE(lmlds_model_dims(model, &rows, &latent, &tubes, &n_train) == LMLDS_OK);
    // the baseline is a single flattened system; predictions are reshaped
    CHECK(rows == 12);
    CHECK(tubes == 1);
    CHECK(latent == 3);
    std::vector<double> preds(static_cast<size_t>(2 * 3 * 4));
    REQUIRE(lmlds_predict(model, 2, preds.data(), nullptr) == LMLDS_OK);
    lmlds_model_free(model);
    lmlds_series_free(series);
}

TEST_CASE("error statuses map the exception taxonomy") {
    lmlds_series* series = nullptr;
    REQUIRE(lmlds_series_generate(3, 2, 4, "dft", 1, 10, 0.9, 1.0, &series, nullptr) ==
            LMLDS_OK);
    lmlds_model* model = nullptr;
    // train span longer than the series -> config error
    CHECK(lmlds_train(series, 20, 2, "dft", "full", 1, 5, 1e-6, 1, &model) ==
          LMLDS_ERR_CONFIG);
    CHECK(model == nullptr);
    CHECK(std::strlen(lmlds_last_error()) > 0);
    // unknown transform name -> config error
    CHECK(lmlds_train(series, 10, 2, "hadamard", "full", 1, 5, 1e-6, 1, &model) ==
          LMLDS_ERR_CONFIG);
    // null arguments -> config error
    CHECK(lmlds_train(nullptr, 10, 2, "dft", "full", 1, 5, 1e-6, 1, &model) ==
          LMLDS_ERR_CONFIG);
    lmlds_series_free(series);

    lmlds_model* loaded = nullptr;
    CHECK(lmlds_model_load("/nonexistent/model.json", &loaded) == LMLDS_ERR_IO);
}

TEST_CASE("param accounting through the C surface") {
    long long count = 0;
    REQUIRE(lmlds_param_count("lds", 5, 2, 3, &count) == LMLDS_OK);
    CHECK(count == 423);
    REQUIRE(lmlds_param_count("mlds", 5, 2, 3, &count) == LMLDS_OK);
    CHECK(count == 329);
    REQUIRE(lmlds_param_count("lmlds", 5, 2, 3, &count) == LMLDS_OK);
    CHECK(count == 141);
    CHECK(lmlds_param_count("other", 5, 2, 3, &count) == LMLDS_ERR_CONFIG);

    int j = 0;
    REQUIRE(lmlds_latent_dim_for_budget("lmlds", 5, 3, 329, &j) == LMLDS_OK);
    CHECK(j == 4);
    REQUIRE(lmlds_latent_dim_for_budget("lds", 5, 3, 329, &j) == LMLDS_OK);
    CHECK(j == 2);
    CHECK(lmlds_latent_dim_for_budget("lmlds", 5, 3, 10, &j) == LMLDS_ERR_CONFIG);
}

TEST_CASE("relative error through the C surface") {
    const double predicted[2] = {1.0, 1.0};
    const double actual[2] = {1.0, 0.0};
    double err = 0.0;
    REQUIRE(lmlds_relative_error(predicted, actual, 1, 2, &err) == LMLDS_OK);
    CHECK(err == 1.0);
    const double zeros[2] = {0.0, 0.0};
    CHECK(lmlds_relative_error(predicted, zeros, 1, 2, &err) == LMLDS_ERR_DATA);
}
