#pragma once

//
// Model persistence and synthetic ground-truth generation.
//

#include <string>
#include <utility>

#include "lmlds/model.hpp"

namespace lmlds {

// Structured text (JSON) with schema version, transform kind, dimensions,
// mode, seed and per-slice parameter arrays; complex entries stored as
// [re, im] pairs. load_model(save_model(m)) is exact.
void save_model(const LMLDSModel& model, const std::string& path,
                bool overwrite = false);
LMLDSModel load_model(const std::string& path);

// Ground-truth model plus a series sampled from it. Each slice transition
// is rescaled to spectral radius rho; noise draws follow the slice
// conjugate-symmetry structure so the inverse-transformed observations are
// real up to roundoff. noise_scale multiplies all covariances.
std::pair<TensorSeries, LMLDSModel> generate_synthetic(
    Eigen::Index rows, Eigen::Index latent, Eigen::Index tubes, TransformKind kind,
    uint64_t seed, int n_steps, double rho, double noise_scale = 1.0);

}  // namespace lmlds
