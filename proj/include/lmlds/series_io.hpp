#pragma once

//
// Tensor-series dataset container, long-format text persistence and the
// relative-error metric.
//

#include <string>
#include <vector>

#include "lmlds/tensor.hpp"

namespace lmlds {

// Ordered sequence of real I x K observation matrices.
struct TensorSeries {
    std::string name;
    Eigen::Index rows = 0;   // I
    Eigen::Index tubes = 0;  // K
    std::vector<RealMatrix> observations;

    Eigen::Index length() const { return static_cast<Eigen::Index>(observations.size()); }
    void validate() const;
};

struct SplitSpec {
    int n_train = 0;
    int n_test = 0;

    void validate(Eigen::Index series_length) const;
};

// Manifest: JSON with keys rows, tubes, length, name.
// Data: one `epoch,row,tube,value` record per line, 1-based indices,
// 17-significant-digit decimals, epoch-major then row then tube order.
TensorSeries load_series(const std::string& manifest_path, const std::string& data_path);
void save_series(const TensorSeries& series, const std::string& manifest_path,
                 const std::string& data_path, bool overwrite = false);

// Frobenius-norm ratio ||predicted - actual||_F / ||actual||_F.
double relative_error(const RealMatrix& predicted, const RealMatrix& actual);

}  // namespace lmlds
