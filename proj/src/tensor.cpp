#include "lmlds/tensor.hpp"

#include <cmath>

namespace lmlds {

Tensor3 Tensor3::from_slices(const std::vector<Matrix>& slices) {
    if (slices.empty())
        throw ConfigError("Tensor3::from_slices: need at least one slice");
    Tensor3 t(slices[0].rows(), slices[0].cols(),
              static_cast<Eigen::Index>(slices.size()));
    for (size_t k = 0; k < slices.size(); ++k)
        t.set_slice(static_cast<Eigen::Index>(k), slices[k]);
    return t;
}

Matrix Tensor3::slice(Eigen::Index k) const {
    if (k < 0 || k >= tubes_) throw ConfigError("Tensor3::slice: index out of range");
    Matrix m(rows_, cols_);
    for (Eigen::Index j = 0; j < cols_; ++j)
        for (Eigen::Index i = 0; i < rows_; ++i) m(i, j) = (*this)(i, j, k);
    return m;
}

void Tensor3::set_slice(Eigen::Index k, const Matrix& m) {
    if (k < 0 || k >= tubes_) throw ConfigError("Tensor3::set_slice: index out of range");
    if (m.rows() != rows_ || m.cols() != cols_)
        throw ConfigError("Tensor3::set_slice: slice dimensions mismatch");
    for (Eigen::Index j = 0; j < cols_; ++j)
        for (Eigen::Index i = 0; i < rows_; ++i) (*this)(i, j, k) = m(i, j);
}

Vector Tensor3::tube(Eigen::Index i, Eigen::Index j) const {
    if (i < 0 || i >= rows_ || j < 0 || j >= cols_)
        throw ConfigError("Tensor3::tube: index out of range");
    Vector v(tubes_);
    for (Eigen::Index k = 0; k < tubes_; ++k) v(k) = (*this)(i, j, k);
    return v;
}

void Tensor3::set_tube(Eigen::Index i, Eigen::Index j, const Vector& v) {
    if (i < 0 || i >= rows_ || j < 0 || j >= cols_)
        throw ConfigError("Tensor3::set_tube: index out of range");
    if (v.size() != tubes_)
        throw ConfigError("Tensor3::set_tube: tube length mismatch");
    for (Eigen::Index k = 0; k < tubes_; ++k) (*this)(i, j, k) = v(k);
}

double Tensor3::frobenius_norm() const {
    double acc = 0.0;
    for (const auto& z : data_) acc += std::norm(z);
    return std::sqrt(acc);
}

double Tensor3::max_abs_imag() const {
    double m = 0.0;
    for (const auto& z : data_) m = std::max(m, std::abs(z.imag()));
    return m;
}

std::vector<RealMatrix> Tensor3::real_slices() const {
    std::vector<RealMatrix> out;
    out.reserve(static_cast<size_t>(tubes_));
    for (Eigen::Index k = 0; k < tubes_; ++k) out.push_back(slice(k).real());
    return out;
}

Matrix BlockDiagView::dense() const {
    const auto K = static_cast<Eigen::Index>(blocks.size());
    Matrix m = Matrix::Zero(block_rows * K, block_cols * K);
    for (Eigen::Index k = 0; k < K; ++k)
        m.block(k * block_rows, k * block_cols, block_rows, block_cols) =
            blocks[static_cast<size_t>(k)];
    return m;
}

BlockDiagView mat_view(const Tensor3& t) {
    BlockDiagView v;
    v.block_rows = t.rows();
    v.block_cols = t.cols();
    v.blocks.reserve(static_cast<size_t>(t.tubes()));
    for (Eigen::Index k = 0; k < t.tubes(); ++k) v.blocks.push_back(t.slice(k));
    return v;
}

Tensor3 ten_view(const BlockDiagView& v) {
    if (v.blocks.empty()) throw ConfigError("ten_view: empty block view");
    return Tensor3::from_slices(v.blocks);
}

Vector vec_view(const Tensor3& t) {
    if (t.cols() != 1)
        throw ConfigError("vec_view: middle dimension must be 1");
    Vector v(t.rows() * t.tubes());
    for (Eigen::Index k = 0; k < t.tubes(); ++k)
        for (Eigen::Index i = 0; i < t.rows(); ++i)
            v(k * t.rows() + i) = t(i, 0, k);
    return v;
}

Tensor3 ten_view(const Vector& v, Eigen::Index rows, Eigen::Index tubes) {
    if (v.size() != rows * tubes)
        throw ConfigError("ten_view: vector length does not factor as rows*tubes");
    Tensor3 t(rows, 1, tubes);
    for (Eigen::Index k = 0; k < tubes; ++k)
        for (Eigen::Index i = 0; i < rows; ++i) t(i, 0, k) = v(k * rows + i);
    return t;
}

}  // namespace lmlds
