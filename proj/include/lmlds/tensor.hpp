#pragma once

//
// Dense third-order complex tensor and its structural views.
//

#include <complex>
#include <vector>

#include <Eigen/Core>

#include "lmlds/errors.hpp"

namespace lmlds {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// I x J x K tensor of complex doubles. Frontal slice k is the I x J matrix
// A(:,:,k); the mode-3 tube (i,j) is the length-K fiber A(i,j,:).
// Indices are 0-based.
class Tensor3 {
public:
    Tensor3() = default;

    Tensor3(Eigen::Index rows, Eigen::Index cols, Eigen::Index tubes)
        : rows_(rows), cols_(cols), tubes_(tubes) {
        if (rows < 1 || cols < 1 || tubes < 1)
            throw ConfigError("Tensor3: dimensions must be positive");
        data_.assign(static_cast<size_t>(rows * cols * tubes), Complex(0.0, 0.0));
    }

    static Tensor3 from_slices(const std::vector<Matrix>& slices);

    Eigen::Index rows() const { return rows_; }
    Eigen::Index cols() const { return cols_; }
    Eigen::Index tubes() const { return tubes_; }

    Complex& operator()(Eigen::Index i, Eigen::Index j, Eigen::Index k) {
        return data_[index(i, j, k)];
    }
    const Complex& operator()(Eigen::Index i, Eigen::Index j, Eigen::Index k) const {
        return data_[index(i, j, k)];
    }

    Matrix slice(Eigen::Index k) const;
    void set_slice(Eigen::Index k, const Matrix& m);

    Vector tube(Eigen::Index i, Eigen::Index j) const;
    void set_tube(Eigen::Index i, Eigen::Index j, const Vector& v);

    double frobenius_norm() const;
    double max_abs_imag() const;

    // Entrywise real part as real slices.
    std::vector<RealMatrix> real_slices() const;

    bool same_dims(const Tensor3& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_ && tubes_ == other.tubes_;
    }

    friend bool operator==(const Tensor3& a, const Tensor3& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.tubes_ == b.tubes_ &&
               a.data_ == b.data_;
    }

private:
    size_t index(Eigen::Index i, Eigen::Index j, Eigen::Index k) const {
        return static_cast<size_t>((k * cols_ + j) * rows_ + i);
    }

    Eigen::Index rows_ = 0, cols_ = 0, tubes_ = 0;
    std::vector<Complex> data_;
};

// Conceptual IK x JK block-diagonal matrix holding the K frontal slices.
struct BlockDiagView {
    Eigen::Index block_rows = 0;
    Eigen::Index block_cols = 0;
    std::vector<Matrix> blocks;

    // Materializes the full (sparse-by-construction) matrix.
    Matrix dense() const;
};

BlockDiagView mat_view(const Tensor3& t);
Tensor3 ten_view(const BlockDiagView& v);

// Requires J == 1; concatenates frontal slices into a length I*K vector.
Vector vec_view(const Tensor3& t);
Tensor3 ten_view(const Vector& v, Eigen::Index rows, Eigen::Index tubes);

}  // namespace lmlds
