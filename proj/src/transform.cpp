#include "lmlds/transform.hpp"

#include <cmath>
#include <numbers>

namespace lmlds {

namespace {

bool is_power_of_two(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

Matrix dft_matrix(Eigen::Index n) {
    Matrix m(n, n);
    const double w = -2.0 * std::numbers::pi / static_cast<double>(n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c) {
            const double phase = w * static_cast<double>(r) * static_cast<double>(c);
            m(r, c) = Complex(std::cos(phase), std::sin(phase));
        }
    return m;
}

// Orthonormal DCT-II.
Matrix dct_matrix(Eigen::Index n) {
    Matrix m(n, n);
    const double s0 = std::sqrt(1.0 / static_cast<double>(n));
    const double s = std::sqrt(2.0 / static_cast<double>(n));
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c) {
            const double angle = std::numbers::pi * (2.0 * static_cast<double>(c) + 1.0) *
                                 static_cast<double>(r) / (2.0 * static_cast<double>(n));
            m(r, c) = Complex((r == 0 ? s0 : s) * std::cos(angle), 0.0);
        }
    return m;
}

// Orthonormal Haar with full decomposition depth: the product of per-level
// average/difference operators, each acting on the leading coefficients.
Matrix haar_matrix(Eigen::Index n) {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    Matrix w = Matrix::Identity(n, n);
    for (Eigen::Index m = n; m >= 2; m /= 2) {
        Matrix step = Matrix::Identity(n, n);
        step.topLeftCorner(m, m).setZero();
        for (Eigen::Index t = 0; t < m / 2; ++t) {
            step(t, 2 * t) = inv_sqrt2;
            step(t, 2 * t + 1) = inv_sqrt2;
            step(m / 2 + t, 2 * t) = inv_sqrt2;
            step(m / 2 + t, 2 * t + 1) = -inv_sqrt2;
        }
        w = step * w;
    }
    return w;
}

Tensor3 apply_tube_matrix(const Tensor3& t, const Matrix& m) {
    Tensor3 out(t.rows(), t.cols(), t.tubes());
    for (Eigen::Index j = 0; j < t.cols(); ++j)
        for (Eigen::Index i = 0; i < t.rows(); ++i)
            out.set_tube(i, j, m * t.tube(i, j));
    return out;
}

}  // namespace

TransformKind transform_kind_from_string(std::string_view s) {
    if (s == "identity") return TransformKind::Identity;
    if (s == "dft") return TransformKind::Dft;
    if (s == "dct") return TransformKind::Dct;
    if (s == "dwt") return TransformKind::Dwt;
    throw ConfigError("unknown transform kind: " + std::string(s));
}

const char* to_string(TransformKind kind) {
    switch (kind) {
        case TransformKind::Identity: return "identity";
        case TransformKind::Dft: return "dft";
        case TransformKind::Dct: return "dct";
        case TransformKind::Dwt: return "dwt";
    }
    return "?";
}

bool kind_accepts_length(TransformKind kind, Eigen::Index n) {
    if (n < 1) return false;
    if (kind == TransformKind::Dwt) return is_power_of_two(n);
    return true;
}

void require_length(TransformKind kind, Eigen::Index n) {
    if (!kind_accepts_length(kind, n))
        throw ConfigError(std::string(to_string(kind)) +
                          " transform incompatible with tube length " + std::to_string(n) +
                          (kind == TransformKind::Dwt ? " (power of two required)" : ""));
}

bool is_orthonormal(TransformKind kind) { return kind != TransformKind::Dft; }

Matrix transform_matrix(TransformKind kind, Eigen::Index n) {
    require_length(kind, n);
    switch (kind) {
        case TransformKind::Identity: return Matrix::Identity(n, n);
        case TransformKind::Dft: return dft_matrix(n);
        case TransformKind::Dct: return dct_matrix(n);
        case TransformKind::Dwt: return haar_matrix(n);
    }
    throw ConfigError("unreachable transform kind");
}

Matrix inverse_transform_matrix(TransformKind kind, Eigen::Index n) {
    require_length(kind, n);
    if (kind == TransformKind::Dft)
        return dft_matrix(n).conjugate() / static_cast<double>(n);
    // Orthonormal real transforms invert by transpose.
    return transform_matrix(kind, n).transpose();
}

Tensor3 transform(const Tensor3& t, TransformKind kind) {
    if (kind == TransformKind::Identity) return t;
    return apply_tube_matrix(t, transform_matrix(kind, t.tubes()));
}

Tensor3 inverse_transform(const Tensor3& t, TransformKind kind) {
    if (kind == TransformKind::Identity) return t;
    return apply_tube_matrix(t, inverse_transform_matrix(kind, t.tubes()));
}

Vector transform_tube(const Vector& v, TransformKind kind) {
    if (kind == TransformKind::Identity) return v;
    return transform_matrix(kind, v.size()) * v;
}

Vector inverse_transform_tube(const Vector& v, TransformKind kind) {
    if (kind == TransformKind::Identity) return v;
    return inverse_transform_matrix(kind, v.size()) * v;
}

Vector tubal_mult(const Vector& a, const Vector& b, TransformKind kind) {
    if (a.size() != b.size())
        throw ConfigError("tubal_mult: tube length mismatch");
    require_length(kind, a.size());
    const Vector ta = transform_tube(a, kind);
    const Vector tb = transform_tube(b, kind);
    return inverse_transform_tube(ta.cwiseProduct(tb), kind);
}

Tensor3 l_product(const Tensor3& a, const Tensor3& b, TransformKind kind) {
    if (a.cols() != b.rows() || a.tubes() != b.tubes())
        throw ConfigError("l_product: operand dimensions mismatch");
    require_length(kind, a.tubes());
    const Tensor3 ta = transform(a, kind);
    const Tensor3 tb = transform(b, kind);
    Tensor3 tc(a.rows(), b.cols(), a.tubes());
    for (Eigen::Index k = 0; k < a.tubes(); ++k)
        tc.set_slice(k, ta.slice(k) * tb.slice(k));
    return inverse_transform(tc, kind);
}

Tensor3 l_product_bruteforce(const Tensor3& a, const Tensor3& b, TransformKind kind) {
    if (a.cols() != b.rows() || a.tubes() != b.tubes())
        throw ConfigError("l_product_bruteforce: operand dimensions mismatch");
    require_length(kind, a.tubes());
    Tensor3 c(a.rows(), b.cols(), a.tubes());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < b.cols(); ++j) {
            Vector acc = Vector::Zero(a.tubes());
            for (Eigen::Index p = 0; p < a.cols(); ++p)
                acc += tubal_mult(a.tube(i, p), b.tube(p, j), kind);
            c.set_tube(i, j, acc);
        }
    return c;
}

Tensor3 hermitian_transpose(const Tensor3& t, TransformKind kind) {
    const Tensor3 tt = transform(t, kind);
    Tensor3 out(t.cols(), t.rows(), t.tubes());
    for (Eigen::Index k = 0; k < t.tubes(); ++k)
        out.set_slice(k, tt.slice(k).adjoint());
    return inverse_transform(out, kind);
}

}  // namespace lmlds
