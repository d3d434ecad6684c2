#pragma once

//
// Invertible mode-3 transforms and the tubal / slice-wise product algebra.
//

#include <string>
#include <string_view>

#include "lmlds/tensor.hpp"

namespace lmlds {

enum class TransformKind { Identity, Dft, Dct, Dwt };

TransformKind transform_kind_from_string(std::string_view s);
const char* to_string(TransformKind kind);

// Dwt (full-depth Haar) accepts only power-of-two lengths.
bool kind_accepts_length(TransformKind kind, Eigen::Index n);
void require_length(TransformKind kind, Eigen::Index n);

// Dct, Dwt and Identity are orthonormal; Dft uses the unnormalized forward
// with 1/K inverse, so the tubal product under Dft is circular convolution.
bool is_orthonormal(TransformKind kind);

// K x K forward / inverse transform matrices acting on tubes.
Matrix transform_matrix(TransformKind kind, Eigen::Index n);
Matrix inverse_transform_matrix(TransformKind kind, Eigen::Index n);

// Applies the 1-D transform to every mode-3 tube.
Tensor3 transform(const Tensor3& t, TransformKind kind);
Tensor3 inverse_transform(const Tensor3& t, TransformKind kind);

Vector transform_tube(const Vector& v, TransformKind kind);
Vector inverse_transform_tube(const Vector& v, TransformKind kind);

// L^-1(L(a) o L(b)) with o elementwise.
Vector tubal_mult(const Vector& a, const Vector& b, TransformKind kind);

// Transform-domain slice-wise matrix product (the fast route).
Tensor3 l_product(const Tensor3& a, const Tensor3& b, TransformKind kind);

// Direct sum of tubal products over the inner index; oracle for l_product.
Tensor3 l_product_bruteforce(const Tensor3& a, const Tensor3& b, TransformKind kind);

// Transform, conjugate-transpose each frontal slice, transform back.
Tensor3 hermitian_transpose(const Tensor3& t, TransformKind kind);

}  // namespace lmlds
