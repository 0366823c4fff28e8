#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "qmp/errors.hpp"
#include "qmp/quaternion.hpp"

namespace qmp {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

// Dense p x n matrix of quaternions, row-major.
class QuaternionMatrix {
 public:
  QuaternionMatrix() = default;
  QuaternionMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {
    if (rows == 0 || cols == 0) throw DimensionError("QuaternionMatrix: dimensions must be positive");
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  Quaternion& operator()(std::size_t j, std::size_t k) { return data_[j * cols_ + k]; }
  const Quaternion& operator()(std::size_t j, std::size_t k) const { return data_[j * cols_ + k]; }

  std::vector<Quaternion>& entries() noexcept { return data_; }
  const std::vector<Quaternion>& entries() const noexcept { return data_; }

  // Quaternion conjugate transpose X*.
  QuaternionMatrix adjoint() const {
    QuaternionMatrix out(cols_, rows_);
    for (std::size_t j = 0; j < rows_; ++j)
      for (std::size_t k = 0; k < cols_; ++k) out(k, j) = conjugate((*this)(j, k));
    return out;
  }

  friend bool operator==(const QuaternionMatrix&, const QuaternionMatrix&) = default;

 private:
  std::size_t rows_{0};
  std::size_t cols_{0};
  std::vector<Quaternion> data_;
};

inline QuaternionMatrix operator*(const QuaternionMatrix& x, const QuaternionMatrix& y) {
  if (x.cols() != y.rows()) throw DimensionError("quaternion matrix product: inner dimensions differ");
  QuaternionMatrix out(x.rows(), y.cols());
  for (std::size_t j = 0; j < x.rows(); ++j)
    for (std::size_t l = 0; l < x.cols(); ++l) {
      const Quaternion& xjl = x(j, l);
      for (std::size_t k = 0; k < y.cols(); ++k) out(j, k) += multiply(xjl, y(l, k));
    }
  return out;
}

// 2x2 block [[a+bi, c+di], [-c+di, a-bi]].
inline Eigen::Matrix2cd embed_scalar(const Quaternion& x) {
  Eigen::Matrix2cd m;
  m(0, 0) = Complex(x.a, x.b);
  m(0, 1) = Complex(x.c, x.d);
  m(1, 0) = Complex(-x.c, x.d);
  m(1, 1) = Complex(x.a, -x.b);
  return m;
}

// The 2p x 2n complex image of a p x n quaternion matrix.
inline ComplexMatrix embed_matrix(const QuaternionMatrix& x) {
  ComplexMatrix out(2 * x.rows(), 2 * x.cols());
  for (std::size_t j = 0; j < x.rows(); ++j)
    for (std::size_t k = 0; k < x.cols(); ++k) {
      const Quaternion& q = x(j, k);
      const auto r = static_cast<Eigen::Index>(2 * j);
      const auto c = static_cast<Eigen::Index>(2 * k);
      out(r, c) = Complex(q.a, q.b);
      out(r, c + 1) = Complex(q.c, q.d);
      out(r + 1, c) = Complex(-q.c, q.d);
      out(r + 1, c + 1) = Complex(q.a, -q.b);
    }
  return out;
}

inline double max_abs(const ComplexMatrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

// max |A - A*|
inline double hermitian_residual(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) return INFINITY;
  return max_abs(a - a.adjoint());
}

enum class StructureKind { TypeI, TypeII, TypeIII };

inline std::string_view to_string(StructureKind kind) {
  switch (kind) {
    case StructureKind::TypeI: return "TypeI";
    case StructureKind::TypeII: return "TypeII";
    case StructureKind::TypeIII: return "TypeIII";
  }
  return "?";
}

struct StructureReport {
  StructureKind kind{StructureKind::TypeI};
  double residual{0.0};
  std::size_t block_dim{0};
};

namespace detail {

// Expected lower block (l, j) given the upper block U = A(j, l), l > j.
// Type-I: [[d, -b], [-c, a]] for U = [[a, b], [c, d]].
// Type-II: U = [[a + c i, b + d i], [-conj(b) - conj(d) i, conj(a) + conj(c) i]] with
//   lower [[conj(a) + conj(c) i, -b - d i], [conj(b) + conj(d) i, a + c i]]; the
//   parameters are recovered from U and the lower block rebuilt from them.
// Type-III: U = [[a, b], [-conj(b), conj(a)]], lower [[conj(a), -b], [conj(b), a]].
inline double offdiag_violation(StructureKind kind, const Eigen::Matrix2cd& upper, const Eigen::Matrix2cd& lower) {
  const Complex I(0.0, 1.0);
  Eigen::Matrix2cd expected;
  double upper_violation = 0.0;
  switch (kind) {
    case StructureKind::TypeI:
      expected << upper(1, 1), -upper(0, 1), -upper(1, 0), upper(0, 0);
      break;
    case StructureKind::TypeII: {
      // P = a + c i, S = conj(a) + conj(c) i  =>  a = (P + conj S) / 2, c = (P - conj S) / (2i)
      const Complex p = upper(0, 0), s = upper(1, 1);
      const Complex a = (p + std::conj(s)) / 2.0;
      const Complex c = (p - std::conj(s)) / (2.0 * I);
      // Q = b + d i, R = -conj(b) - conj(d) i  =>  b = (Q - conj R) / 2, d = (Q + conj R) / (2i)
      const Complex q = upper(0, 1), r = upper(1, 0);
      const Complex b = (q - std::conj(r)) / 2.0;
      const Complex d = (q + std::conj(r)) / (2.0 * I);
      expected(0, 0) = std::conj(a) + std::conj(c) * I;
      expected(0, 1) = -b - d * I;
      expected(1, 0) = std::conj(b) + std::conj(d) * I;
      expected(1, 1) = a + c * I;
      break;
    }
    case StructureKind::TypeIII: {
      const Complex a = upper(0, 0), b = upper(0, 1);
      upper_violation = std::max(std::abs(upper(1, 0) + std::conj(b)), std::abs(upper(1, 1) - std::conj(a)));
      expected << std::conj(a), -b, std::conj(b), a;
      break;
    }
  }
  return std::max(upper_violation, (lower - expected).cwiseAbs().maxCoeff());
}

}  // namespace detail

// Largest absolute violation of the Type-I/II/III block pattern. Every kind
// requires diagonal blocks t*I_2; off-diagonal blocks must satisfy the
// kind-specific relation between block (j, l) and block (l, j).
inline StructureReport structure_residual(const ComplexMatrix& a, StructureKind kind) {
  if (a.rows() != a.cols()) throw DimensionError("structure_residual: matrix must be square");
  if (a.rows() == 0 || a.rows() % 2 != 0) throw DimensionError("structure_residual: dimension must be even and positive");
  const Eigen::Index blocks = a.rows() / 2;
  double residual = 0.0;
  for (Eigen::Index j = 0; j < blocks; ++j) {
    const Eigen::Matrix2cd diag = a.block<2, 2>(2 * j, 2 * j);
    residual = std::max({residual, std::abs(diag(0, 0) - diag(1, 1)), std::abs(diag(0, 1)), std::abs(diag(1, 0))});
    for (Eigen::Index l = j + 1; l < blocks; ++l) {
      residual = std::max(residual, detail::offdiag_violation(kind, a.block<2, 2>(2 * j, 2 * l),
                                                              a.block<2, 2>(2 * l, 2 * j)));
    }
  }
  return {kind, residual, static_cast<std::size_t>(blocks)};
}

inline constexpr double kTypeIIIInputTolerance = 1e-10;
inline constexpr double kMaxConditionNumber = 1e12;

// Inverts a Type-III matrix and reports how far the inverse is from Type-I.
inline StructureReport inverse_structure_check(const ComplexMatrix& a, double tol_in = kTypeIIIInputTolerance) {
  const StructureReport input = structure_residual(a, StructureKind::TypeIII);
  if (input.residual > tol_in)
    throw PreconditionError("inverse_structure_check: input is not Type-III (residual " +
                            std::to_string(input.residual) + ")");
  const Eigen::PartialPivLU<ComplexMatrix> lu(a);
  const double rcond = lu.rcond();
  if (!(rcond > 1.0 / kMaxConditionNumber))
    throw InvertibilityError("inverse_structure_check: matrix is singular or ill-conditioned (rcond " +
                             std::to_string(rcond) + ")");
  return structure_residual(lu.inverse(), StructureKind::TypeI);
}

}  // namespace qmp
