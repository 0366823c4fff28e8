#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "qmp/embed.hpp"
#include "qmp/errors.hpp"

namespace qmp {

inline constexpr double kHermitianInputTolerance = 1e-10;

// Real symmetric tridiagonal matrix: diagonal[i] and offdiagonal[i] coupling i, i+1.
struct Tridiagonal {
  std::vector<double> diagonal;
  std::vector<double> offdiagonal;
};

// Householder reduction of a Hermitian matrix to real symmetric tridiagonal
// form. Only the lower triangle of `a` is read. Each reflector produces a
// complex subdiagonal entry whose modulus is kept; the phases are removed by a
// diagonal unitary similarity, which leaves the spectrum unchanged.
inline Tridiagonal tridiagonalize(ComplexMatrix a) {
  const Eigen::Index n = a.rows();
  Tridiagonal t;
  t.diagonal.resize(static_cast<std::size_t>(n));
  t.offdiagonal.resize(n > 0 ? static_cast<std::size_t>(n - 1) : 0);

  Eigen::VectorXcd v, p;
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    const Eigen::Index m = n - k - 1;
    t.diagonal[static_cast<std::size_t>(k)] = a(k, k).real();
    auto x = a.col(k).tail(m);
    const double xnorm = x.norm();
    t.offdiagonal[static_cast<std::size_t>(k)] = xnorm;
    if (m == 1 || xnorm == 0.0) continue;

    const Complex alpha = x(0);
    const double aabs = std::abs(alpha);
    const Complex beta = aabs == 0.0 ? Complex(-xnorm, 0.0) : -(alpha / aabs) * xnorm;
    v = x;
    v(0) -= beta;
    const double tau = 2.0 / v.squaredNorm();

    auto trailing = a.bottomRightCorner(m, m);
    p.noalias() = tau * (trailing.selfadjointView<Eigen::Lower>() * v);
    const double half_k = 0.5 * tau * v.dot(p).real();
    p -= half_k * v;
    trailing.selfadjointView<Eigen::Lower>().rankUpdate(v, p, Complex(-1.0, 0.0));
  }
  if (n > 0) t.diagonal.back() = a(n - 1, n - 1).real();
  return t;
}

// Eigenvalues of a symmetric tridiagonal matrix by implicitly shifted QL
// iterations with Wilkinson-type shifts. Returns them unsorted.
inline std::vector<double> tridiagonal_eigenvalues(Tridiagonal t) {
  auto& d = t.diagonal;
  const std::size_t n = d.size();
  std::vector<double> e(n, 0.0);
  std::copy(t.offdiagonal.begin(), t.offdiagonal.end(), e.begin());
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr int kMaxIterations = 100;
  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) norm = std::max(norm, std::abs(d[i]) + 2.0 * std::abs(e[i]));
  // Absolute deflation floor eps * ||T||.
  const double floor = eps * norm;

  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m = l;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= std::max(eps * dd, floor)) break;
      }
      if (m == l) break;
      if (++iter > kMaxIterations)
        throw ContractError("tridiagonal_eigenvalues: QL iteration failed to converge");

      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      bool underflow = false;
      for (std::size_t i = m; i-- > l;) {
        const double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
      }
      if (underflow) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    } while (true);
  }
  return d;
}

// All eigenvalues of a Hermitian matrix, ascending. Throws ContractError for
// non-Hermitian input, non-convergence, or a breach of the trace identity.
inline std::vector<double> hermitian_eigenvalues(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw ContractError("hermitian_eigenvalues: matrix is not square");
  if (a.rows() == 0) return {};
  const double scale = max_abs(a);
  const double asym = hermitian_residual(a);
  if (!(asym <= kHermitianInputTolerance * scale))
    throw ContractError("hermitian_eigenvalues: matrix is not Hermitian (residual " + std::to_string(asym) + ")");

  std::vector<double> lambda = tridiagonal_eigenvalues(tridiagonalize(a));
  std::sort(lambda.begin(), lambda.end());

  const double spectral = std::max(std::abs(lambda.front()), std::abs(lambda.back()));
  const double trace = a.diagonal().real().sum();
  const double sum = std::accumulate(lambda.begin(), lambda.end(), 0.0);
  const auto dim = static_cast<double>(a.rows());
  if (!(std::abs(sum - trace) <= kHermitianInputTolerance * std::max(spectral, scale) * dim))
    throw ContractError("hermitian_eigenvalues: trace identity violated");
  return lambda;
}

}  // namespace qmp
