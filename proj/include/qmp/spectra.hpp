#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "qmp/embed.hpp"
#include "qmp/errors.hpp"
#include "qmp/hermitian_eigen.hpp"

namespace qmp {

// Spectrum of a 2p x 2p embedded sample covariance matrix.
struct SpectralSample {
  std::vector<double> eigenvalues;  // ascending, length 2p
  std::size_t dim_p{0};
  std::size_t dim_n{0};
  double y_n{0.0};
  std::uint64_t seed{0};
  std::string distribution_tag;

  double lambda_max() const { return eigenvalues.empty() ? 0.0 : eigenvalues.back(); }
};

// n^{-1} psi(X) psi(X)^*
inline ComplexMatrix sample_covariance(const QuaternionMatrix& x) {
  const ComplexMatrix psi = embed_matrix(x);
  ComplexMatrix s(psi.rows(), psi.rows());
  s.setZero();
  s.selfadjointView<Eigen::Lower>().rankUpdate(psi, 1.0 / static_cast<double>(x.cols()));
  s.triangularView<Eigen::StrictlyUpper>() = s.adjoint();
  return s;
}

inline SpectralSample spectral_sample(const QuaternionMatrix& x, std::uint64_t seed = 0, std::string tag = {}) {
  SpectralSample s;
  s.eigenvalues = hermitian_eigenvalues(sample_covariance(x));
  s.dim_p = x.rows();
  s.dim_n = x.cols();
  s.y_n = static_cast<double>(x.rows()) / static_cast<double>(x.cols());
  s.seed = seed;
  s.distribution_tag = std::move(tag);
  return s;
}

// Fraction of eigenvalues <= x (right-continuous).
inline double esd_eval(const std::vector<double>& sorted_eigenvalues, double x) {
  if (sorted_eigenvalues.empty()) return 0.0;
  const auto count = std::upper_bound(sorted_eigenvalues.begin(), sorted_eigenvalues.end(), x) - sorted_eigenvalues.begin();
  return static_cast<double>(count) / static_cast<double>(sorted_eigenvalues.size());
}

inline double esd_eval(const SpectralSample& s, double x) { return esd_eval(s.eigenvalues, x); }

// (1/N) sum_j 1 / (lambda_j - z) for Im z > 0.
inline Complex empirical_stieltjes(const std::vector<double>& eigenvalues, Complex z) {
  if (!(z.imag() > 0.0)) throw DomainError("empirical_stieltjes: requires Im z > 0");
  if (eigenvalues.empty()) return {0.0, 0.0};
  Complex sum{0.0, 0.0};
  for (double lambda : eigenvalues) sum += 1.0 / (lambda - z);
  return sum / static_cast<double>(eigenvalues.size());
}

inline Complex empirical_stieltjes(const SpectralSample& s, Complex z) { return empirical_stieltjes(s.eigenvalues, z); }

// Number of eigenvalues at or below rel_threshold * lambda_max.
inline std::size_t count_near_zero(const std::vector<double>& sorted_eigenvalues, double rel_threshold = 1e-8) {
  if (sorted_eigenvalues.empty()) return 0;
  const double cut = rel_threshold * std::max(sorted_eigenvalues.back(), 0.0);
  return static_cast<std::size_t>(std::upper_bound(sorted_eigenvalues.begin(), sorted_eigenvalues.end(), cut) -
                                  sorted_eigenvalues.begin());
}

// max_i |lambda_{2i+1} - lambda_{2i}|
inline double kramers_pair_gap(const std::vector<double>& sorted_eigenvalues) {
  double gap = 0.0;
  for (std::size_t i = 0; i + 1 < sorted_eigenvalues.size(); i += 2)
    gap = std::max(gap, sorted_eigenvalues[i + 1] - sorted_eigenvalues[i]);
  return gap;
}

}  // namespace qmp
