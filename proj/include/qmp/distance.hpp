#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <vector>

#include "qmp/mp_law.hpp"
#include "qmp/spectra.hpp"

namespace qmp {

// A distribution function usable by the distance routines. value() is the
// right-continuous CDF, left_limit() its left limit, and breakpoints() a
// sorted list outside of which and between consecutive entries of which the
// function is continuous and monotone, and which brackets every point where
// it is strictly between 0 and 1.
template <typename T>
concept CdfLike = requires(const T& f, double x) {
  { f.value(x) } -> std::convertible_to<double>;
  { f.left_limit(x) } -> std::convertible_to<double>;
  { f.breakpoints() } -> std::convertible_to<std::vector<double>>;
};

// Empirical distribution of a finite sample.
class StepCdf {
 public:
  explicit StepCdf(std::vector<double> values) : values_(std::move(values)) {
    std::sort(values_.begin(), values_.end());
  }
  explicit StepCdf(const SpectralSample& s) : StepCdf(s.eigenvalues) {}

  double value(double x) const { return esd_eval(values_, x); }

  double left_limit(double x) const {
    if (values_.empty()) return 0.0;
    const auto count = std::lower_bound(values_.begin(), values_.end(), x) - values_.begin();
    return static_cast<double>(count) / static_cast<double>(values_.size());
  }

  std::vector<double> breakpoints() const {
    std::vector<double> out = values_;
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  const std::vector<double>& values() const noexcept { return values_; }

 private:
  std::vector<double> values_;
};

class MPCdf {
 public:
  explicit MPCdf(MPLaw law) : law_(law) {}

  double value(double x) const { return mp_cdf(law_, x); }
  double left_limit(double x) const { return x == 0.0 && law_.has_atom() ? 0.0 : mp_cdf(law_, x); }

  std::vector<double> breakpoints() const {
    std::vector<double> out{0.0, law_.lower(), law_.upper()};
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  const MPLaw& law() const noexcept { return law_; }

 private:
  MPLaw law_;
};

// sup_x |F(x) - G(x)|, evaluated at every breakpoint of either function
// from both sides. Exact when both arguments satisfy CdfLike.
template <CdfLike F, CdfLike G>
double kolmogorov_distance(const F& f, const G& g) {
  std::vector<double> pts = f.breakpoints();
  const std::vector<double> gp = g.breakpoints();
  pts.insert(pts.end(), gp.begin(), gp.end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  double sup = 0.0;
  for (double x : pts) {
    sup = std::max(sup, std::abs(f.value(x) - g.value(x)));
    sup = std::max(sup, std::abs(f.left_limit(x) - g.left_limit(x)));
  }
  return std::min(sup, 1.0);
}

inline constexpr double kLevyTolerance = 1e-6;

// Levy distance between an empirical step function and any monotone CDF:
// inf{eps : F(x - eps) - eps <= G(x) <= F(x + eps) + eps for all x}.
// For fixed eps the corridor test reduces to the jump points s of F:
//   G(s - eps)^- - F(s)^- <= eps  and  F(s) - G(s + eps) <= eps,
// and bisection on eps converges to the exact value.
template <CdfLike G>
double levy_distance(const StepCdf& f, const G& g, double tolerance = kLevyTolerance) {
  const std::vector<double> jumps = f.breakpoints();
  if (jumps.empty()) return 0.0;
  std::vector<double> right(jumps.size()), left(jumps.size());
  for (std::size_t i = 0; i < jumps.size(); ++i) {
    right[i] = f.value(jumps[i]);
    left[i] = f.left_limit(jumps[i]);
  }
  auto inside = [&](double eps) {
    for (std::size_t i = 0; i < jumps.size(); ++i) {
      if (g.left_limit(jumps[i] - eps) - left[i] > eps) return false;
      if (right[i] - g.value(jumps[i] + eps) > eps) return false;
    }
    return true;
  };
  if (inside(0.0)) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 0.5 * tolerance) {
    const double mid = 0.5 * (lo + hi);
    (inside(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace qmp
