#pragma once

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>

#include "qmp/errors.hpp"

namespace qmp {

// Marcenko-Pastur law with ratio y and scale sigma2.
class MPLaw {
 public:
  MPLaw(double y, double sigma2) : y_(y), sigma2_(sigma2) {
    if (!(y > 0.0) || !std::isfinite(y)) throw DomainError("MPLaw: y must be positive");
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw DomainError("MPLaw: sigma2 must be positive");
    const double r = std::sqrt(y);
    lower_ = sigma2 * (1.0 - r) * (1.0 - r);
    upper_ = sigma2 * (1.0 + r) * (1.0 + r);
  }

  double y() const noexcept { return y_; }
  double sigma2() const noexcept { return sigma2_; }
  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }

  // Point mass at the origin, 1 - 1/y when y > 1.
  double atom() const noexcept { return y_ > 1.0 ? 1.0 - 1.0 / y_ : 0.0; }
  bool has_atom() const noexcept { return y_ > 1.0; }

 private:
  double y_;
  double sigma2_;
  double lower_;
  double upper_;
};

inline std::pair<double, double> mp_support(const MPLaw& law) { return {law.lower(), law.upper()}; }

inline std::pair<double, double> mp_support(double y, double sigma2) { return mp_support(MPLaw(y, sigma2)); }

inline double mp_density(const MPLaw& law, double x) {
  const double a = law.lower(), b = law.upper();
  if (!(x >= a && x <= b) || x <= 0.0) return 0.0;
  const double root = std::sqrt(std::max(0.0, (b - x) * (x - a)));
  return root / (2.0 * boost::math::constants::pi<double>() * x * law.y() * law.sigma2());
}

inline constexpr double kCdfQuadratureTolerance = 1e-10;

// Distribution function: atom at the origin plus the integrated density.
// The integral over [a, x] is taken in theta with x = a + (b - a) sin^2(theta),
// which cancels the square-root endpoint behaviour.
inline double mp_cdf(const MPLaw& law, double x) {
  if (x < 0.0) return 0.0;
  const double a = law.lower(), b = law.upper();
  double value = law.atom();
  if (x <= a) return value;
  const double width = b - a;
  const double top = std::min(x, b);
  const double theta_max = std::asin(std::sqrt(std::clamp((top - a) / width, 0.0, 1.0)));
  const double norm = law.y() * law.sigma2() * boost::math::constants::pi<double>();
  auto integrand = [&](double theta) {
    const double s = std::sin(theta), c = std::cos(theta);
    const double s2 = s * s;
    const double xt = a + width * s2;
    if (xt <= 0.0) return width * c * c / norm;  // a == 0 limit
    return width * width * s2 * c * c / (norm * xt);
  };
  value += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, theta_max, 20,
                                                                         kCdfQuadratureTolerance);
  return value;
}

// Roots of y s2 z m^2 + (z - s2 (1 - y)) m + 1 = 0.
inline std::pair<std::complex<double>, std::complex<double>> mp_stieltjes_roots(const MPLaw& law,
                                                                                  std::complex<double> z) {
  const double ys = law.y() * law.sigma2();
  const std::complex<double> qa = ys * z;
  const std::complex<double> qb = z - law.sigma2() * (1.0 - law.y());
  const std::complex<double> disc = std::sqrt(qb * qb - 4.0 * qa);
  // Avoid cancellation: pick the larger-magnitude numerator, get the other from the product.
  const std::complex<double> numer = std::abs(-qb + disc) >= std::abs(-qb - disc) ? -qb + disc : -qb - disc;
  const std::complex<double> r1 = numer / (2.0 * qa);
  const std::complex<double> r2 = 2.0 / numer;
  return {r1, r2};
}

// Stieltjes transform of the law at z in the upper half plane. Of the two
// quadratic roots, the one with positive imaginary part is returned.
inline std::complex<double> mp_stieltjes(const MPLaw& law, std::complex<double> z) {
  if (!(z.imag() > 0.0)) throw DomainError("mp_stieltjes: requires Im z > 0");
  const auto [r1, r2] = mp_stieltjes_roots(law, z);
  const bool up1 = r1.imag() > 0.0, up2 = r2.imag() > 0.0;
  if (up1 != up2) return up1 ? r1 : r2;
  // Degenerate (both or neither strictly positive through rounding): prefer the
  // root obeying the resolvent bound |m| <= 1 / Im z, then the larger Im.
  const double bound = 1.0 / z.imag();
  const bool ok1 = std::abs(r1) <= bound * (1.0 + 1e-12), ok2 = std::abs(r2) <= bound * (1.0 + 1e-12);
  if (ok1 != ok2) return ok1 ? r1 : r2;
  return r1.imag() >= r2.imag() ? r1 : r2;
}

}  // namespace qmp
