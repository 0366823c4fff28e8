#pragma once

#include <cmath>
#include <ostream>

namespace qmp {

// Real quaternion a*e + b*i + c*j + d*k with Hamilton multiplication
// (i*j = k, j*k = i, k*i = j). Its 2x2 complex block is produced by
// embed_scalar() in embed.hpp.
template <typename Real>
struct BasicQuaternion {
  Real a{0};
  Real b{0};
  Real c{0};
  Real d{0};

  static constexpr BasicQuaternion e() { return {1, 0, 0, 0}; }
  static constexpr BasicQuaternion i() { return {0, 1, 0, 0}; }
  static constexpr BasicQuaternion j() { return {0, 0, 1, 0}; }
  static constexpr BasicQuaternion k() { return {0, 0, 0, 1}; }

  constexpr BasicQuaternion& operator+=(const BasicQuaternion& o) {
    a += o.a;
    b += o.b;
    c += o.c;
    d += o.d;
    return *this;
  }
  constexpr BasicQuaternion& operator-=(const BasicQuaternion& o) {
    a -= o.a;
    b -= o.b;
    c -= o.c;
    d -= o.d;
    return *this;
  }
  constexpr BasicQuaternion& operator*=(Real s) {
    a *= s;
    b *= s;
    c *= s;
    d *= s;
    return *this;
  }
  constexpr BasicQuaternion& operator/=(Real s) {
    a /= s;
    b /= s;
    c /= s;
    d /= s;
    return *this;
  }

  friend constexpr bool operator==(const BasicQuaternion&, const BasicQuaternion&) = default;
};

using Quaternion = BasicQuaternion<double>;

template <typename Real>
constexpr BasicQuaternion<Real> multiply(const BasicQuaternion<Real>& x, const BasicQuaternion<Real>& y) {
  return {x.a * y.a - x.b * y.b - x.c * y.c - x.d * y.d,
          x.a * y.b + x.b * y.a + x.c * y.d - x.d * y.c,
          x.a * y.c - x.b * y.d + x.c * y.a + x.d * y.b,
          x.a * y.d + x.b * y.c - x.c * y.b + x.d * y.a};
}

template <typename Real>
constexpr BasicQuaternion<Real> conjugate(const BasicQuaternion<Real>& x) {
  return {x.a, -x.b, -x.c, -x.d};
}

template <typename Real>
constexpr Real norm_squared(const BasicQuaternion<Real>& x) {
  return x.a * x.a + x.b * x.b + x.c * x.c + x.d * x.d;
}

template <typename Real>
Real norm(const BasicQuaternion<Real>& x) {
  return std::sqrt(norm_squared(x));
}

template <typename Real>
constexpr BasicQuaternion<Real> operator*(const BasicQuaternion<Real>& x, const BasicQuaternion<Real>& y) {
  return multiply(x, y);
}
template <typename Real>
constexpr BasicQuaternion<Real> operator+(BasicQuaternion<Real> x, const BasicQuaternion<Real>& y) {
  return x += y;
}
template <typename Real>
constexpr BasicQuaternion<Real> operator-(BasicQuaternion<Real> x, const BasicQuaternion<Real>& y) {
  return x -= y;
}
template <typename Real>
constexpr BasicQuaternion<Real> operator-(const BasicQuaternion<Real>& x) {
  return {-x.a, -x.b, -x.c, -x.d};
}
template <typename Real>
constexpr BasicQuaternion<Real> operator*(BasicQuaternion<Real> x, Real s) {
  return x *= s;
}
template <typename Real>
constexpr BasicQuaternion<Real> operator*(Real s, BasicQuaternion<Real> x) {
  return x *= s;
}
template <typename Real>
constexpr BasicQuaternion<Real> operator/(BasicQuaternion<Real> x, Real s) {
  return x /= s;
}

template <typename Real>
std::ostream& operator<<(std::ostream& os, const BasicQuaternion<Real>& x) {
  return os << x.a << (x.b < 0 ? "" : "+") << x.b << "i" << (x.c < 0 ? "" : "+") << x.c << "j"
            << (x.d < 0 ? "" : "+") << x.d << "k";
}

}  // namespace qmp
