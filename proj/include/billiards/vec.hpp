#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace billiards {

/// Fixed-capacity real vector used for chart coordinates, tangent vectors and
/// ambient (embedding) coordinates. Unused trailing slots stay zero, so
/// Euclidean operations over all slots are valid for any dimension <= 4.
struct Vec {
  static constexpr std::size_t kCapacity = 4;
  std::array<double, kCapacity> c{};

  constexpr Vec() = default;
  constexpr Vec(double x, double y, double z = 0.0, double w = 0.0) : c{x, y, z, w} {}

  constexpr double& operator[](std::size_t i) { return c[i]; }
  constexpr double operator[](std::size_t i) const { return c[i]; }

  constexpr Vec& operator+=(const Vec& o) {
    for (std::size_t i = 0; i < kCapacity; ++i) c[i] += o.c[i];
    return *this;
  }
  constexpr Vec& operator-=(const Vec& o) {
    for (std::size_t i = 0; i < kCapacity; ++i) c[i] -= o.c[i];
    return *this;
  }
  constexpr Vec& operator*=(double s) {
    for (auto& x : c) x *= s;
    return *this;
  }
  constexpr Vec& operator/=(double s) {
    for (auto& x : c) x /= s;
    return *this;
  }
  friend constexpr bool operator==(const Vec&, const Vec&) = default;
};

constexpr Vec operator+(Vec a, const Vec& b) { return a += b; }
constexpr Vec operator-(Vec a, const Vec& b) { return a -= b; }
constexpr Vec operator*(Vec a, double s) { return a *= s; }
constexpr Vec operator*(double s, Vec a) { return a *= s; }
constexpr Vec operator/(Vec a, double s) { return a /= s; }
constexpr Vec operator-(Vec a) { return a *= -1.0; }

/// Plain Euclidean dot product over all slots.
constexpr double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < Vec::kCapacity; ++i) s += a.c[i] * b.c[i];
  return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Vec normalized(const Vec& a) { return a / norm(a); }

/// Cross product of the first three slots.
constexpr Vec cross(const Vec& a, const Vec& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline double max_abs_diff(const Vec& a, const Vec& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < Vec::kCapacity; ++i) m = std::fmax(m, std::fabs(a.c[i] - b.c[i]));
  return m;
}

/// Unit basis vector e_i.
constexpr Vec basis(std::size_t i) {
  Vec e;
  e.c[i] = 1.0;
  return e;
}

}  // namespace billiards
