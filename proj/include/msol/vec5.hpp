#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace msol {

/// A point or vector of R^5.
struct Vec5 {
  std::array<double, 5> c{};

  constexpr double& operator[](std::size_t i) { return c[i]; }
  constexpr double operator[](std::size_t i) const { return c[i]; }

  static constexpr Vec5 unit(std::size_t i, double s = 1.0) {
    Vec5 v;
    v.c[i] = s;
    return v;
  }

  constexpr Vec5& operator+=(const Vec5& o) {
    for (std::size_t i = 0; i < 5; ++i) c[i] += o.c[i];
    return *this;
  }
  constexpr Vec5& operator-=(const Vec5& o) {
    for (std::size_t i = 0; i < 5; ++i) c[i] -= o.c[i];
    return *this;
  }
  constexpr Vec5& operator*=(double s) {
    for (auto& v : c) v *= s;
    return *this;
  }
  constexpr Vec5& operator/=(double s) {
    for (auto& v : c) v /= s;
    return *this;
  }
  friend constexpr bool operator==(const Vec5&, const Vec5&) = default;
};

using Point5 = Vec5;

constexpr Vec5 operator+(Vec5 a, const Vec5& b) { return a += b; }
constexpr Vec5 operator-(Vec5 a, const Vec5& b) { return a -= b; }
constexpr Vec5 operator-(Vec5 a) { return a *= -1.0; }
constexpr Vec5 operator*(Vec5 a, double s) { return a *= s; }
constexpr Vec5 operator*(double s, Vec5 a) { return a *= s; }
constexpr Vec5 operator/(Vec5 a, double s) { return a /= s; }

constexpr double dot(const Vec5& a, const Vec5& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < 5; ++i) s += a.c[i] * b.c[i];
  return s;
}
constexpr double norm2(const Vec5& a) { return dot(a, a); }
inline double norm(const Vec5& a) { return std::sqrt(norm2(a)); }

inline bool all_finite(const Vec5& a) {
  for (double v : a.c)
    if (!std::isfinite(v)) return false;
  return true;
}

/// Symmetric 5x5 matrix, row-major.
struct Mat5 {
  std::array<double, 25> m{};
  constexpr double& operator()(std::size_t i, std::size_t j) {
    return m[5 * i + j];
  }
  constexpr double operator()(std::size_t i, std::size_t j) const {
    return m[5 * i + j];
  }
};

constexpr Vec5 operator*(const Mat5& a, const Vec5& v) {
  Vec5 r;
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) r.c[i] += a(i, j) * v.c[j];
  return r;
}

}  // namespace msol
