#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace bnk {

// Velocities live in R^d with d a runtime parameter (d >= 3, d <= kMaxDim).
// A fixed-capacity array avoids heap traffic in the collision quadrature loops,
// which touch ~1e9 of these per desk-scale run.
inline constexpr std::size_t kMaxDim = 4;

struct Vec {
  std::array<double, kMaxDim> c{0.0, 0.0, 0.0, 0.0};
  int d = 3;

  double& operator[](std::size_t i) { return c[i]; }
  double operator[](std::size_t i) const { return c[i]; }
};

inline Vec vec3(double x, double y, double z) {
  Vec v;
  v.d = 3;
  v.c = {x, y, z, 0.0};
  return v;
}

inline Vec zero_vec(int d) {
  Vec v;
  v.d = d;
  return v;
}

inline Vec operator+(Vec a, const Vec& b) {
  for (int i = 0; i < a.d; ++i) a.c[i] += b.c[i];
  return a;
}

inline Vec operator-(Vec a, const Vec& b) {
  for (int i = 0; i < a.d; ++i) a.c[i] -= b.c[i];
  return a;
}

inline Vec operator*(double s, Vec a) {
  for (int i = 0; i < a.d; ++i) a.c[i] *= s;
  return a;
}

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (int i = 0; i < a.d; ++i) s += a.c[i] * b.c[i];
  return s;
}

inline double norm2(const Vec& a) { return dot(a, a); }

inline double norm(const Vec& a) { return std::sqrt(norm2(a)); }

}  // namespace bnk
