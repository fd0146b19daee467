#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "bnk/vec.hpp"

namespace bnk {

// Surface area of the unit sphere S^{d-1}: 2 pi^{d/2} / Gamma(d/2).
inline double sphere_area(int d) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

// Gauss-Legendre nodes/weights on [-1, 1], by Newton iteration on P_n. The nodes
// come out symmetric about 0 (x_{n-1-i} = -x_i), which the collision loops rely on:
// the sigma -> -sigma pairing must be exact in the rule, not just in the measure.
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

inline GaussRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Tricomi-style initial guess, then Newton on P_n(x).
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 0; k < n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k + 1.0) * x * p1 - k * p2) / (k + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.x[i] = -x;
    r.x[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    r.w[i] = w;
    r.w[n - 1 - i] = w;
  }
  // Enforce exact antisymmetry (the Newton iterations for +-x are the same numbers,
  // but make the invariant explicit for odd n: the middle node is exactly 0).
  if (n % 2 == 1) r.x[n / 2] = 0.0;
  return r;
}

// Quadrature rule on the unit sphere S^{d-1}.
struct SphereRule {
  std::vector<Vec> nodes;      // unit vectors
  std::vector<double> weights; // positive, summing to |S^{d-1}|
  int d = 3;

  std::size_t size() const { return nodes.size(); }
};

// Product rule for S^2: Gauss-Legendre in cos(theta) x uniform in phi. Exact for
// spherical polynomials up to degree min(2*order_theta - 1, order_phi - 1); the
// default 16 x 32 is far beyond the degree-2 sigma-polynomials appearing in the
// collision geometry identities. Nodes come in antipodal pairs: (x_i, phi_j) pairs
// with (-x_i, phi_j + pi), both present because the Gauss nodes are symmetric and
// the phi count is even.
inline SphereRule sphere_quadrature(int d, int order_theta, int order_phi = 0) {
  if (d != 3) {
    throw std::invalid_argument("sphere_quadrature: only d = 3 product rules are supported");
  }
  if (order_theta < 1) throw std::invalid_argument("sphere_quadrature: unsupported order");
  if (order_phi <= 0) order_phi = 2 * order_theta;
  if (order_phi % 2 != 0) {
    throw std::invalid_argument("sphere_quadrature: phi count must be even (antipodal pairing)");
  }
  const GaussRule g = gauss_legendre(order_theta);
  SphereRule rule;
  rule.d = 3;
  rule.nodes.reserve(static_cast<std::size_t>(order_theta) * order_phi);
  rule.weights.reserve(rule.nodes.capacity());
  const double wphi = 2.0 * std::numbers::pi / order_phi;
  for (int i = 0; i < order_theta; ++i) {
    const double ct = g.x[i];
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    for (int j = 0; j < order_phi; ++j) {
      const double phi = (2.0 * std::numbers::pi * j) / order_phi;
      rule.nodes.push_back(vec3(st * std::cos(phi), st * std::sin(phi), ct));
      rule.weights.push_back(g.w[i] * wphi);
    }
  }
  return rule;
}

// Index of the antipode of node k in the rule built above: theta row i -> row
// (n_theta-1-i), phi column j -> (j + n_phi/2) mod n_phi.
inline std::size_t antipode_index(std::size_t k, int order_theta, int order_phi) {
  const std::size_t i = k / order_phi;
  const std::size_t j = k % order_phi;
  const std::size_t ia = static_cast<std::size_t>(order_theta) - 1 - i;
  const std::size_t ja = (j + static_cast<std::size_t>(order_phi) / 2) % order_phi;
  return ia * order_phi + ja;
}

// Adaptive Simpson on [a, b]. Used for the angular-kernel constant l_b on tabulated
// kernels and the slowly varying 1-D reductions in the estimate checks; tolerances
// there are 1e-10 .. 1e-12 over smooth integrands, well inside this scheme's reach.
namespace detail {
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a,
                                   double b, double fa, double fm, double fb,
                                   double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(f, a, m, fa, flm, fm);
  const double right = simpson(f, m, b, fm, frm, fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

inline double integrate_1d(const std::function<double(double)>& f, double a, double b,
                           double tol = 1e-12, int max_depth = 40) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = detail::simpson(f, a, b, fa, fm, fb);
  return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace bnk
