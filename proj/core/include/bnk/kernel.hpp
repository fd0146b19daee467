#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "bnk/vec.hpp"

namespace bnk {

// Angular part b(cos theta) of the collision kernel B = C_phi |v - v*|^gamma b.
// Either a positive constant or a table of (cos theta, b) pairs with monotone
// piecewise-linear interpolation — linear interpolation of positive samples stays
// positive and bounded, which is exactly the strong cut-off requirement on b.
class AngularKernel {
 public:
  AngularKernel() : constant_(1.0) {}
  static AngularKernel constant(double value);
  // pairs (x, b(x)) with x in [-1, 1]; need not be sorted. Values must be > 0,
  // finite; the table is completed to the endpoints by constant extension.
  static AngularKernel table(std::vector<std::pair<double, double>> samples);

  double operator()(double cos_theta) const;
  bool is_constant() const { return table_.empty(); }
  double constant_value() const { return constant_; }
  double sup() const;  // b_infinity

  const std::vector<std::pair<double, double>>& samples() const { return table_; }

 private:
  double constant_ = 1.0;
  std::vector<std::pair<double, double>> table_;  // sorted by x when non-empty
};

struct KernelParams {
  double c_phi = 1.0;   // kernel strength C_phi > 0
  double gamma = 1.0;   // hard-potential exponent, in [0, 1], and <= d - 2
  int d = 3;            // velocity dimension, >= 3
  AngularKernel b;

  void validate() const;  // throws std::invalid_argument on contract violations
};

// b_infinity = sup b and l_b = |S^{d-2}| int_0^pi b(cos theta) sin^{d-2}theta dtheta.
// For constant b, l_b = b |S^{d-1}| in closed form; tabulated kernels integrate the
// piecewise-linear profile (exact for d = 3 where the weight is sin theta dtheta =
// dx; adaptive quadrature otherwise).
struct AngularConstants {
  double b_inf = 0.0;
  double l_b = 0.0;
};
AngularConstants angular_constants(const KernelParams& params);

// Post-collision velocities of the sigma-parametrization:
//   v'  = (v + v*)/2 + (|v - v*|/2) sigma
//   v'* = (v + v*)/2 - (|v - v*|/2) sigma
// Throws if |sigma| deviates from 1 by more than 1e-12.
std::pair<Vec, Vec> post_collision(const Vec& v, const Vec& v_star, const Vec& sigma);

// The beta / Y / Z split of |v'|^2:
//   cos theta = <(v - v*)/|v - v*|, sigma>,   beta = (1 + cos theta)/2 in [0, 1],
//   Y = beta |v|^2 + (1 - beta)|v*|^2,
//   Z = (|v - v*|/2) <v + v*, sigma> - (cos theta / 2)(|v|^2 - |v*|^2),
// so that Y + Z = |v'|^2, Z is odd in sigma, and beta(sigma) + beta(-sigma) = 1.
// Throws on the degenerate pair v = v* (no direction to project on).
struct SigmaSplit {
  double beta = 0.0;
  double Y = 0.0;
  double Z = 0.0;
  double cos_theta = 0.0;
};
SigmaSplit sigma_split(const Vec& v, const Vec& v_star, const Vec& sigma);

// Kernel value C_phi (|v - v*| ^ gamma) b(cos theta), with |v - v*| replaced by
// min(n, |v - v*|) under truncation. Degenerate pair v = v*: zero for gamma > 0
// (the relative speed factor vanishes); for gamma = 0 the integrand is still
// defined with v' = v'* = v and cos theta is taken as sigma . e1 by convention
// (irrelevant for constant b; the convention only fixes which table entry a
// tabulated kernel reads on a measure-zero set).
double kernel_value(const Vec& v, const Vec& v_star, const Vec& sigma,
                    const KernelParams& params,
                    std::optional<double> truncation = std::nullopt);

// A fully assembled collision triple with its derived geometry; convenience for
// the sampling suites.
struct CollisionTriple {
  Vec v, v_star, sigma;
  Vec v_prime, v_star_prime;
  double cos_theta = 0.0;
  double beta = 0.0;
  double Y = 0.0;
  double Z = 0.0;
};
CollisionTriple make_triple(const Vec& v, const Vec& v_star, const Vec& sigma);

}  // namespace bnk
