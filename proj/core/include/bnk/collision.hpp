#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "bnk/grid.hpp"
#include "bnk/kernel.hpp"
#include "bnk/quadrature.hpp"
#include "bnk/vec.hpp"

namespace bnk {

// Quadrature for the (v*, sigma) integrals of the gain/loss operators: midpoint
// over all grid nodes in v*, a product sphere rule in sigma, and multilinear
// interpolation for the off-grid post-collision velocities. The sphere rule is
// kept alongside its generating orders because the pair-symmetrized evaluation
// needs the antipode pairing, which is an index property of the product layout.
struct QuadratureSpec {
  SphereRule rule;
  int order_theta = 16;
  int order_phi = 32;

  static QuadratureSpec product(int d, int order_theta = 16, int order_phi = 0);
};

// Values of the gain, loss and total collision operators at the grid nodes:
// q_total = q_plus - f * q_minus nodewise, with q_plus, q_minus >= 0 for f >= 0.
struct CollisionField {
  VelocityGrid grid;
  std::vector<double> q_plus;
  std::vector<double> q_minus;
  std::vector<double> q_total;
};

// Conservation ledger accumulated inside q_apply from the symmetrized weak form.
// `mass` is identically zero by construction (the psi = 1 bracket cancels before
// any arithmetic happens), so it is stored only to make that explicit in reports.
// `energy` is the weak-form value for psi = |v|^2, whose bracket cancels up to
// floating-point rounding of the collision geometry; `*_scale` are the matching
// positive-part magnitudes used for relative comparisons.
struct WeakLedger {
  double mass = 0.0;
  double energy = 0.0;
  double mass_scale = 0.0;
  double energy_scale = 0.0;
};

// Pointwise loss operator
//   Q^-(f)(v) = C_Phi sum_{v*} sum_sigma w h^d (min(n,|v-v*|))^gamma b(cos theta)
//               f(v*) (1 + f(v') + f(v'*)),
// with f(v'), f(v'*) interpolated. Non-negative for f >= 0.
double q_minus(const Distribution& f, const Vec& v, const KernelParams& params,
               const QuadratureSpec& quad, std::optional<double> truncation = {});

// Pointwise gain operator
//   Q^+(f)(v) = C_Phi sum_{v*} sum_sigma w h^d (min(n,|v-v*|))^gamma b(cos theta)
//               f(v') f(v'*) (1 + f(v) + f(v*)).
double q_plus(const Distribution& f, const Vec& v, const KernelParams& params,
              const QuadratureSpec& quad, std::optional<double> truncation = {});

// Full-grid evaluation of both operators. Exploits the exact sigma -> -sigma and
// (v, v*) exchange symmetries of the quadrature (antipodal node pairing), so each
// unordered node pair is visited once; results agree with the pointwise
// definitions up to summation order. If `ledger` is non-null the weak-form
// conservation sums are accumulated in the same pass. `threads` > 1 partitions
// the pair loop into row slabs merged in slab order, so results are reproducible
// for a fixed thread count.
CollisionField q_apply(const Distribution& f, const KernelParams& params,
                       const QuadratureSpec& quad, std::optional<double> truncation = {},
                       int threads = 1, WeakLedger* ledger = nullptr);

using TestFunction = std::function<double(const Vec&)>;

struct WeakFormResult {
  double value = 0.0;  // (C_Phi/2) sum q(f) [psi'* + psi' - psi* - psi]
  double scale = 0.0;  // same sum with the bracket replaced by |psi'*|+|psi'|+|psi*|+|psi|
};

// Weak form of the collision operator (gain and loss fused through the bracket):
//   (C_Phi/2) sum_{v,v*,sigma} w h^{2d} |v-v*|^gamma b f f* (1 + f' + f'*)
//                                   [psi(v'*) + psi(v') - psi(v*) - psi(v)].
// For collision invariants the bracket cancels independently of interpolation
// quality, so this is the conservation oracle for the strong-form field.
WeakFormResult weak_form_detail(const Distribution& f, const TestFunction& psi,
                                const KernelParams& params, const QuadratureSpec& quad,
                                std::optional<double> truncation = {});

// Shared-pass evaluation for several test functions (the f', f'* interpolations
// dominate the cost and are common to all of them).
std::vector<WeakFormResult> weak_form_multi(const Distribution& f,
                                            const std::vector<TestFunction>& psis,
                                            const KernelParams& params,
                                            const QuadratureSpec& quad,
                                            std::optional<double> truncation = {});

double weak_form(const Distribution& f, const TestFunction& psi, const KernelParams& params,
                 const QuadratureSpec& quad, std::optional<double> truncation = {});

// Carleman-representation evaluation of the gain term:
//   Q^+(f)(v) = 2^{d-1} C_Phi sum_{v' : |v'-v| >= h/2} h^d f(v') / |v-v'|
//               sum_{w in plane lattice, w perp (v-v')} h^{d-1}
//               (r^2+|w|^2)^{(gamma-(d-2))/2} b((|w|^2-r^2)/(|w|^2+r^2))
//               f(v+w) (1 + f(v) + f(v* = v' + (v+w) - v)),
// i.e. grid quadrature in v' and midpoint quadrature over the hyperplane through
// v orthogonal to v-v'. The excluded half-cell ball around v is an O(h^{1+gamma})
// bias that refines away. Requires gamma <= d-2.
double q_plus_carleman(const Distribution& f, const Vec& v, const KernelParams& params);

// f'f'*(1+f+f*) - ff*(1+f'+f'*) on one collision triple with f the regular
// Bose-Einstein density (beta, mu), mu < 0; analytically zero.
double detailed_balance_residual(double beta, double mu, const CollisionTriple& triple);

}  // namespace bnk
