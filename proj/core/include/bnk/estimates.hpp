#pragma once

#include <cstdint>
#include <vector>

#include "bnk/grid.hpp"
#include "bnk/scheme.hpp"

namespace bnk {

// Least-squares fit of log M_{2+gamma}(t) = log c + e log t over the earliest
// positive-time records. A grid on a bounded box cannot certify a genuine moment
// blow-up (its moments stay finite); the fit reports the divergence trend only.
struct PowerFit {
  double c = 0.0;
  double exponent = 0.0;
  int points_used = 0;
};
PowerFit blowup_rate_fit(const TimeSeries& series, int max_points = 8);

// Convolution-decay estimate: for v off the node set,
//   L(v) = h^d sum_j f_j |v - v_j|^{-alpha}
// should satisfy L(v) (1+|v|)^b <= C (|f|_{L1_s1} + |f|_{Linf_s2}) with
// b = min(alpha, s1 + alpha (s2 - s1)/d). c_hat is the fitted C: stable under grid
// refinement when the estimate is sharp-order.
struct IntegrationLemmaReport {
  double c_hat = 0.0;
  double b_exponent = 0.0;
  int samples = 0;
  bool all_finite = false;
};
IntegrationLemmaReport check_integration_lemma(const Distribution& f, double alpha,
                                               double s1, double s2, int samples,
                                               std::uint64_t seed = 23);

// Surface-potential bound on the sphere S_r(a) with the *unit-normalized* uniform
// measure: I(v) = avg_{S_r(a)} |v - v1|^{-alpha} <= C r^{-alpha}. Evaluated through
// the exact 1-D polar reduction; alpha = 0 gives I = 1 identically.
struct SphereBoundReport {
  double c_hat_near = 0.0;  // fitted over | |v-a| - r | <= r/2
  double c_hat_far = 0.0;   // fitted over the complement
  double c_hat = 0.0;       // overall sup of I(v) r^alpha
  int samples = 0;
  bool all_finite = false;
};
SphereBoundReport check_sphere_bound(const Vec& a, double r, double alpha, int d,
                                     int samples = 64, std::uint64_t seed = 29);

// Gaussian concentration on a sphere: phi_n(x) = sqrt(n/2pi) exp(-n dist(x,E)^2/2)
// for the hyperplane E = {x : <x, normal> = offset}, integrated over S_r(a) with
// the true surface measure and scaled by r^{-(d-2)}. The 1-D polar reduction is
// exact; for d = 3 it is cross-checked against the 2-D product quadrature, and the
// supremum over the n-ladder must stay below the d = 3 ceiling 2 pi.
struct DeltaConcentrationReport {
  std::vector<double> ladder_values;
  double sup_value = 0.0;
  double c_d_estimate = 0.0;
  double reduction_gap = 0.0;  // d = 3 only: max relative gap vs 2-D quadrature
  bool bounded_ok = false;
};
DeltaConcentrationReport check_delta_concentration(const Vec& normal, double offset,
                                                   const Vec& a, double r,
                                                   const std::vector<double>& n_ladder,
                                                   int d);

// Weighted-decay Gronwall bound: any psi with
//   psi' <= -C1 (1+|v|)^alpha psi + C2 psi + C3 (1+|v|)^{-beta}
// satisfies, for (1+|v|)^alpha >= 2 C2/C1,
//   (1+|v|)^{alpha+beta} psi(t) <= (1+|v|)^{alpha+beta} psi(0) + 2 C3/C1.
// The extremal equation (inequality as equality) is integrated with adaptive RK4
// and compared against its closed form; max_excess is the worst lhs - rhs.
struct DecayOdeReport {
  double max_excess = 0.0;
  double oracle_gap = 0.0;   // max relative gap, RK4 vs closed form
  double v_threshold = 0.0;  // (2 C2/C1)^{1/alpha} - 1
  int samples = 0;           // (v, psi0) pairs actually checked
  bool all_ok = false;
};
DecayOdeReport check_decay_ode(double c1, double c2, double c3, double alpha,
                               double beta, const std::vector<double>& v_samples,
                               double t_horizon);

}  // namespace bnk
