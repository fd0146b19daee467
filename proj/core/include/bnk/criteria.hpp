#pragma once

#include <optional>

#include "bnk/collision.hpp"
#include "bnk/scheme.hpp"

namespace bnk {

// ---- equilibrium family ------------------------------------------------------

struct OccupationValue {
  double value = 0.0;
  bool singular = false;  // condensate pole: mu = 0 and v = u
};

// Regular part of the entropy-maximizing occupation 1/(e^{beta(|v-u|^2-mu)/2} - 1).
// The pole is reported through `singular` together with a large finite sentinel so
// callers never meet an infinity.
OccupationValue equilibrium_occupation(double beta, double mu, const Vec& u, const Vec& v,
                                       int d);

// Coefficient conventions for the no-condensate threshold M0 <= coeff * M2^{3/5}
// (d = 3 closed forms). kQuoted uses (4pi/3)^{3/5} zeta(3/2)/zeta(5/2)^{3/5};
// kSelfConsistent eliminates beta from the explicit mu = 0 equilibrium moments and
// gives (2pi/3)^{3/5} zeta(3/2)/zeta(5/2)^{3/5}. They differ by exactly 2^{3/5};
// both are exposed, and self-consistent is the default because it round-trips
// be_mass_energy to rounding.
enum class SubcriticalMode { kQuoted, kSelfConsistent };

struct SubcriticalVerdict {
  bool subcritical = false;
  double threshold = 0.0;    // coefficient * M2^{3/5}
  double coefficient = 0.0;
};

SubcriticalVerdict subcritical_check(double m0, double m2,
                                     SubcriticalMode mode = SubcriticalMode::kSelfConsistent);

struct PhysicalUnits {
  double particle_mass = 1.0;
  double boltzmann = 1.0;
};

// Condensation temperature T_c = (m zeta(5/2) / (2 pi k_B zeta(3/2))) (M0/zeta(3/2))^{2/3}.
double critical_temperature(double m0, const PhysicalUnits& units = {});

struct EquilibriumFit {
  double condensate = 0.0;  // mass of the singular part; condensate * mu = 0
  double beta = 0.0;
  double mu = 0.0;
  Vec u{};
  double residual_m0 = 0.0;  // relative residuals of the moment match
  double residual_m2 = 0.0;
  bool converged = false;
};

struct FitFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Matches (M0, M2) by the equilibrium state in the frame moving at u (d = 3).
// Below the condensation threshold a damped 2-D Newton iteration (mu kept negative
// through mu = -e^y) solves for (beta, mu), with a monotone bisection fallback in
// the fugacity; at or above the threshold mu = 0, beta is fixed by M2 alone and the
// mass excess becomes the condensate. Relative residual target 1e-10.
EquilibriumFit equilibrium_fit(double m0, const Vec& u, double m2);

// ---- loss-operator lower bounds ------------------------------------------------

struct LossBounds {
  double measured = 0.0;      // q_minus(f, v) by quadrature
  double moment_bound = 0.0;  // C_Phi l_b (1+|v|^gamma) M0 - C_Phi C_gamma l_b ||f||_{L1_2}
  double sup_bound = 0.0;     // C_Phi l_b M0^{1+g} ||f||_inf^{-g} / (2^{1+g} |S^{d-1}|^g),
                              //   g = gamma/(d-1)
  double conc_bound = 0.0;    // C_Phi l_b M0 R0^gamma / 2 under the concentration hypothesis
  bool conc_hypothesis_met = false;  // R0^{d-1-gamma} sup-concentration(f) <= M0 / 2
};

// The three quantitative floors of the loss term at velocity v, each next to the
// measured value. The concentration-based floor is only meaningful when r0 is
// given and its hypothesis holds; the flag says which.
LossBounds loss_lower_bounds(const Distribution& f, const Vec& v, const KernelParams& params,
                             const QuadratureSpec& quad, std::optional<double> r0 = {});

// ---- regularity exponent --------------------------------------------------------

// sbar = min{ s, (d/(1+gamma)) (s - d + 1 + gamma + 2(1+gamma)/d) }; equals s
// whenever d = 3 or s >= d (for gamma in [0,1]).
double regularity_exponent(double s, int d, double gamma);

// ---- global-existence criterion --------------------------------------------------

// Sub-constants of the assembled gain-control constant C_Q: the hyperplane weight
// integral int_{R^{d-1}} (1+|w|^s)^{-1} dw (requires s > d-1) and the singular-
// kernel factor |S^{d-1}| / min(gamma+d-1, 1+gamma).
double c_sd_constant(double s, int d);
double c_dgamma_constant(int d, double gamma);

struct GlobalCriterionReport {
  double r0 = 0.0;
  double gamma0 = 0.0;
  double q_tilde0 = 0.0;
  double q0_bound = 0.0;  // 1/(24 |S^{d-1}| r0)
  double gamma_f0 = 0.0;  // sup-concentration of f0 at radius r0
  bool condition_i = false;   // q_tilde0 <= q0_bound
  bool condition_ii = false;  // gamma_f0 <= gamma0

  // Assembled constant and its ingredients, recorded so verdicts are reproducible.
  double c_q = 0.0;
  double c_sd = 0.0;
  double c_dgamma = 0.0;
  double s = 0.0;
  double m0 = 0.0;
  double linf = 0.0;
  double linf_weighted = 0.0;
  double regime_exponent = 0.0;  // d(gamma-1)+1: sign decides how amplitude enters

  // Bootstrap monitor results (filled by monitor_bootstrap).
  bool t_m_reached = false;
  double t_m_estimate = 0.0;      // first exit time from the 3x window, if reached
  double max_linf_ratio = 0.0;    // max_t ||f(t)||_inf / ||f0||_inf
  double max_gamma_ratio = 0.0;   // max_t concentration / gamma0
  bool recovery_linf_held = true;   // ratio stayed <= 2 throughout
  bool recovery_gamma_held = true;  // ratio stayed <= 5/2 throughout
};

// Evaluates the algebraic global-existence conditions on initial data: the
// concentration radius r0, budget gamma0, the rational functional q_tilde0 of
// (M0, ||f0||_inf, ||f0||_{L^inf_s}), and its admissibility bound. s is the weight
// order of the L^inf_s norm; gamma_stride thins the sup-concentration scan.
GlobalCriterionReport global_criterion(const Distribution& f0, const KernelParams& params,
                                       double s = 4.0, int gamma_stride = 1);

// Scans a trajectory for the first exit from the bootstrap window (linf above
// 3||f0||_inf or concentration above 3 gamma0) and whether the stronger recovery
// targets (2x, 5/2x) ever broke. The series' concentration column must have been
// recorded at radius report.r0.
void monitor_bootstrap(const TimeSeries& series, GlobalCriterionReport& report,
                       const Distribution& f0);

// ---- energy floor from the cubic bound (d = 3, gamma = 1) -----------------------

// Unique real root of x^3 + (r0^{4/3}/6^{2/3}) x - r0^2.
double cardano_cubic_root(double r0);

// Least energy compatible with mass m0 and amplitude linf_f0:
//   M2 >= bracket^3 / (32 pi^{2/3}) * m0^{5/3} / linf_f0^{2/3},
// bracket = (1+sqrt(244/243))^{1/3} + (1-sqrt(244/243))^{1/3}. Only the d = 3,
// gamma = 1 reduction is closed-form; other inputs are rejected.
double cardano_subcritical_bound(double m0, double linf_f0, int d = 3, double gamma = 1.0);

}  // namespace bnk
