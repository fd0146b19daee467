#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bnk/collision.hpp"
#include "bnk/grid.hpp"
#include "bnk/kernel.hpp"

namespace bnk {

// Constructive constants of the truncated explicit Euler scheme:
//   C_L    = C_Phi l_b M0
//   K_inf  = 2 ||f0||_inf / min(1, C_L)
//   E_inf  = sup-hyperplane(f0) + C_{+E} M0 (1+2K_inf) [ |S^{d-1}| K_inf/(d+gamma-1) + M0 ]
//   C_inf  = C_Phi C_gamma l_b (M0+M2) K_inf
//            + C_+ E_inf (1+2K_inf) [ |S^{d-1}| K_inf/(1+gamma) + M0 ]
//   T0     = min(1, K_inf min(1, C_L) / (2 C_inf))
//   Delta_n = min(1, 1 / (2 C_Phi l_b n^gamma M0 (1+2K_inf)))
// with C_+ = 2^{d-1} C_Phi b_inf and C_{+E} = C_d C_Phi b_inf (C_d the hyperplane
// concentration constant: 2 pi for d = 3, numerically bounded otherwise).
struct SchemeConstants {
  double n = 0.0;  // truncation level of the kernel
  double c_L = 0.0;
  double k_inf = 0.0;
  double e_inf = 0.0;
  double c_inf = 0.0;
  double t0 = 0.0;
  double delta_n = 0.0;
  double c_gamma = 0.0;
  double c_plus = 0.0;
  double c_plus_E = 0.0;
  double c_d = 0.0;
  double loss_rate = 0.0;  // 2 C_Phi l_b n^gamma M0 (1+2K_inf); delta_n * loss_rate <= 1
  // Ingredients, kept for reports.
  double m0 = 0.0;
  double m2 = 0.0;
  double sup_f0 = 0.0;
  double hyperplane_sup_f0 = 0.0;
  double l_b = 0.0;
  double b_inf = 0.0;

  void assert_invariants() const;  // delta_n, t0 contracts; throws on violation
};

// sup_{x >= 0} (1 + x^gamma) / (1 + x^2); equals 2 at gamma = 0 and (1+sqrt 2)/2
// at gamma = 1.
double c_gamma_constant(double gamma);

// The Gaussian-hyperplane concentration constant C_d: exactly 2 pi for d = 3; for
// d > 3 an empirical supremum of the 1-D reduced integral with a 10% margin.
double delta_concentration_constant(int d);

SchemeConstants scheme_constants(const Distribution& f0, const KernelParams& params, double n,
                                 const HyperplaneSampleSpec& hp_spec);

struct StepRejected : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One explicit Euler step f <- f (1 - dt Q^-_n(f)) + dt Q^+_n(f). Throws
// StepRejected when dt ||Q^-_n||_inf > 1 (the update could not preserve
// positivity); asserts the produced state is non-negative whenever the margin
// dt ||Q^-_n||_inf <= 1/2 holds. The ledger, if given, receives the weak-form
// conservation sums of the state that was stepped FROM.
Distribution euler_step(const Distribution& f, double dt, double n,
                        const KernelParams& params, const QuadratureSpec& quad,
                        int threads = 1, WeakLedger* ledger = nullptr);

struct DriftRecord {
  double mass_weak = 0.0;    // cumulative weak-form mass ledger / M0(f0): exactly 0
  double energy_weak = 0.0;  // cumulative weak-form energy ledger / M2(f0)
  double mass_strong = 0.0;  // (M0(f_k) - M0(f0)) / M0(f0): interpolation bias
  double energy_strong = 0.0;
};

struct TimeSeries {
  std::vector<double> times;
  std::vector<MomentsRecord> records;  // one per recorded state (t = 0 included)
  std::vector<DriftRecord> drifts;
  bool blown_up = false;
  int blowup_step = -1;
  double t_max_estimate = 0.0;  // valid when blown_up
  std::vector<std::string> notes;
};

struct SegmentOptions {
  int threads = 1;
  bool keep_states = false;         // retain every accepted state (invariant checks)
  double blowup_ceiling = 100.0;    // halt when ||f||_inf > ceiling * ||f0||_inf
  double user_dt = 0.0;             // 0: constructive step Delta_n; else min(user_dt, Delta_n)
  double gamma_R0 = 1.0;            // concentration radius for the diagnostics record
  int gamma_stride = 1;
  HyperplaneSampleSpec hp_spec;
  std::function<void(int, const Distribution&)> on_state;  // snapshot hook
};

struct SegmentResult {
  TimeSeries series;
  Distribution final_state;
  SchemeConstants constants;
  std::vector<Distribution> states;  // filled when keep_states
};

// Runs one T0-segment: iterates the Euler step for k = 0 .. floor(T0/dt), so the
// recorded trajectory covers [0, T0] and ends on the first step-lattice time at
// or past T0. A zero-mass f0 yields a frozen zero trajectory (the scheme
// constants are undefined there, but so is the dynamics: Q = 0).
SegmentResult run_segment(const Distribution& f0, const KernelParams& params, double n,
                          const QuadratureSpec& quad, const SegmentOptions& opts = {});

// Chains `segments` T0-segments, recomputing the scheme constants from the state
// reached at the end of each one. Halts early on the blow-up flag and records the
// halt time estimate.
SegmentResult continue_run(const Distribution& f0, const KernelParams& params, double n,
                           int segments, const QuadratureSpec& quad,
                           const SegmentOptions& opts = {});

struct CheckLine {
  std::string name;
  bool ok = false;
  double margin = 0.0;  // positive = slack, negative = violation size
  std::string detail;
  bool gating = true;  // informational lines are reported but do not decide all_ok
};

struct SchemeInvariantReport {
  std::vector<CheckLine> checks;
  bool all_ok = true;
};

struct InvariantOptions {
  double weak_tol = 1e-9;    // conservation tolerance on the weak-form ledger (decides pass/fail)
  double strong_tol = 1e-3;  // strong (nodewise) drift threshold; reported, never gating, because
                             // the strong ledger carries the interpolation bias of the quadrature
  double moment_s = 4.0;     // order of the L^1_s growth-envelope check (> 2)
  HyperplaneSampleSpec hp_spec;
};

// Report-only verification of the per-step bounds of the scheme on a stored
// trajectory: positivity, strong-form conservation against the initial state,
// the running-sum L^inf bound
//     sup_v [ f_k + dt sum_{j<k} (n^gamma ^ (1+|v|^gamma)) f_j ] <= K_inf,
// sampled hyperplane integrals of f_k <= E_inf, and the exponential L^1_s
// growth envelope ||f_k||_{L^1_s} <= e^{rate t_k} ||f0||_{L^1_s} with
// rate = 2 C_Phi C_s b_inf (1 + 2 max_k ||f_k||_inf) ||f0||_{L^1_2}.
SchemeInvariantReport verify_scheme_invariants(const TimeSeries& series,
                                               const std::vector<Distribution>& states,
                                               const SchemeConstants& constants,
                                               const KernelParams& params,
                                               const InvariantOptions& opts = {});

// C_s with |v'|^s + |v'*|^s - |v|^s - |v*|^s <= C_s (|v|^{s-1}|v*| + |v||v*|^{s-1})
// for energy-conserving collisions, s > 2; computed as the supremum of the exact
// two-variable reduction on the unit circle.
double cs_constant(double s);

struct TwinDivergence {
  double max_ratio = 0.0;    // max_t ||f - g||_1 / ||perturbation||_1
  double fitted_rate = 0.0;  // least-squares exponential rate of the ratio
};

// Stability probe: runs twin trajectories from f0 and from f0 plus a mass- and
// energy-neutral perturbation of relative L^1 size `perturbation_size` (sign
// flips with the sign of that argument). The perturbation pattern is a radial
// Gaussian times an even quartic chosen so its grid mass and energy vanish to
// rounding.
TwinDivergence twin_run_divergence(const Distribution& f0, double perturbation_size,
                                   const KernelParams& params, double n,
                                   const QuadratureSpec& quad,
                                   const SegmentOptions& opts = {});

// The neutral perturbation used by twin_run_divergence, exposed for tests.
Distribution neutral_perturbation(const Distribution& f0, double size);

}  // namespace bnk
