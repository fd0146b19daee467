#include "bnk/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "bnk/summation.hpp"

namespace bnk {

namespace {

// Dense scan followed by golden-section refinement of a unimodal-enough 1-D
// maximum; deterministic and accurate to ~1e-12 in the argument.
template <class F>
double scan_maximum(F&& f, double a, double b, int samples) {
  double best_x = a, best = f(a);
  for (int i = 1; i <= samples; ++i) {
    const double x = a + (b - a) * i / samples;
    const double y = f(x);
    if (y > best) {
      best = y;
      best_x = x;
    }
  }
  double lo = std::max(a, best_x - (b - a) / samples);
  double hi = std::min(b, best_x + (b - a) / samples);
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = f(x1);
    }
  }
  return std::max(best, std::max(f1, f2));
}

}  // namespace

double c_gamma_constant(double gamma) {
  if (gamma < 0.0 || gamma > 1.0)
    throw std::invalid_argument("c_gamma_constant: gamma must lie in [0, 1]");
  if (gamma == 0.0) return 2.0;
  if (gamma == 1.0) return 0.5 * (1.0 + std::sqrt(2.0));
  return scan_maximum(
      [gamma](double x) { return (1.0 + std::pow(x, gamma)) / (1.0 + x * x); }, 0.0, 8.0,
      4096);
}

double delta_concentration_constant(int d) {
  if (d < 3) throw std::invalid_argument("delta_concentration_constant: d >= 3");
  if (d == 3) return 2.0 * std::numbers::pi;
  // r^{2-d} * int_{S_r(a)} phi_n ds reduces to
  //   |S^{d-2}| r sqrt(n/2pi) int_0^pi exp(-n (delta + r cos t)^2 / 2) sin^{d-2} t dt,
  // where delta is the signed distance of the sphere's center to the plane.
  // Empirical supremum over a (delta, r, n) ladder with a 10% safety margin.
  const double sd2 = sphere_area(d - 1);
  double sup = 0.0;
  for (double n : {1.0, 4.0, 16.0, 64.0, 256.0}) {
    for (double r : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0}) {
      for (double delta : {0.0, 0.25, 0.5, 1.0, 2.0, 4.0}) {
        const double val =
            sd2 * r * std::sqrt(n / (2.0 * std::numbers::pi)) *
            integrate_1d(
                [n, r, delta, d](double t) {
                  const double z = delta + r * std::cos(t);
                  return std::exp(-0.5 * n * z * z) * std::pow(std::sin(t), d - 2);
                },
                0.0, std::numbers::pi, 1e-10);
        sup = std::max(sup, val);
      }
    }
  }
  return 1.1 * sup;
}

void SchemeConstants::assert_invariants() const {
  constexpr double kSlack = 1e-12;
  if (delta_n > 1.0 + kSlack)
    throw std::logic_error("SchemeConstants: delta_n exceeds 1");
  if (delta_n * loss_rate > 1.0 + kSlack)
    throw std::logic_error("SchemeConstants: per-step loss factor drops below 1/2");
  if (t0 > 1.0 + kSlack) throw std::logic_error("SchemeConstants: t0 exceeds 1");
  if (c_inf > 0.0 && t0 > k_inf * std::min(1.0, c_L) / (2.0 * c_inf) * (1.0 + kSlack))
    throw std::logic_error("SchemeConstants: t0 exceeds its contraction bound");
}

SchemeConstants scheme_constants(const Distribution& f0, const KernelParams& params, double n,
                                 const HyperplaneSampleSpec& hp_spec) {
  params.validate();
  f0.validate();
  if (!(n > 0.0)) throw std::invalid_argument("scheme_constants: truncation level must be > 0");
  if (f0.grid.d != params.d)
    throw std::invalid_argument("scheme_constants: dimension mismatch");

  SchemeConstants c;
  c.n = n;
  c.m0 = moment(f0, 0.0);
  if (!(c.m0 > 0.0)) throw std::invalid_argument("scheme_constants: zero-mass initial data");
  c.m2 = moment(f0, 2.0);
  c.sup_f0 = sup_norms(f0, 0.0).linf;
  c.hyperplane_sup_f0 = hyperplane_sup(f0, hp_spec);

  const AngularConstants ang = angular_constants(params);
  c.l_b = ang.l_b;
  c.b_inf = ang.b_inf;
  const int d = params.d;
  const double gamma = params.gamma;
  const double sd = sphere_area(d);

  c.c_gamma = c_gamma_constant(gamma);
  c.c_plus = std::ldexp(1.0, d - 1) * params.c_phi * c.b_inf;
  c.c_d = delta_concentration_constant(d);
  c.c_plus_E = c.c_d * params.c_phi * c.b_inf;

  c.c_L = params.c_phi * c.l_b * c.m0;
  c.k_inf = 2.0 * c.sup_f0 / std::min(1.0, c.c_L);
  const double occ = 1.0 + 2.0 * c.k_inf;
  c.e_inf = c.hyperplane_sup_f0 +
            c.c_plus_E * c.m0 * occ * (sd * c.k_inf / (d + gamma - 1.0) + c.m0);
  c.c_inf = params.c_phi * c.c_gamma * c.l_b * (c.m0 + c.m2) * c.k_inf +
            c.c_plus * c.e_inf * occ * (sd * c.k_inf / (1.0 + gamma) + c.m0);
  c.t0 = std::min(1.0, c.k_inf * std::min(1.0, c.c_L) / (2.0 * c.c_inf));
  c.loss_rate = 2.0 * params.c_phi * c.l_b * std::pow(n, gamma) * c.m0 * occ;
  c.delta_n = std::min(1.0, 1.0 / c.loss_rate);
  c.assert_invariants();
  return c;
}

Distribution euler_step(const Distribution& f, double dt, double n,
                        const KernelParams& params, const QuadratureSpec& quad, int threads,
                        WeakLedger* ledger) {
  if (!(dt > 0.0)) throw std::invalid_argument("euler_step: dt must be positive");
  CollisionField field = q_apply(f, params, quad, n, threads, ledger);
  double qm_inf = 0.0;
  for (double q : field.q_minus) qm_inf = std::max(qm_inf, q);
  if (dt * qm_inf > 1.0) {
    std::ostringstream os;
    os << "euler_step: step rejected, dt*||Q^-||_inf = " << dt * qm_inf << " > 1";
    throw StepRejected(os.str());
  }

  Distribution out = f;
  const std::size_t total = f.values.size();
  for (std::size_t i = 0; i < total; ++i)
    out.values[i] = f.values[i] * (1.0 - dt * field.q_minus[i]) + dt * field.q_plus[i];

  if (dt * qm_inf <= 0.5) {
    for (std::size_t i = 0; i < total; ++i) {
      if (out.values[i] < 0.0)
        throw std::logic_error("euler_step: negativity despite a valid positivity margin");
    }
  }
  return out;
}

namespace {

void append_record(TimeSeries& series, double t, const Distribution& f, double gamma,
                   const SegmentOptions& opts, double m0_ref, double m2_ref, double wmass,
                   double wenergy) {
  MomentsRecord rec = moments_record(f, gamma, opts.gamma_R0, opts.gamma_stride);
  DriftRecord drift;
  drift.mass_weak = wmass / m0_ref;
  drift.energy_weak = wenergy / m2_ref;
  drift.mass_strong = (rec.m0 - m0_ref) / m0_ref;
  drift.energy_strong = (rec.m2 - m2_ref) / m2_ref;
  series.times.push_back(t);
  series.records.push_back(rec);
  series.drifts.push_back(drift);
}

}  // namespace

SegmentResult run_segment(const Distribution& f0, const KernelParams& params, double n,
                          const QuadratureSpec& quad, const SegmentOptions& opts) {
  params.validate();
  f0.validate();
  SegmentResult res;
  res.final_state = f0;

  const double m0 = moment(f0, 0.0);
  if (m0 == 0.0) {
    // Q(0) = 0: the trajectory is frozen; the scheme constants are undefined
    // (K_inf = 0/0), so report a unit segment of the trivial dynamics instead.
    res.constants.n = n;
    res.constants.t0 = 1.0;
    res.constants.delta_n = 1.0;
    res.series.times = {0.0, 1.0};
    MomentsRecord zero_rec = moments_record(f0, params.gamma, opts.gamma_R0, opts.gamma_stride);
    res.series.records = {zero_rec, zero_rec};
    res.series.drifts.resize(2);
    if (opts.keep_states) res.states = {f0, f0};
    return res;
  }

  res.constants = scheme_constants(f0, params, n, opts.hp_spec);
  const double m2 = res.constants.m2;
  double dt = res.constants.delta_n;
  if (opts.user_dt > 0.0) dt = std::min(dt, opts.user_dt);
  // The states f^(k), k = 0..floor(T0/dt), carry the piecewise-constant
  // trajectory on [0, T0]; stepping once per index lands the final state on the
  // first lattice time at or past T0. When T0 < dt (strong data collapse T0
  // faster than Delta_n) that is a single step, still well defined since
  // positivity only needs dt * loss_rate <= 1.
  const int steps =
      static_cast<int>(std::floor(res.constants.t0 / dt * (1.0 + 1e-14))) + 1;
  const double ceiling = opts.blowup_ceiling * res.constants.sup_f0;

  Distribution f = f0;
  double wmass = 0.0;
  Kahan wenergy;
  append_record(res.series, 0.0, f, params.gamma, opts, m0, m2, 0.0, 0.0);
  if (opts.keep_states) res.states.push_back(f);
  if (opts.on_state) opts.on_state(0, f);

  for (int k = 0; k < steps; ++k) {
    WeakLedger ledger;
    Distribution next = euler_step(f, dt, n, params, quad, opts.threads, &ledger);
    wmass += dt * ledger.mass;  // identically zero, kept for symmetry of the ledger
    wenergy.add(dt * ledger.energy);
    f = std::move(next);

    append_record(res.series, dt * (k + 1), f, params.gamma, opts, m0, m2, wmass,
                  wenergy.value());
    if (opts.keep_states) res.states.push_back(f);
    if (opts.on_state) opts.on_state(k + 1, f);

    const std::size_t last = res.series.records.size() - 1;
    const double prevH = res.series.records[last - 1].entropy;
    const double curH = res.series.records[last].entropy;
    if (curH < prevH - 1e-6 * std::abs(prevH)) {
      std::ostringstream os;
      os << "entropy decreased at step " << k + 1 << ": " << prevH << " -> " << curH;
      res.series.notes.push_back(os.str());
    }

    if (res.series.records[last].linf > ceiling) {
      res.series.blown_up = true;
      res.series.blowup_step = k + 1;
      res.series.t_max_estimate = dt * (k + 1);
      break;
    }
  }
  res.final_state = f;
  return res;
}

SegmentResult continue_run(const Distribution& f0, const KernelParams& params, double n,
                           int segments, const QuadratureSpec& quad,
                           const SegmentOptions& opts) {
  if (segments < 1) throw std::invalid_argument("continue_run: segments must be >= 1");
  SegmentResult total;
  total.final_state = f0;
  double t_offset = 0.0;

  for (int s = 0; s < segments; ++s) {
    SegmentResult seg = run_segment(total.final_state, params, n, quad, opts);
    const std::size_t skip = (s == 0) ? 0 : 1;  // the boundary state is already recorded
    for (std::size_t i = skip; i < seg.series.times.size(); ++i) {
      total.series.times.push_back(t_offset + seg.series.times[i]);
      total.series.records.push_back(seg.series.records[i]);
      total.series.drifts.push_back(seg.series.drifts[i]);
    }
    for (const auto& note : seg.series.notes)
      total.series.notes.push_back("segment " + std::to_string(s) + ": " + note);
    if (opts.keep_states)
      for (std::size_t i = skip; i < seg.states.size(); ++i)
        total.states.push_back(std::move(seg.states[i]));

    total.final_state = std::move(seg.final_state);
    total.constants = seg.constants;
    t_offset = total.series.times.back();
    if (seg.series.blown_up) {
      total.series.blown_up = true;
      total.series.blowup_step = static_cast<int>(total.series.times.size()) - 1;
      total.series.t_max_estimate = t_offset;
      break;
    }
  }
  return total;
}

double cs_constant(double s) {
  if (!(s > 2.0)) throw std::invalid_argument("cs_constant: requires s > 2");
  // Worst collision geometry transfers all energy to one particle, so the sharp
  // bracket is (x^2+y^2)^{s/2} - x^s - y^s; on the unit circle this leaves a
  // one-variable supremum.
  return scan_maximum(
      [s](double t) {
        const double c = std::cos(t), q = std::sin(t);
        const double num = 1.0 - std::pow(c, s) - std::pow(q, s);
        const double den = c * q * (std::pow(c, s - 2.0) + std::pow(q, s - 2.0));
        return (den > 0.0) ? num / den : 0.0;
      },
      1e-9, 0.5 * std::numbers::pi - 1e-9, 4096);
}

SchemeInvariantReport verify_scheme_invariants(const TimeSeries& series,
                                               const std::vector<Distribution>& states,
                                               const SchemeConstants& constants,
                                               const KernelParams& params,
                                               const InvariantOptions& opts) {
  if (states.empty() || states.size() != series.records.size())
    throw std::invalid_argument(
        "verify_scheme_invariants: stored step states (keep_states) are required");
  SchemeInvariantReport rep;
  const Distribution& f0 = states.front();
  const VelocityGrid& g = f0.grid;
  const std::size_t total = g.size();
  const std::size_t K = states.size();

  {  // (i) positivity of every accepted state
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& f : states)
      for (double x : f.values) worst = std::min(worst, x);
    rep.checks.push_back({"positivity (i)", worst >= 0.0, worst, "min nodal value"});
  }

  {  // (ii) conservation: the weak-form ledger decides, the strong (nodewise)
     // ledger is reported alongside — it carries the interpolation bias of the
     // gain-term quadrature, which is a property of the grid, not of the step.
    double worst_weak = 0.0;
    for (const DriftRecord& d : series.drifts) {
      worst_weak = std::max(worst_weak, std::abs(d.mass_weak));
      worst_weak = std::max(worst_weak, std::abs(d.energy_weak));
    }
    std::ostringstream osw;
    osw << "max |cumulative weak-form drift| " << worst_weak << " (tol " << opts.weak_tol << ")";
    rep.checks.push_back({"conservation (ii), weak ledger", worst_weak <= opts.weak_tol,
                          opts.weak_tol - worst_weak, osw.str()});

    const double m0 = series.records.front().m0;
    const double m2 = series.records.front().m2;
    const Vec m1_0 = series.records.front().m1;
    const double pscale = std::sqrt(m0 * m2);
    double worst = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      const MomentsRecord& r = series.records[k];
      worst = std::max(worst, std::abs(r.m0 - m0) / m0);
      worst = std::max(worst, std::abs(r.m2 - m2) / m2);
      for (int a = 0; a < g.d; ++a)
        worst = std::max(worst, std::abs(r.m1[a] - m1_0[a]) / pscale);
    }
    std::ostringstream os;
    os << "max relative drift " << worst << " (threshold " << opts.strong_tol
       << ", interpolation bias, reported only)";
    rep.checks.push_back({"conservation (ii), strong ledger", worst <= opts.strong_tol,
                          opts.strong_tol - worst, os.str(), /*gating=*/false});
  }

  {  // (iv), L^inf part, via the running weighted sum
    std::vector<double> wt(total);
    const double ng = std::pow(constants.n, params.gamma);
    for (std::size_t i = 0; i < total; ++i) {
      const double speed = norm(g.node(i));
      wt[i] = std::min(ng, 1.0 + std::pow(speed, params.gamma));
    }
    std::vector<double> running(total, 0.0);
    double worst = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      const double* fv = states[k].values.data();
      for (std::size_t i = 0; i < total; ++i)
        worst = std::max(worst, fv[i] + running[i]);
      if (k + 1 < K) {
        const double dt = series.times[k + 1] - series.times[k];
        for (std::size_t i = 0; i < total; ++i) running[i] += dt * wt[i] * fv[i];
      }
    }
    std::ostringstream os;
    os << "max augmented sup " << worst << " vs K_inf " << constants.k_inf;
    rep.checks.push_back(
        {"running sup bound (iv)", worst <= constants.k_inf, constants.k_inf - worst, os.str()});
  }

  {  // (iv), hyperplane part, sampled
    double worst = 0.0;
    for (const auto& f : states) worst = std::max(worst, hyperplane_sup(f, opts.hp_spec));
    std::ostringstream os;
    os << "max sampled hyperplane integral " << worst << " vs E_inf " << constants.e_inf
       << " [" << opts.hp_spec.describe(g) << "]";
    rep.checks.push_back({"hyperplane bound (iv), sampled", worst <= constants.e_inf,
                          constants.e_inf - worst, os.str()});
  }

  {  // moment growth envelope, order s
    const double s = opts.moment_s;
    double max_linf = 0.0;
    for (const auto& r : series.records) max_linf = std::max(max_linf, r.linf);
    const double l12 = series.records.front().m0 + series.records.front().m2;
    const double rate = 2.0 * params.c_phi * cs_constant(s) * params.b.sup() *
                        (1.0 + 2.0 * max_linf) * l12;
    const double base = weighted_l1(f0, s);
    double margin = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (std::size_t k = 0; k < K; ++k) {
      const double lhs = weighted_l1(states[k], s);
      const double rhs = std::exp(rate * series.times[k]) * base;
      margin = std::min(margin, (rhs - lhs) / rhs);
      ok = ok && lhs <= rhs * (1.0 + 1e-9);
    }
    std::ostringstream os;
    os << "L^1_" << s << " envelope rate " << rate << ", min relative margin " << margin;
    // Reported only: the envelope compares moments of the stored states, so on
    // coarse grids it inherits the same gain-quadrature bias as the strong
    // conservation ledger and would flag the artifact, not the step.
    rep.checks.push_back({"moment growth envelope", ok, margin, os.str(), /*gating=*/false});
  }

  for (const auto& c : rep.checks) rep.all_ok = rep.all_ok && (c.ok || !c.gating);
  return rep;
}

Distribution neutral_perturbation(const Distribution& f0, double size) {
  const VelocityGrid& g = f0.grid;
  const std::size_t total = g.size();
  // p = (a + b|v|^2 + |v|^4) exp(-|v|^2), with (a, b) chosen so the grid mass and
  // energy of p vanish identically (2x2 linear solve on the exact node sums).
  Kahan A[4];
  std::vector<double> e2(total), w(total);
  for (std::size_t i = 0; i < total; ++i) {
    e2[i] = norm2(g.node(i));
    w[i] = std::exp(-e2[i]);
    double p = w[i];
    for (int k = 0; k < 4; ++k) {
      A[k].add(p);
      p *= e2[i];
    }
  }
  const double a0 = A[0].value(), a1 = A[1].value(), a2 = A[2].value(), a3 = A[3].value();
  const double det = a0 * a2 - a1 * a1;
  if (det == 0.0) throw std::runtime_error("neutral_perturbation: degenerate moment system");
  const double a = (-a2 * a2 + a1 * a3) / det;
  const double b = (-a0 * a3 + a1 * a2) / det;

  Distribution p = Distribution::zero(g);
  Kahan l1;
  for (std::size_t i = 0; i < total; ++i) {
    p.values[i] = (a + b * e2[i] + e2[i] * e2[i]) * w[i];
    l1.add(std::abs(p.values[i]));
  }
  const double m0 = moment(f0, 0.0);
  const double lambda = size * m0 / (l1.value() * std::pow(g.h, g.d));
  for (double& x : p.values) x *= lambda;
  return p;
}

TwinDivergence twin_run_divergence(const Distribution& f0, double perturbation_size,
                                   const KernelParams& params, double n,
                                   const QuadratureSpec& quad, const SegmentOptions& opts) {
  params.validate();
  f0.validate();
  TwinDivergence out;
  if (perturbation_size == 0.0) return out;

  const Distribution delta = neutral_perturbation(f0, perturbation_size);
  Distribution g0 = f0;
  for (std::size_t i = 0; i < g0.values.size(); ++i) {
    g0.values[i] += delta.values[i];
    if (g0.values[i] < 0.0)
      throw std::invalid_argument("twin_run_divergence: perturbation breaks positivity");
  }
  const double delta_l1 = l1_distance(f0, g0);

  const SchemeConstants c = scheme_constants(f0, params, n, opts.hp_spec);
  double dt = c.delta_n;
  if (opts.user_dt > 0.0) dt = std::min(dt, opts.user_dt);
  const int steps = std::max(1, static_cast<int>(std::floor(c.t0 / dt * (1.0 + 1e-14))));

  Distribution fa = f0, fb = g0;
  double sum_tt = 0.0, sum_tl = 0.0;
  out.max_ratio = 1.0;
  for (int k = 0; k < steps; ++k) {
    fa = euler_step(fa, dt, n, params, quad, opts.threads);
    fb = euler_step(fb, dt, n, params, quad, opts.threads);
    const double ratio = l1_distance(fa, fb) / delta_l1;
    out.max_ratio = std::max(out.max_ratio, ratio);
    const double t = dt * (k + 1);
    sum_tt += t * t;
    sum_tl += t * std::log(std::max(ratio, 1e-300));
  }
  out.fitted_rate = (sum_tt > 0.0) ? sum_tl / sum_tt : 0.0;
  return out;
}

}  // namespace bnk
