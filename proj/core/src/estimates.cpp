#include "bnk/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "bnk/quadrature.hpp"
#include "bnk/rng.hpp"
#include "bnk/summation.hpp"

namespace bnk {

namespace {
constexpr double kPi = std::numbers::pi;
}

PowerFit blowup_rate_fit(const TimeSeries& series, int max_points) {
  if (max_points < 2) {
    throw std::invalid_argument("blowup_rate_fit: need at least two points");
  }
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < series.times.size() && (int)xs.size() < max_points; ++i) {
    const double t = series.times[i];
    const double m = series.records[i].m2_plus_gamma;
    if (t > 0.0 && m > 0.0) {
      xs.push_back(std::log(t));
      ys.push_back(std::log(m));
    }
  }
  if (xs.size() < 2) {
    throw std::invalid_argument(
        "blowup_rate_fit: fewer than two positive-time records with positive moment");
  }
  const std::size_t n = xs.size();
  double xbar = 0.0, ybar = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    xbar += xs[i];
    ybar += ys[i];
  }
  xbar /= (double)n;
  ybar /= (double)n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - xbar) * (xs[i] - xbar);
    sxy += (xs[i] - xbar) * (ys[i] - ybar);
  }
  if (sxx == 0.0) {
    throw std::invalid_argument("blowup_rate_fit: degenerate time ladder");
  }
  PowerFit fit;
  fit.exponent = sxy / sxx;
  fit.c = std::exp(ybar - fit.exponent * xbar);
  fit.points_used = (int)n;
  return fit;
}

IntegrationLemmaReport check_integration_lemma(const Distribution& f, double alpha,
                                               double s1, double s2, int samples,
                                               std::uint64_t seed) {
  f.validate();
  const VelocityGrid& g = f.grid;
  const int d = g.d;
  if (!(alpha >= 0.0 && alpha < (double)d)) {
    throw std::invalid_argument("check_integration_lemma: need 0 <= alpha < d");
  }
  if (!(s1 >= 0.0 && s2 >= s1 && s2 - s1 < (double)d)) {
    throw std::invalid_argument(
        "check_integration_lemma: need 0 <= s1 <= s2 with s2 - s1 < d");
  }
  if (samples <= 0) {
    throw std::invalid_argument("check_integration_lemma: samples must be positive");
  }
  const double norm_sum =
      weighted_l1(f, s1) + sup_norms(f, s2).linf_weighted;
  if (norm_sum == 0.0) {
    throw std::invalid_argument("check_integration_lemma: f vanishes identically");
  }

  IntegrationLemmaReport rep;
  rep.b_exponent = std::min(alpha, s1 + alpha * (s2 - s1) / (double)d);
  rep.samples = samples;
  rep.all_finite = true;

  Sampler rng(seed);
  const std::size_t total = g.size();
  const double lo = std::log(0.25 * g.h);
  const double hi = std::log(20.0);
  for (int sidx = 0; sidx < samples; ++sidx) {
    // Sample v away from the node set so the kernel stays summable: reject
    // points closer than h/4 to the nearest node (the singular cell would
    // otherwise dominate the midpoint sum by an O((h/dist)^alpha) artifact).
    Vec v = zero_vec(d);
    bool placed = false;
    for (int attempt = 0; attempt < 64 && !placed; ++attempt) {
      const double mag = std::exp(rng.uniform(lo, hi));
      v = mag * rng.unit_vector(d);
      double min_axis_gap = std::numeric_limits<double>::infinity();
      for (int ax = 0; ax < d; ++ax) {
        const double s = (v[ax] + g.V) / g.h - 0.5;  // node index coordinate
        const double gap = std::abs(s - std::round(s)) * g.h;
        min_axis_gap = std::min(min_axis_gap, gap);
      }
      placed = min_axis_gap >= 0.25 * g.h;
    }
    if (!placed) continue;  // astronomically unlikely; skip rather than bias

    Kahan acc;
    for (std::size_t j = 0; j < total; ++j) {
      const double fj = f.values[j];
      if (fj == 0.0) continue;
      const double r = norm(v - g.node(j));
      if (r == 0.0) continue;  // excluded by construction; belt and braces
      acc.add(fj * std::pow(r, -alpha));
    }
    const double lhs = acc.value() * std::pow(g.h, d);
    const double ratio =
        lhs * std::pow(1.0 + norm(v), rep.b_exponent) / norm_sum;
    if (!std::isfinite(ratio)) rep.all_finite = false;
    rep.c_hat = std::max(rep.c_hat, ratio);
  }
  return rep;
}

namespace {

// Average of |v - v1|^{-alpha} over the unit-normalized sphere S_r(a), reduced to
// the polar angle between v - a and v1 - a. Exact by rotational symmetry.
double sphere_potential(double rho, double r, double alpha, int d) {
  if (alpha == 0.0) return 1.0;
  if (rho == 0.0) return std::pow(r, -alpha);
  const double ratio = sphere_area(d - 1) / sphere_area(d);
  const auto integrand = [&](double theta) {
    const double c = std::cos(theta);
    const double dist2 = rho * rho + r * r - 2.0 * rho * r * c;
    return std::pow(dist2, -0.5 * alpha) *
           std::pow(std::sin(theta), (double)(d - 2));
  };
  return ratio * integrate_1d(integrand, 0.0, kPi, 1e-11);
}

}  // namespace

SphereBoundReport check_sphere_bound(const Vec& a, double r, double alpha, int d,
                                     int samples, std::uint64_t seed) {
  if (d < 2 || d > kMaxDim) {
    throw std::invalid_argument("check_sphere_bound: dimension out of range");
  }
  if (!(r > 0.0)) throw std::invalid_argument("check_sphere_bound: r must be positive");
  if (!(alpha >= 0.0 && alpha <= (double)(d - 1))) {
    throw std::invalid_argument("check_sphere_bound: need 0 <= alpha <= d - 1");
  }
  if (samples <= 0) {
    throw std::invalid_argument("check_sphere_bound: samples must be positive");
  }

  SphereBoundReport rep;
  rep.samples = samples;
  rep.all_finite = true;
  Sampler rng(seed);
  const double lo = std::log(0.02);
  const double hi = std::log(10.0);
  for (int i = 0; i < samples; ++i) {
    // First sample sits at the center (I = r^{-alpha} exactly); the rest get a
    // log-uniform radius so both distance regimes are exercised.
    const double rho = i == 0 ? 0.0 : r * std::exp(rng.uniform(lo, hi));
    const double value = sphere_potential(rho, r, alpha, d);
    if (!std::isfinite(value)) {
      rep.all_finite = false;
      continue;
    }
    const double scaled = value * std::pow(r, alpha);
    rep.c_hat = std::max(rep.c_hat, scaled);
    if (std::abs(rho - r) <= 0.5 * r) {
      rep.c_hat_near = std::max(rep.c_hat_near, scaled);
    } else {
      rep.c_hat_far = std::max(rep.c_hat_far, scaled);
    }
  }
  return rep;
}

DeltaConcentrationReport check_delta_concentration(const Vec& normal, double offset,
                                                   const Vec& a, double r,
                                                   const std::vector<double>& n_ladder,
                                                   int d) {
  if (d < 3 || d > kMaxDim) {
    throw std::invalid_argument("check_delta_concentration: dimension out of range");
  }
  if (std::abs(norm(normal) - 1.0) > 1e-12) {
    throw std::invalid_argument("check_delta_concentration: normal must be unit");
  }
  if (!(r > 0.0)) {
    throw std::invalid_argument("check_delta_concentration: r must be positive");
  }
  if (n_ladder.empty()) {
    throw std::invalid_argument("check_delta_concentration: empty n ladder");
  }
  const double delta = std::abs(dot(a, normal) - offset);

  DeltaConcentrationReport rep;
  rep.ladder_values.reserve(n_ladder.size());
  for (double n : n_ladder) {
    if (!(n > 0.0)) {
      throw std::invalid_argument("check_delta_concentration: n must be positive");
    }
    const double amp = std::sqrt(n / (2.0 * kPi));
    const auto integrand = [&](double theta) {
      const double u = delta + r * std::cos(theta);
      return std::exp(-0.5 * n * u * u) *
             std::pow(std::sin(theta), (double)(d - 2));
    };
    const double value =
        sphere_area(d - 1) * r * amp * integrate_1d(integrand, 0.0, kPi, 1e-12);
    rep.ladder_values.push_back(value);
    rep.sup_value = std::max(rep.sup_value, value);
  }
  rep.c_d_estimate = rep.sup_value;

  if (d == 3) {
    // Genuine surface quadrature of phi_n over the sphere, as a cross-check of
    // the polar reduction. Order 64 resolves the Gaussian band for n up to ~1e3.
    const SphereRule rule = sphere_quadrature(3, 64, 128);
    double gap = 0.0;
    for (std::size_t j = 0; j < n_ladder.size(); ++j) {
      const double n = n_ladder[j];
      const double amp = std::sqrt(n / (2.0 * kPi));
      Kahan acc;
      for (std::size_t k = 0; k < rule.size(); ++k) {
        const Vec x = a + r * rule.nodes[k];
        const double dist = std::abs(dot(x, normal) - offset);
        acc.add(rule.weights[k] * amp * std::exp(-0.5 * n * dist * dist));
      }
      // r^{-(d-2)} * r^{d-1} * (rule sum over the unit sphere) with d = 3.
      const double value2d = r * acc.value();
      const double scale = std::max(std::abs(rep.ladder_values[j]), 1e-300);
      gap = std::max(gap, std::abs(value2d - rep.ladder_values[j]) / scale);
    }
    rep.reduction_gap = gap;
    rep.bounded_ok = rep.sup_value <= 2.0 * kPi * 1.05;
  } else {
    rep.bounded_ok = std::isfinite(rep.sup_value);
  }
  return rep;
}

namespace {

double rk4_step(double y, double dt, double lam, double force) {
  const auto fdot = [&](double yy) { return -lam * yy + force; };
  const double k1 = fdot(y);
  const double k2 = fdot(y + 0.5 * dt * k1);
  const double k3 = fdot(y + 0.5 * dt * k2);
  const double k4 = fdot(y + dt * k3);
  return y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Step-doubling adaptive RK4 for the (linear, stiff-when-lambda-large) extremal
// equation. Accuracy target is far below the 1e-8 oracle-gap budget.
double integrate_to(double y, double t_from, double t_to, double lam, double force) {
  double t = t_from;
  double dt = std::min((t_to - t_from) / 8.0, 2.0 / std::max(lam, 1e-12));
  const double tol = 1e-13;
  while (t < t_to) {
    dt = std::min(dt, t_to - t);
    const double full = rk4_step(y, dt, lam, force);
    const double half = rk4_step(rk4_step(y, 0.5 * dt, lam, force), 0.5 * dt, lam, force);
    const double err = std::abs(half - full) / 15.0;
    const double scale = std::max({std::abs(half), std::abs(force / std::max(lam, 1e-300)), 1e-30});
    if (err <= tol * scale) {
      t += dt;
      y = half + (half - full) / 15.0;
      dt *= std::min(2.0, 0.9 * std::pow(tol * scale / std::max(err, 1e-300), 0.2));
      dt = std::min(dt, 2.0 / std::max(lam, 1e-12));
    } else {
      dt *= 0.5;
      if (dt <= 1e-300) throw std::runtime_error("integrate_to: step underflow");
    }
  }
  return y;
}

}  // namespace

DecayOdeReport check_decay_ode(double c1, double c2, double c3, double alpha,
                               double beta, const std::vector<double>& v_samples,
                               double t_horizon) {
  if (!(c1 > 0.0 && c2 > 0.0 && c3 > 0.0)) {
    throw std::invalid_argument("check_decay_ode: constants must be positive");
  }
  if (!(alpha > 0.0) || !(beta >= 0.0)) {
    throw std::invalid_argument("check_decay_ode: need alpha > 0 and beta >= 0");
  }
  if (!(t_horizon > 0.0)) {
    throw std::invalid_argument("check_decay_ode: t_horizon must be positive");
  }
  if (v_samples.empty()) {
    throw std::invalid_argument("check_decay_ode: no velocity samples");
  }

  DecayOdeReport rep;
  rep.v_threshold = std::pow(2.0 * c2 / c1, 1.0 / alpha) - 1.0;
  rep.max_excess = -std::numeric_limits<double>::infinity();
  const double budget = 2.0 * c3 / c1;

  for (double speed : v_samples) {
    if (!(speed >= 0.0)) {
      throw std::invalid_argument("check_decay_ode: speeds must be >= 0");
    }
    if (speed < rep.v_threshold) continue;  // outside the bound's domain
    const double wgt = std::pow(1.0 + speed, alpha + beta);
    const double lam = c1 * std::pow(1.0 + speed, alpha) - c2;  // >= c2 > 0 here
    const double force = c3 * std::pow(1.0 + speed, -beta);
    const double steady = force / lam;
    for (double psi0 : {0.0, c3 / c1, 1.0}) {
      ++rep.samples;
      double y = psi0;
      double t = 0.0;
      for (int j = 1; j <= 16; ++j) {
        const double t_next = t_horizon * (double)j / 16.0;
        y = integrate_to(y, t, t_next, lam, force);
        t = t_next;
        const double closed = (psi0 - steady) * std::exp(-lam * t) + steady;
        const double gap =
            std::abs(y - closed) / std::max(std::abs(closed), 1e-300);
        rep.oracle_gap = std::max(rep.oracle_gap, gap);
        const double lhs = wgt * std::max(y, closed);
        const double rhs = wgt * psi0 + budget;
        rep.max_excess = std::max(rep.max_excess, lhs - rhs);
      }
    }
  }
  if (rep.samples == 0) {
    rep.max_excess = 0.0;
    rep.all_ok = false;
    return rep;
  }
  rep.all_ok = rep.max_excess <= 1e-10 * std::max(1.0, budget) &&
               rep.oracle_gap <= 1e-8;
  return rep;
}

}  // namespace bnk
