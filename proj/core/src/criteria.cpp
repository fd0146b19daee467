#include "bnk/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "bnk/special.hpp"

namespace bnk {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSingularSentinel = 1e300;

// M2 / M0^{5/3} of the regular equilibrium state depends on the fugacity
// z = e^{beta mu / 2} alone; it decreases from +inf (z -> 0, classical gas)
// to its minimum at z = 1 (condensation edge).
double moment_ratio(double z) {
  return 3.0 / (2.0 * kPi) * polylog_5_2(z) / std::pow(polylog_3_2(z), 5.0 / 3.0);
}

double invert_li32(double target) {
  // Li_{3/2} is increasing on [0, 1] with range [0, zeta(3/2)].
  double lo = 0.0, hi = 1.0 - 1e-15;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (polylog_3_2(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

OccupationValue equilibrium_occupation(double beta, double mu, const Vec& u, const Vec& v,
                                       int d) {
  if (!(beta > 0.0))
    throw std::invalid_argument("equilibrium_occupation: beta must be > 0");
  if (mu > 0.0) throw std::invalid_argument("equilibrium_occupation: mu must be <= 0");
  double r2 = 0.0;
  for (int k = 0; k < d; ++k) r2 += (v[k] - u[k]) * (v[k] - u[k]);
  const double x = 0.5 * beta * (r2 - mu);
  OccupationValue out;
  if (x <= 0.0) {
    out.singular = true;
    out.value = kSingularSentinel;
    return out;
  }
  out.value = 1.0 / std::expm1(x);
  if (!std::isfinite(out.value)) {
    out.singular = true;
    out.value = kSingularSentinel;
  }
  return out;
}

SubcriticalVerdict subcritical_check(double m0, double m2, SubcriticalMode mode) {
  if (!(m0 > 0.0) || !(m2 > 0.0))
    throw std::invalid_argument("subcritical_check: M0 and M2 must be > 0");
  const double base = (mode == SubcriticalMode::kQuoted) ? 4.0 * kPi / 3.0 : 2.0 * kPi / 3.0;
  SubcriticalVerdict out;
  out.coefficient =
      std::pow(base, 0.6) * riemann_zeta(1.5) / std::pow(riemann_zeta(2.5), 0.6);
  out.threshold = out.coefficient * std::pow(m2, 0.6);
  out.subcritical = m0 <= out.threshold;
  return out;
}

double critical_temperature(double m0, const PhysicalUnits& units) {
  if (!(m0 > 0.0)) throw std::invalid_argument("critical_temperature: M0 must be > 0");
  const double z32 = riemann_zeta(1.5);
  return units.particle_mass * riemann_zeta(2.5) / (2.0 * kPi * units.boltzmann * z32) *
         std::pow(m0 / z32, 2.0 / 3.0);
}

EquilibriumFit equilibrium_fit(double m0, const Vec& u, double m2) {
  if (!(m0 > 0.0) || !(m2 > 0.0))
    throw std::invalid_argument("equilibrium_fit: M0 and M2 must be > 0");
  EquilibriumFit fit;
  fit.u = u;

  const double z32 = riemann_zeta(1.5);
  const double z52 = riemann_zeta(2.5);
  const double beta_c = std::pow(3.0 * std::pow(2.0 * kPi, 1.5) * z52 / m2, 0.4);
  const double m0_crit = std::pow(2.0 * kPi / beta_c, 1.5) * z32;

  if (m0 >= m0_crit * (1.0 - 1e-13)) {
    fit.beta = beta_c;
    fit.mu = 0.0;
    fit.condensate = std::max(0.0, m0 - m0_crit);
    const BoseMoments bm = be_mass_energy(fit.beta, 0.0);
    fit.residual_m0 = (bm.m0 + fit.condensate - m0) / m0;
    fit.residual_m2 = (bm.m2 - m2) / m2;
    fit.converged = true;
    return fit;
  }

  // Subcritical branch: damped Newton on (log beta, y) with mu = -e^y.
  auto residual = [&](double log_beta, double y, double& r0, double& r2) {
    const BoseMoments bm = be_mass_energy(std::exp(log_beta), -std::exp(y));
    r0 = bm.m0 / m0 - 1.0;
    r2 = bm.m2 / m2 - 1.0;
  };

  double lb = std::log(3.0 * m0 / m2);  // classical-gas guess M2/M0 = 3/beta
  double z0 = invert_li32(std::min(m0 * std::pow(std::exp(lb) / (2.0 * kPi), 1.5),
                                   z32 * (1.0 - 1e-12)));
  z0 = std::clamp(z0, 1e-14, 1.0 - 1e-12);
  double y = std::log(std::max(-2.0 * std::log(z0) / std::exp(lb), 1e-12));

  constexpr double kTol = 1e-10;
  double r0 = 0.0, r2 = 0.0;
  residual(lb, y, r0, r2);
  bool converged = false;
  for (int it = 0; it < 80; ++it) {
    double rn = std::max(std::abs(r0), std::abs(r2));
    if (rn <= kTol) {
      converged = true;
      break;
    }
    const double hb = 1e-6, hy = 1e-6;
    double a0, a2, b0, b2;
    residual(lb + hb, y, a0, a2);
    residual(lb, y + hy, b0, b2);
    const double j00 = (a0 - r0) / hb, j01 = (b0 - r0) / hy;
    const double j10 = (a2 - r2) / hb, j11 = (b2 - r2) / hy;
    const double det = j00 * j11 - j01 * j10;
    if (det == 0.0 || !std::isfinite(det)) break;
    const double dlb = -(j11 * r0 - j01 * r2) / det;
    const double dy = -(-j10 * r0 + j00 * r2) / det;

    double t = 1.0;
    bool accepted = false;
    for (; t >= 1.0 / 1024.0; t *= 0.5) {
      double t0, t2;
      residual(lb + t * dlb, y + t * dy, t0, t2);
      if (std::max(std::abs(t0), std::abs(t2)) < rn) {
        lb += t * dlb;
        y += t * dy;
        r0 = t0;
        r2 = t2;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }

  if (!converged) {
    // Fallback: the moment ratio pins the fugacity by monotone bisection, then
    // beta matches M0 exactly.
    const double target = m2 / std::pow(m0, 5.0 / 3.0);
    double wlo = -700.0, whi = 0.0;  // log fugacity
    for (int it = 0; it < 200; ++it) {
      const double wm = 0.5 * (wlo + whi);
      (moment_ratio(std::exp(wm)) > target ? wlo : whi) = wm;
    }
    const double z = std::exp(0.5 * (wlo + whi));
    const double beta = 2.0 * kPi * std::pow(polylog_3_2(z) / m0, 2.0 / 3.0);
    lb = std::log(beta);
    y = std::log(std::max(-2.0 * std::log(z) / beta, 1e-300));
    residual(lb, y, r0, r2);
    converged = std::max(std::abs(r0), std::abs(r2)) <= 1e-8;
  }

  fit.beta = std::exp(lb);
  fit.mu = -std::exp(y);
  fit.condensate = 0.0;
  fit.residual_m0 = r0;
  fit.residual_m2 = r2;
  fit.converged = converged;
  if (!converged) {
    std::ostringstream os;
    os << "equilibrium_fit: no convergence, residuals (" << r0 << ", " << r2 << ")";
    throw FitFailure(os.str());
  }
  return fit;
}

LossBounds loss_lower_bounds(const Distribution& f, const Vec& v, const KernelParams& params,
                             const QuadratureSpec& quad, std::optional<double> r0) {
  params.validate();
  f.validate();
  LossBounds out;
  out.measured = q_minus(f, v, params, quad);
  const double m0 = moment(f, 0.0);
  if (m0 == 0.0) return out;  // every floor degenerates to zero

  const AngularConstants ang = angular_constants(params);
  const double cpl = params.c_phi * ang.l_b;
  const int d = params.d;
  const double gamma = params.gamma;

  out.moment_bound = cpl * (1.0 + std::pow(norm(v), gamma)) * m0 -
                     params.c_phi * c_gamma_constant(gamma) * ang.l_b * weighted_l1(f, 2.0);

  const double g = gamma / (d - 1.0);
  const double linf = sup_norms(f, 0.0).linf;
  const double amp = (g == 0.0) ? 1.0 : std::pow(linf, -g);
  out.sup_bound = cpl * std::pow(m0, 1.0 + g) * amp /
                  (std::pow(2.0, 1.0 + g) * std::pow(sphere_area(d), g));

  if (r0) {
    if (!(*r0 > 0.0)) throw std::invalid_argument("loss_lower_bounds: r0 must be > 0");
    const double conc = gamma_sup(f, *r0, gamma);
    out.conc_hypothesis_met = std::pow(*r0, d - 1.0 - gamma) * conc <= 0.5 * m0;
    if (out.conc_hypothesis_met) out.conc_bound = 0.5 * cpl * m0 * std::pow(*r0, gamma);
  }
  return out;
}

double regularity_exponent(double s, int d, double gamma) {
  if (!(s > d - 1.0))
    throw std::invalid_argument("regularity_exponent: requires s > d - 1");
  const double gained = (d / (1.0 + gamma)) * (s - d + 1.0 + gamma + 2.0 * (1.0 + gamma) / d);
  return std::min(s, gained);
}

double c_sd_constant(double s, int d) {
  if (!(s > d - 1.0)) throw std::invalid_argument("c_sd_constant: requires s > d - 1");
  // int_{R^{d-1}} (1+|w|^s)^{-1} dw = |S^{d-2}| int_0^inf r^{d-2}/(1+r^s) dr and the
  // radial part is the classical beta integral (pi/s)/sin((d-1)pi/s).
  return sphere_area(d - 1) * (kPi / s) / std::sin((d - 1) * kPi / s);
}

double c_dgamma_constant(int d, double gamma) {
  return sphere_area(d) / std::min(gamma + d - 1.0, 1.0 + gamma);
}

GlobalCriterionReport global_criterion(const Distribution& f0, const KernelParams& params,
                                       double s, int gamma_stride) {
  params.validate();
  f0.validate();
  if (f0.grid.d != params.d)
    throw std::invalid_argument("global_criterion: dimension mismatch");
  const int d = params.d;
  const double gamma = params.gamma;
  if (!(s > d - 1.0))
    throw std::invalid_argument("global_criterion: weight order s must exceed d - 1");

  GlobalCriterionReport rep;
  rep.s = s;
  rep.m0 = moment(f0, 0.0);
  const SupNorms sn = sup_norms(f0, s);
  rep.linf = sn.linf;
  rep.linf_weighted = sn.linf_weighted;
  if (!(rep.m0 > 0.0))
    throw std::invalid_argument("global_criterion: requires data with nonzero mass");

  const double sd = sphere_area(d);
  rep.r0 = std::pow(3.0 * rep.m0 / (48.0 * sd * rep.linf), 1.0 / d);
  rep.gamma0 = rep.m0 / (6.0 * std::pow(rep.r0, d - 1.0 - gamma));

  const AngularConstants ang = angular_constants(params);
  rep.c_sd = c_sd_constant(s, d);
  rep.c_dgamma = c_dgamma_constant(d, gamma);
  rep.c_q = std::max(rep.c_sd, rep.c_dgamma) * params.c_phi * std::max(ang.b_inf, ang.l_b);

  const double L = rep.linf;
  rep.q_tilde0 = 2.0 * rep.c_q / (params.c_phi * ang.l_b * rep.m0) * (1.0 + 6.0 * L) *
                 (rep.linf_weighted +
                  std::pow(3.0 * L / rep.m0, gamma / (d - 1.0)) * (1.0 + 6.0 * L) *
                      (3.0 * L + rep.m0));
  rep.q0_bound = 1.0 / (24.0 * sd * rep.r0);
  rep.gamma_f0 = gamma_sup(f0, rep.r0, gamma, gamma_stride);
  rep.condition_i = rep.q_tilde0 <= rep.q0_bound;
  rep.condition_ii = rep.gamma_f0 <= rep.gamma0;
  rep.regime_exponent = d * (gamma - 1.0) + 1.0;
  return rep;
}

void monitor_bootstrap(const TimeSeries& series, GlobalCriterionReport& report,
                       const Distribution& f0) {
  const double linf0 = sup_norms(f0, 0.0).linf;
  report.t_m_reached = false;
  report.t_m_estimate = 0.0;
  report.max_linf_ratio = 0.0;
  report.max_gamma_ratio = 0.0;
  report.recovery_linf_held = true;
  report.recovery_gamma_held = true;
  constexpr double kInf = std::numeric_limits<double>::infinity();

  for (std::size_t k = 0; k < series.records.size(); ++k) {
    const MomentsRecord& r = series.records[k];
    const double lr = (linf0 > 0.0) ? r.linf / linf0 : (r.linf > 0.0 ? kInf : 0.0);
    const double gr = (report.gamma0 > 0.0) ? r.gamma_conc / report.gamma0
                                            : (r.gamma_conc > 0.0 ? kInf : 0.0);
    report.max_linf_ratio = std::max(report.max_linf_ratio, lr);
    report.max_gamma_ratio = std::max(report.max_gamma_ratio, gr);
    if (lr > 2.0) report.recovery_linf_held = false;
    if (gr > 2.5) report.recovery_gamma_held = false;
    if (!report.t_m_reached && (lr > 3.0 || gr > 3.0)) {
      report.t_m_reached = true;
      report.t_m_estimate = series.times[k];
    }
  }
}

double cardano_cubic_root(double r0) {
  if (!(r0 > 0.0)) throw std::invalid_argument("cardano_cubic_root: r0 must be > 0");
  const double p = std::pow(r0, 4.0 / 3.0) / std::pow(6.0, 2.0 / 3.0);
  const double q = r0 * r0;
  const double disc = std::sqrt(0.25 * q * q + p * p * p / 27.0);
  return std::cbrt(0.5 * q + disc) + std::cbrt(0.5 * q - disc);
}

double cardano_subcritical_bound(double m0, double linf_f0, int d, double gamma) {
  if (d != 3 || gamma != 1.0)
    throw std::domain_error(
        "cardano_subcritical_bound: closed form exists only for d = 3, gamma = 1");
  if (!(m0 > 0.0) || !(linf_f0 > 0.0))
    throw std::invalid_argument("cardano_subcritical_bound: m0 and linf must be > 0");
  const double root_disc = std::sqrt(244.0 / 243.0);
  const double bracket = std::cbrt(1.0 + root_disc) + std::cbrt(1.0 - root_disc);
  return std::pow(bracket, 3.0) / (32.0 * std::pow(kPi, 2.0 / 3.0)) *
         std::pow(m0, 5.0 / 3.0) / std::pow(linf_f0, 2.0 / 3.0);
}

}  // namespace bnk
