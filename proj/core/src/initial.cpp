#include "bnk/initial.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "bnk/quadrature.hpp"
#include "bnk/special.hpp"

namespace bnk {

void InitialSpec::validate(int d) const {
  if (family != "gaussian" && family != "spike" && family != "plateau" && family != "bose" &&
      family != "power_tail")
    throw std::invalid_argument("initial: unknown family '" + family + "'");
  if (family == "bose") {
    if (!(beta > 0.0)) throw std::invalid_argument("initial: bose requires beta > 0");
    if (mu > 0.0) throw std::invalid_argument("initial: bose requires mu <= 0");
  } else {
    if (!(amplitude > 0.0)) throw std::invalid_argument("initial: amplitude must be > 0");
  }
  if ((family == "gaussian" || family == "spike") && !(sigma > 0.0))
    throw std::invalid_argument("initial: sigma must be > 0");
  if ((family == "plateau" || family == "power_tail") && !(radius > 0.0))
    throw std::invalid_argument("initial: radius must be > 0");
  if (family == "power_tail" && !(s > 0.0))
    throw std::invalid_argument("initial: power_tail exponent s must be > 0");
  if (center.d != d) throw std::invalid_argument("initial: center dimension mismatch");
}

double bose_einstein_regular(const Vec& v, const Vec& center, double beta, double mu) {
  double r2 = 0.0;
  for (int k = 0; k < v.d; ++k) {
    const double dk = v[k] - center[k];
    r2 += dk * dk;
  }
  const double e = 0.5 * beta * (r2 - mu);
  if (e <= 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / std::expm1(e);
}

Distribution build_initial(const VelocityGrid& g, const InitialSpec& spec) {
  spec.validate(g.d);
  Distribution f = Distribution::zero(g);
  const std::size_t total = g.size();

  for (std::size_t i = 0; i < total; ++i) {
    const Vec v = g.node(i);
    double r2 = 0.0;
    for (int k = 0; k < g.d; ++k) {
      const double dk = v[k] - spec.center[k];
      r2 += dk * dk;
    }
    double val = 0.0;
    if (spec.family == "gaussian" || spec.family == "spike") {
      val = spec.amplitude * std::exp(-0.5 * r2 / (spec.sigma * spec.sigma));
    } else if (spec.family == "plateau") {
      val = (r2 <= spec.radius * spec.radius) ? spec.amplitude : 0.0;
    } else if (spec.family == "bose") {
      val = bose_einstein_regular(v, spec.center, spec.beta, spec.mu);
      if (!std::isfinite(val))
        throw std::runtime_error(
            "initial: bose family is singular at a grid node (mu = 0 with center on the "
            "grid); perturb mu or the center");
    } else {  // power_tail, centered at the origin by definition
      const double n2 = norm2(v);
      if (n2 <= spec.radius * spec.radius)
        val = spec.amplitude / (1.0 + std::pow(n2, 0.5 * spec.s));
    }
    f.values[i] = val;
  }
  return f;
}

TailReport tail_report(const Distribution& f, const InitialSpec& spec) {
  TailReport rep;
  rep.grid_mass = moment(f, 0.0);
  const int d = f.grid.d;

  if (spec.family == "gaussian" || spec.family == "spike") {
    rep.analytic_mass =
        spec.amplitude * std::pow(2.0 * std::numbers::pi * spec.sigma * spec.sigma, 0.5 * d);
    rep.has_analytic = true;
  } else if (spec.family == "plateau") {
    rep.analytic_mass = spec.amplitude * sphere_area(d) * std::pow(spec.radius, d) / d;
    rep.has_analytic = true;
  } else if (spec.family == "bose" && d == 3) {
    rep.analytic_mass = be_mass_energy(spec.beta, spec.mu).m0;
    rep.has_analytic = true;
  } else if (spec.family == "power_tail") {
    const double s = spec.s;
    rep.analytic_mass = spec.amplitude * sphere_area(d) *
                        integrate_1d(
                            [d, s](double r) {
                              return std::pow(r, d - 1) / (1.0 + std::pow(r, s));
                            },
                            0.0, spec.radius, 1e-12);
    rep.has_analytic = true;
  }
  if (rep.has_analytic && rep.analytic_mass > 0.0)
    rep.lost_fraction = (rep.analytic_mass - rep.grid_mass) / rep.analytic_mass;
  return rep;
}

}  // namespace bnk
