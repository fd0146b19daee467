#include "bnk/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bnk/quadrature.hpp"

namespace bnk {

AngularKernel AngularKernel::constant(double value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument("AngularKernel: constant value must be positive and finite");
  }
  AngularKernel k;
  k.constant_ = value;
  return k;
}

AngularKernel AngularKernel::table(std::vector<std::pair<double, double>> samples) {
  if (samples.size() < 2) {
    throw std::invalid_argument("AngularKernel: table needs at least two samples");
  }
  for (const auto& [x, b] : samples) {
    if (x < -1.0 || x > 1.0 || !(b > 0.0) || !std::isfinite(b)) {
      throw std::invalid_argument(
          "AngularKernel: table entries need x in [-1,1] and positive finite b");
    }
  }
  std::sort(samples.begin(), samples.end());
  AngularKernel k;
  k.table_ = std::move(samples);
  return k;
}

double AngularKernel::operator()(double x) const {
  if (table_.empty()) return constant_;
  if (x <= table_.front().first) return table_.front().second;
  if (x >= table_.back().first) return table_.back().second;
  auto hi = std::upper_bound(table_.begin(), table_.end(), x,
                             [](double v, const auto& p) { return v < p.first; });
  auto lo = hi - 1;
  const double t = (x - lo->first) / (hi->first - lo->first);
  return lo->second + t * (hi->second - lo->second);
}

double AngularKernel::sup() const {
  if (table_.empty()) return constant_;
  double m = 0.0;
  for (const auto& [x, b] : table_) m = std::max(m, b);
  return m;  // piecewise-linear: extrema sit at table knots
}

void KernelParams::validate() const {
  if (!(c_phi > 0.0)) throw std::invalid_argument("KernelParams: c_phi must be positive");
  if (gamma < 0.0 || gamma > 1.0) {
    throw std::invalid_argument("KernelParams: gamma must lie in [0, 1]");
  }
  if (d < 3 || d > static_cast<int>(kMaxDim)) {
    throw std::invalid_argument("KernelParams: dimension must be 3 or 4");
  }
}

AngularConstants angular_constants(const KernelParams& params) {
  params.validate();
  AngularConstants out;
  out.b_inf = params.b.sup();
  if (params.b.is_constant()) {
    out.l_b = params.b.constant_value() * sphere_area(params.d);
    return out;
  }
  if (params.d == 3) {
    // |S^1| int_0^pi b(cos t) sin t dt = 2 pi int_{-1}^{1} b(x) dx, and b is
    // piecewise linear, so the integral is an exact sum of trapezoids (with
    // constant extension to the interval endpoints).
    const auto& tb = params.b.samples();
    double integral = (tb.front().first + 1.0) * tb.front().second;
    for (std::size_t i = 0; i + 1 < tb.size(); ++i) {
      integral += 0.5 * (tb[i].second + tb[i + 1].second) * (tb[i + 1].first - tb[i].first);
    }
    integral += (1.0 - tb.back().first) * tb.back().second;
    out.l_b = 2.0 * std::numbers::pi * integral;
    return out;
  }
  const int d = params.d;
  const AngularKernel& b = params.b;
  out.l_b = sphere_area(d - 1) *
            integrate_1d([&](double t) { return b(std::cos(t)) * std::pow(std::sin(t), d - 2); },
                         0.0, std::numbers::pi, 1e-12);
  return out;
}

namespace {

void require_unit(const Vec& sigma) {
  if (std::abs(norm2(sigma) - 1.0) > 2e-12) {
    throw std::invalid_argument("sigma must be a unit vector");
  }
}

}  // namespace

std::pair<Vec, Vec> post_collision(const Vec& v, const Vec& v_star, const Vec& sigma) {
  require_unit(sigma);
  Vec m = 0.5 * (v + v_star);
  const double half_r = 0.5 * norm(v - v_star);
  Vec a = half_r * sigma;
  return {m + a, m - a};
}

SigmaSplit sigma_split(const Vec& v, const Vec& v_star, const Vec& sigma) {
  require_unit(sigma);
  const Vec rel = v - v_star;
  const double r = norm(rel);
  if (r == 0.0) {
    throw std::invalid_argument("sigma_split: degenerate pair v = v*");
  }
  SigmaSplit s;
  s.cos_theta = dot(rel, sigma) / r;
  s.beta = 0.5 + 0.5 * s.cos_theta;
  const double e_v = norm2(v);
  const double e_vs = norm2(v_star);
  s.Y = s.beta * e_v + (1.0 - s.beta) * e_vs;
  s.Z = 0.5 * r * dot(v + v_star, sigma) - 0.5 * s.cos_theta * (e_v - e_vs);
  return s;
}

double kernel_value(const Vec& v, const Vec& v_star, const Vec& sigma,
                    const KernelParams& params, std::optional<double> truncation) {
  require_unit(sigma);
  double r = norm(v - v_star);
  double cos_theta;
  if (r > 0.0) {
    cos_theta = dot(v - v_star, sigma) / r;
  } else {
    if (params.gamma > 0.0) return 0.0;
    cos_theta = sigma[0];  // degenerate-pair convention
  }
  if (truncation) r = std::min(*truncation, r);
  const double speed = params.gamma == 0.0 ? 1.0
                       : params.gamma == 1.0 ? r
                                             : std::pow(r, params.gamma);
  return params.c_phi * speed * params.b(cos_theta);
}

CollisionTriple make_triple(const Vec& v, const Vec& v_star, const Vec& sigma) {
  CollisionTriple t;
  t.v = v;
  t.v_star = v_star;
  t.sigma = sigma;
  auto [vp, vsp] = post_collision(v, v_star, sigma);
  t.v_prime = vp;
  t.v_star_prime = vsp;
  const SigmaSplit s = sigma_split(v, v_star, sigma);
  t.cos_theta = s.cos_theta;
  t.beta = s.beta;
  t.Y = s.Y;
  t.Z = s.Z;
  return t;
}

}  // namespace bnk
