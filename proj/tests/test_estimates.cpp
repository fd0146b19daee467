#include <cmath>
#include <numbers>
#include <vector>

#include "bnk/estimates.hpp"
#include "bnk/grid.hpp"
#include "bnk/initial.hpp"
#include "bnk/vec.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bnk;

namespace {

Distribution gaussian_on(const VelocityGrid& g, double amp, double sigma) {
  InitialSpec spec;
  spec.amplitude = amp;
  spec.sigma = sigma;
  spec.center = zero_vec(g.d);
  return build_initial(g, spec);
}

}  // namespace

TEST_CASE("power fit recovers a synthetic rate") {
  // Records with M_{2+gamma}(t) = 2.5 t^{-0.75}.
  TimeSeries series;
  series.times = {0.0, 0.01, 0.02, 0.03, 0.04, 0.05};
  series.records.resize(series.times.size());
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    const double t = series.times[i];
    series.records[i].m2_plus_gamma = (t > 0.0) ? 2.5 * std::pow(t, -0.75) : 0.0;
  }
  const PowerFit fit = blowup_rate_fit(series);
  CHECK(fit.points_used == 5);  // the t = 0 record cannot enter a log fit
  CHECK(fit.exponent == doctest::Approx(-0.75).epsilon(1e-10));
  CHECK(fit.c == doctest::Approx(2.5).epsilon(1e-10));
}

TEST_CASE("power fit respects the point budget") {
  TimeSeries series;
  for (int i = 0; i <= 20; ++i) {
    series.times.push_back(0.01 * i);
    MomentsRecord r;
    r.m2_plus_gamma = 3.0 * std::pow(std::max(0.01 * i, 1e-12), 0.5);
    series.records.push_back(r);
  }
  const PowerFit fit = blowup_rate_fit(series, 6);
  CHECK(fit.points_used == 6);
  CHECK(fit.exponent == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("convolution-decay constant is finite and refinement-stable") {
  const double alpha = 1.0, s1 = 2.0, s2 = 4.0;
  const auto coarse = check_integration_lemma(
      gaussian_on(VelocityGrid::make(3, 12, 6.0), 1.0, 1.0), alpha, s1, s2, 48);
  const auto fine = check_integration_lemma(
      gaussian_on(VelocityGrid::make(3, 24, 6.0), 1.0, 1.0), alpha, s1, s2, 48);
  CHECK(coarse.all_finite);
  CHECK(fine.all_finite);
  CHECK(coarse.samples == 48);
  CHECK(coarse.c_hat > 0.0);
  // Fitted constant stable under one refinement (sharp-order estimate).
  CHECK(std::abs(fine.c_hat - coarse.c_hat) <= 0.10 * coarse.c_hat);
  // b = min(alpha, s1 + alpha (s2-s1)/d) = min(1, 2 + 2/3) = 1.
  CHECK(coarse.b_exponent == doctest::Approx(1.0));
}

TEST_CASE("sphere potential bound: alpha = 0 is exact and flat") {
  const auto rep = check_sphere_bound(vec3(0.2, -0.1, 0.5), 1.3, 0.0, 3, 48);
  CHECK(rep.all_finite);
  // I(v) = 1 identically, so the fitted constant is exactly 1.
  CHECK(rep.c_hat == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sphere potential bound: singular exponent stays uniformly bounded") {
  const Vec a = vec3(0.0, 0.3, -0.2);
  const double r = 0.8, alpha = 1.5;
  const auto rep = check_sphere_bound(a, r, alpha, 3, 64);
  CHECK(rep.all_finite);
  CHECK(rep.samples == 64);
  CHECK(rep.c_hat_near >= rep.c_hat_far - 1e-12);  // the near band is the hard one
  CHECK(rep.c_hat < 10.0);
  // The bound scales like r^{-alpha}: doubling r must not move the constant.
  const auto rep2 = check_sphere_bound(a, 2.0 * r, alpha, 3, 64);
  CHECK(std::abs(rep2.c_hat - rep.c_hat) <= 0.05 * rep.c_hat);
}

TEST_CASE("gaussian concentration on spheres obeys the dimensional ceiling") {
  const std::vector<double> ladder = {1.0, 4.0, 16.0, 64.0, 256.0};
  const auto rep = check_delta_concentration(vec3(0, 0, 1), 0.0,
                                             vec3(0.1, 0.0, 0.2), 1.1, ladder, 3);
  REQUIRE(rep.ladder_values.size() == ladder.size());
  CHECK(rep.bounded_ok);
  CHECK(rep.sup_value <= 2.0 * std::numbers::pi * 1.05);
  CHECK(rep.sup_value > 0.0);
  CHECK(rep.c_d_estimate > 0.0);
  // The d = 3 polar reduction must agree with the 2-D product quadrature.
  CHECK(rep.reduction_gap <= 1e-6);
}

TEST_CASE("weighted-decay bound holds along the extremal trajectory") {
  const std::vector<double> vs = {0.5, 1.0, 2.0, 4.0, 8.0};
  const auto rep = check_decay_ode(2.0, 0.5, 1.0, 1.0, 2.0, vs, 3.0);
  CHECK(rep.samples > 0);
  CHECK(rep.all_ok);
  CHECK(rep.max_excess <= 1e-10);
  CHECK(rep.oracle_gap <= 1e-10);
  // (2 C2 / C1)^{1/alpha} - 1 with C1 = 2, C2 = 0.5: threshold 0.5^{1} - 1 < 0,
  // so every sampled speed is in the contraction regime.
  CHECK(rep.v_threshold == doctest::Approx(-0.5).epsilon(1e-12));
}
