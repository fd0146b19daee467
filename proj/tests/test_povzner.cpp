#include <cmath>
#include <stdexcept>

#include "bnk/kernel.hpp"
#include "bnk/povzner.hpp"
#include "bnk/rng.hpp"
#include "bnk/vec.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bnk;

namespace {

const QuadratureSpec& quad() {
  static const QuadratureSpec q = QuadratureSpec::product(3, 12, 24);
  return q;
}

}  // namespace

TEST_CASE("comparable-speeds cutoff is an indicator of the outside band") {
  // chi = 1 outside |v|/2 < |v*| < 2|v|.
  const Vec v = vec3(2, 0, 0);
  CHECK(povzner_chi(v, vec3(0.5, 0, 0)) == 1.0);   // |v*| = 0.5 < 1
  CHECK(povzner_chi(v, vec3(0, 5, 0)) == 1.0);     // |v*| = 5 > 4
  CHECK(povzner_chi(v, vec3(0, 2.0, 0)) == 0.0);   // equal speeds: inside
  CHECK(povzner_chi(v, vec3(1.5, 0, 0)) == 0.0);
  CHECK(povzner_chi(v, vec3(0, 0, 3.9)) == 0.0);
}

TEST_CASE("sphere bracket vanishes for affine weights") {
  // psi affine in x = |v|^2 is a collision invariant combination: the bracket
  // cancels pointwise in sigma up to rounding.
  PovznerCase pc = power_weight_case(1.0);
  pc.psi = [](double x) { return 3.0 - 2.0 * x; };
  Sampler rng(5);
  for (int t = 0; t < 200; ++t) {
    Vec v = zero_vec(3), w = zero_vec(3);
    for (int k = 0; k < 3; ++k) {
      v.c[k] = 3.0 * rng.gaussian();
      w.c[k] = 3.0 * rng.gaussian();
    }
    const double k = k_psi(v, w, pc, quad());
    const double scale =
        (1.0 + norm2(v) + norm2(w)) * (1.0 + norm2(v) + norm2(w));
    CHECK(std::abs(k) <= 1e-12 * scale);
  }
  CHECK_THROWS_AS(k_psi(vec3(1, 0, 0), vec3(1, 0, 0), pc, quad()),
                  std::invalid_argument);
}

TEST_CASE("quartic weight: bracket sign tracks the speed disparity") {
  // For psi = x^2 a disparate pair sits near the extreme energy split, so
  // collisions can only even the energies out and the bracket integrates
  // negative; equal orthogonal speeds are the opposite extreme (the Jensen
  // minimum), where redistribution can only raise the convex weight.
  const PovznerCase pc = power_weight_case(1.0);
  CHECK(k_psi(vec3(3, 0, 0), vec3(0.05, 0.05, 0), pc, quad()) < 0.0);
  CHECK(k_psi(vec3(1.5, 0, 0), vec3(0, 1.5, 0), pc, quad()) > 0.0);
}

TEST_CASE("split identities: k = g - h and the direct g integral") {
  Sampler rng(11);
  for (const double alpha : {1.0, 0.5, -0.5}) {
    const PovznerCase pc = power_weight_case(alpha);
    for (int t = 0; t < 100; ++t) {
      Vec v = zero_vec(3), w = zero_vec(3);
      for (int k = 0; k < 3; ++k) {
        v.c[k] = 2.0 * rng.gaussian();
        w.c[k] = 2.0 * rng.gaussian();
      }
      if (norm(vec3(v.c[0] - w.c[0], v.c[1] - w.c[1], v.c[2] - w.c[2])) < 1e-6)
        continue;
      const PovznerSplit sp = povzner_split(v, w, pc, quad());
      CHECK(std::abs(sp.k - (sp.g - sp.h)) <= 1e-12 * (sp.scale + 1.0));
      CHECK(std::abs(sp.g_integral - sp.g) <= 1e-10 * (sp.scale + 1.0));
      // The Jensen core never exceeds the augmented sign-definite part for
      // convex powers (the augmentation only adds non-negative mass).
      if (alpha > 0.0) CHECK(sp.h >= sp.h_tilde - 1e-12 * (sp.scale + 1.0));
    }
  }
}

TEST_CASE("sampled shape report: convex power") {
  const PovznerReport rep = check_povzner(power_weight_case(1.0), 600, quad());
  CHECK(rep.samples == 600);
  CHECK(rep.chi_support > 0);
  CHECK(rep.sign_violations == 0);
  CHECK(rep.declared_bounds_ok);
  CHECK(rep.max_identity_gap <= 1e-10);
  CHECK(rep.c_g_hat > 0.0);
  CHECK(rep.c_h_hat > 0.0);
  CHECK(rep.all_ok);
}

TEST_CASE("sampled shape report: concave power") {
  const PovznerReport rep =
      check_povzner(power_weight_case(-0.5), 400, quad());
  CHECK(rep.sign_violations == 0);
  CHECK(rep.declared_bounds_ok);
  CHECK(rep.all_ok);
}

TEST_CASE("sampled shape report: logarithmic weight") {
  const PovznerReport rep = check_povzner(log_weight_case(), 400, quad());
  CHECK(rep.sign_violations == 0);
  CHECK(rep.c_g_bilinear > 0.0);  // phi' <= C/(1+x) shape engaged
  CHECK(rep.all_ok);
}

TEST_CASE("a modulation outside its declared bounds is flagged") {
  PovznerCase pc = power_weight_case(1.0);
  pc.F = [](const Vec&, const Vec&, const Vec&) { return 3.0; };
  pc.f_upper = 2.0;  // claims F <= 2, but F == 3
  const PovznerReport rep = check_povzner(pc, 50, quad());
  CHECK_FALSE(rep.declared_bounds_ok);
  CHECK_FALSE(rep.all_ok);
}

TEST_CASE("case validation rejects malformed shapes") {
  PovznerCase pc = power_weight_case(1.0);
  pc.f_lower = -1.0;
  CHECK_THROWS_AS(pc.validate(), std::invalid_argument);
  pc = power_weight_case(1.0);
  pc.alpha = -1.5;  // out of (-1, 0) u (0, inf)
  CHECK_THROWS_AS(pc.validate(), std::invalid_argument);
  pc = power_weight_case(0.7);
  CHECK_NOTHROW(pc.validate());
}

TEST_CASE("logarithmic weight ladder report") {
  const WeightFunctionReport rep = log_weight_report();
  CHECK(rep.zero_at_origin);
  CHECK(rep.increasing);
  CHECK(rep.concave);
  CHECK(rep.gap_growth_monotone);
  // phi(x) - phi(x/2) -> log 2 for phi = log(1+x).
  CHECK(rep.half_gap_tail == doctest::Approx(std::log(2.0)).epsilon(1e-6));
  CHECK(rep.weighted_gap_tail > 1.0);  // diverges with the x^0.1 weight
  CHECK(rep.all_ok);
}
