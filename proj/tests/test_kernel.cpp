#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bnk/kernel.hpp"
#include "bnk/rng.hpp"
#include "bnk/vec.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bnk;

namespace {

KernelParams hard_spheres() {
  KernelParams p;
  p.c_phi = 1.0;
  p.gamma = 1.0;
  p.d = 3;
  p.b = AngularKernel::constant(1.0);
  return p;
}

}  // namespace

TEST_CASE("post-collision pair conserves momentum and energy") {
  Sampler rng(11);
  for (int i = 0; i < 1000; ++i) {
    Vec v = zero_vec(3), w = zero_vec(3);
    for (int k = 0; k < 3; ++k) {
      v.c[k] = 3.0 * rng.gaussian();
      w.c[k] = 3.0 * rng.gaussian();
    }
    const Vec sigma = rng.unit_vector(3);
    const auto [vp, wp] = post_collision(v, w, sigma);
    for (int k = 0; k < 3; ++k)
      CHECK(v.c[k] + w.c[k] ==
            doctest::Approx(vp.c[k] + wp.c[k]).epsilon(1e-14));
    CHECK(norm2(v) + norm2(w) ==
          doctest::Approx(norm2(vp) + norm2(wp)).epsilon(1e-13));
  }
}

TEST_CASE("post-collision rejects non-unit sigma") {
  const Vec v = vec3(1, 0, 0), w = vec3(0, 1, 0);
  Vec bad = vec3(0.5, 0.5, 0.5);  // |bad| = sqrt(3)/2
  CHECK_THROWS_AS(post_collision(v, w, bad), std::invalid_argument);
}

TEST_CASE("sigma split: worked d = 3 example") {
  // v = (1,0,0), v* = (-1,0,0), sigma = (0,1,0): cos theta = 0, beta = 1/2,
  // v' = (0,1,0), so Y = 1, Z = 0 and both post-collision speeds are 1.
  const Vec v = vec3(1, 0, 0), w = vec3(-1, 0, 0), s = vec3(0, 1, 0);
  const SigmaSplit sp = sigma_split(v, w, s);
  CHECK(sp.cos_theta == doctest::Approx(0.0));
  CHECK(sp.beta == doctest::Approx(0.5));
  CHECK(sp.Y == doctest::Approx(1.0));
  CHECK(sp.Z == doctest::Approx(0.0));
  const auto [vp, wp] = post_collision(v, w, s);
  CHECK(norm2(vp) == doctest::Approx(1.0));
  CHECK(norm2(wp) == doctest::Approx(1.0));
}

TEST_CASE("sigma split identities hold on random triples") {
  Sampler rng(7);
  for (int i = 0; i < 2000; ++i) {
    Vec v = zero_vec(3), w = zero_vec(3);
    for (int k = 0; k < 3; ++k) {
      v.c[k] = 2.5 * rng.gaussian();
      w.c[k] = 2.5 * rng.gaussian();
    }
    const Vec sigma = rng.unit_vector(3);
    const SigmaSplit sp = sigma_split(v, w, sigma);
    const auto [vp, wp] = post_collision(v, w, sigma);

    CHECK(sp.beta >= 0.0);
    CHECK(sp.beta <= 1.0);
    CHECK(sp.Y ==
          doctest::Approx(sp.beta * norm2(v) + (1.0 - sp.beta) * norm2(w))
              .epsilon(1e-13));
    // Y + Z = |v'|^2 and (mirror Y) - Z = |v'*|^2.
    const double y_m = (1.0 - sp.beta) * norm2(v) + sp.beta * norm2(w);
    CHECK(sp.Y + sp.Z == doctest::Approx(norm2(vp)).epsilon(1e-12));
    CHECK(y_m - sp.Z == doctest::Approx(norm2(wp)).epsilon(1e-12));

    // Z is odd and beta complements under sigma -> -sigma.
    Vec ms = sigma;
    for (int k = 0; k < 3; ++k) ms.c[k] = -ms.c[k];
    const SigmaSplit sm = sigma_split(v, w, ms);
    CHECK(sm.Z == doctest::Approx(-sp.Z).epsilon(1e-12));
    CHECK(sm.beta + sp.beta == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("sigma split throws on the degenerate pair") {
  const Vec v = vec3(0.4, -1.0, 2.0);
  CHECK_THROWS_AS(sigma_split(v, v, vec3(1, 0, 0)), std::invalid_argument);
}

TEST_CASE("angular constants: closed forms for constant b") {
  auto p = hard_spheres();
  CHECK(angular_constants(p).b_inf == doctest::Approx(1.0));
  CHECK(angular_constants(p).l_b ==
        doctest::Approx(oracle::kLbConstB1D3).epsilon(1e-14));

  p.b = AngularKernel::constant(2.5);
  CHECK(angular_constants(p).l_b ==
        doctest::Approx(2.5 * oracle::kLbConstB1D3).epsilon(1e-14));
  CHECK(angular_constants(p).b_inf == doctest::Approx(2.5));

  KernelParams q;
  q.d = 4;
  q.gamma = 1.0;
  q.b = AngularKernel::constant(1.0);
  CHECK(angular_constants(q).l_b ==
        doctest::Approx(oracle::kLbConstB1D4).epsilon(1e-12));
}

TEST_CASE("angular constants: tabulated b(x) = 1 + x^2 in d = 3") {
  // l_b = |S^1| int_0^pi (1 + cos^2) sin dtheta = 2 pi * 8/3. The table is a
  // piecewise-linear sample of the parabola, so the integral converges at rate
  // h^2; 2001 nodes put the residual below 1e-6 relative.
  std::vector<std::pair<double, double>> tab;
  const int n = 2001;
  tab.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double x = -1.0 + 2.0 * i / (n - 1);
    tab.emplace_back(x, 1.0 + x * x);
  }
  KernelParams p = hard_spheres();
  p.b = AngularKernel::table(std::move(tab));
  const AngularConstants ac = angular_constants(p);
  CHECK(ac.b_inf == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(ac.l_b == doctest::Approx(oracle::kLbOnePlusX2D3).epsilon(1e-6));
}

TEST_CASE("tabulated kernel interpolates, clamps, and rejects bad samples") {
  AngularKernel b = AngularKernel::table({{0.5, 2.0}, {-0.5, 1.0}});
  CHECK(b(-0.5) == doctest::Approx(1.0));
  CHECK(b(0.0) == doctest::Approx(1.5));
  CHECK(b(0.5) == doctest::Approx(2.0));
  // Constant extension beyond the sampled range.
  CHECK(b(-1.0) == doctest::Approx(1.0));
  CHECK(b(1.0) == doctest::Approx(2.0));
  CHECK(b.sup() == doctest::Approx(2.0));
  CHECK_FALSE(b.is_constant());

  CHECK_THROWS_AS(AngularKernel::table({{0.0, -1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(AngularKernel::table({{2.0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(AngularKernel::table({}), std::invalid_argument);
}

TEST_CASE("kernel value: hard-sphere powers and truncation") {
  auto p = hard_spheres();
  const Vec v = vec3(2, 0, 0), w = vec3(-1, 0, 0), s = vec3(0, 0, 1);
  // |v - w| = 3.
  CHECK(kernel_value(v, w, s, p) == doctest::Approx(3.0).epsilon(1e-14));
  p.gamma = 0.5;
  CHECK(kernel_value(v, w, s, p) ==
        doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
  p.gamma = 0.0;
  CHECK(kernel_value(v, w, s, p) == doctest::Approx(1.0).epsilon(1e-14));

  // Truncation caps the relative speed at n.
  p.gamma = 1.0;
  CHECK(kernel_value(v, w, s, p, 2.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(kernel_value(v, w, s, p, 5.0) == doctest::Approx(3.0).epsilon(1e-14));

  // C_phi scales linearly.
  p.c_phi = 0.25;
  CHECK(kernel_value(v, w, s, p, 2.0) == doctest::Approx(0.5).epsilon(1e-14));

  // Degenerate pair: zero for gamma > 0, b-weighted constant for gamma = 0.
  p.c_phi = 1.0;
  CHECK(kernel_value(v, v, s, p) == 0.0);
  p.gamma = 0.0;
  CHECK(kernel_value(v, v, s, p) == doctest::Approx(1.0));
}

TEST_CASE("make_triple bundles geometry consistently") {
  Sampler rng(23);
  for (int i = 0; i < 200; ++i) {
    Vec v = zero_vec(3), w = zero_vec(3);
    for (int k = 0; k < 3; ++k) {
      v.c[k] = rng.gaussian();
      w.c[k] = rng.gaussian();
    }
    const Vec sigma = rng.unit_vector(3);
    const CollisionTriple t = make_triple(v, w, sigma);
    const auto [vp, wp] = post_collision(v, w, sigma);
    for (int k = 0; k < 3; ++k) {
      CHECK(t.v_prime.c[k] == vp.c[k]);
      CHECK(t.v_star_prime.c[k] == wp.c[k]);
    }
    const SigmaSplit sp = sigma_split(v, w, sigma);
    CHECK(t.beta == sp.beta);
    CHECK(t.Y == sp.Y);
    CHECK(t.Z == sp.Z);
    CHECK(t.cos_theta == sp.cos_theta);
  }
}

TEST_CASE("kernel params validation rejects out-of-contract values") {
  auto p = hard_spheres();
  p.gamma = -0.1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = hard_spheres();
  p.gamma = 1.1;  // would exceed 1 even though d - 2 = 1 allows it in d >= 4
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = hard_spheres();
  p.d = 2;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = hard_spheres();
  p.c_phi = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = hard_spheres();
  CHECK_NOTHROW(p.validate());
}
