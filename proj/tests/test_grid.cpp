#include <array>
#include <cmath>
#include <stdexcept>

#include "bnk/grid.hpp"
#include "bnk/initial.hpp"
#include "bnk/rng.hpp"
#include "bnk/vec.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bnk;

namespace {

Distribution gaussian_on(const VelocityGrid& g, double amp, double sigma) {
  InitialSpec spec;
  spec.family = "gaussian";
  spec.amplitude = amp;
  spec.sigma = sigma;
  spec.center = zero_vec(g.d);
  return build_initial(g, spec);
}

}  // namespace

TEST_CASE("grid geometry: spacing, symmetry, index round-trip") {
  const auto g = VelocityGrid::make(3, 8, 4.0);
  CHECK(g.h == doctest::Approx(1.0));
  CHECK(g.size() == 512);
  // Cell-centered: no node at the origin, nodes symmetric under v -> -v.
  CHECK(g.coord(0) == doctest::Approx(-3.5));
  CHECK(g.coord(7) == doctest::Approx(3.5));
  CHECK(g.coord(3) == doctest::Approx(-g.coord(4)));

  for (std::size_t flat : {0u, 17u, 255u, 511u}) {
    const Vec v = g.node(flat);
    std::array<int, kMaxDim> idx{};
    for (int k = 0; k < 3; ++k) {
      idx[k] = static_cast<int>(std::lround((v.c[k] + g.V) / g.h - 0.5));
    }
    CHECK(g.index(idx) == flat);
  }
}

TEST_CASE("grid construction rejects invalid shapes") {
  CHECK_THROWS_AS(VelocityGrid::make(3, 0, 4.0), std::invalid_argument);
  CHECK_THROWS_AS(VelocityGrid::make(3, 8, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(VelocityGrid::make(5, 8, 4.0), std::invalid_argument);
  CHECK_THROWS_AS(VelocityGrid::make(2, 8, 4.0), std::invalid_argument);
}

TEST_CASE("distribution validation enforces the non-negativity contract") {
  const auto g = VelocityGrid::make(3, 4, 2.0);
  auto f = Distribution::zero(g);
  CHECK_NOTHROW(f.validate());
  f[10] = -1e-9;
  CHECK_THROWS_AS(f.validate(), std::runtime_error);
  f[10] = std::nan("");
  CHECK_THROWS_AS(f.validate(), std::runtime_error);
}

TEST_CASE("interpolation is exact at nodes and for affine data") {
  const auto g = VelocityGrid::make(3, 8, 4.0);
  auto f = Distribution::zero(g);
  // Affine, kept positive over the cube: 10 + x - 2y + 0.5 z.
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec v = g.node(i);
    f[i] = 10.0 + v.c[0] - 2.0 * v.c[1] + 0.5 * v.c[2];
  }
  for (std::size_t i : {0u, 100u, 300u, 511u}) {
    CHECK(interpolate(f, g.node(i)) == doctest::Approx(f[i]).epsilon(1e-14));
  }
  Sampler rng(3);
  for (int t = 0; t < 500; ++t) {
    // Stay strictly inside the node hull, |coords| <= 3.4 < 3.5.
    const Vec v =
        vec3(6.8 * (rng.uniform() - 0.5), 6.8 * (rng.uniform() - 0.5),
             6.8 * (rng.uniform() - 0.5));
    const double want = 10.0 + v.c[0] - 2.0 * v.c[1] + 0.5 * v.c[2];
    CHECK(interpolate(f, v) == doctest::Approx(want).epsilon(1e-13));
  }
}

TEST_CASE("interpolation ramps to zero one cell past the outermost nodes") {
  const auto g = VelocityGrid::make(3, 4, 2.0);
  auto f = Distribution::zero(g);
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = 1.0;
  // Outermost node plane sits at 1.5 and the ghost plane at 2.5 carries zeros,
  // so the ramp is linear on [1.5, 2.5]: half the face value exactly on the
  // cube boundary, zero at and past V + h/2.
  CHECK(interpolate(f, vec3(1.5, 0.0, 0.0)) == doctest::Approx(1.0));
  CHECK(interpolate(f, vec3(1.75, 0.0, 0.0)) == doctest::Approx(0.75));
  CHECK(interpolate(f, vec3(2.0, 0.0, 0.0)) == doctest::Approx(0.5));
  CHECK(interpolate(f, vec3(2.25, 0.0, 0.0)) == doctest::Approx(0.25));
  CHECK(interpolate(f, vec3(2.5, 0.0, 0.0)) == 0.0);
  CHECK(interpolate(f, vec3(-9.0, 0.0, 0.0)) == 0.0);
}

TEST_CASE("fast interpolation view agrees with the reference everywhere") {
  const auto g = VelocityGrid::make(3, 6, 3.0);
  auto f = Distribution::zero(g);
  Sampler rng(5);
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = rng.uniform();
  const InterpView3 view(f);
  for (int t = 0; t < 3000; ++t) {
    const double x = 8.0 * (rng.uniform() - 0.5);
    const double y = 8.0 * (rng.uniform() - 0.5);
    const double z = 8.0 * (rng.uniform() - 0.5);
    const double a = interpolate(f, vec3(x, y, z));
    const double b = view(x, y, z);
    CHECK(a == doctest::Approx(b).epsilon(1e-14));
  }
}

TEST_CASE("moments of a resolved gaussian match the analytic values") {
  // amplitude 1, sigma 1 on [-8, 8]^3 with h = 0.5: midpoint-rule error for a
  // Gaussian decays faster than any power of h, so 1e-10 relative is easy.
  const auto g = VelocityGrid::make(3, 32, 8.0);
  const auto f = gaussian_on(g, 1.0, 1.0);
  CHECK(moment(f, 0.0) ==
        doctest::Approx(oracle::kGauss3Mass).epsilon(1e-10));
  // M2 = 3 sigma^2 M0.
  CHECK(moment(f, 2.0) ==
        doctest::Approx(3.0 * oracle::kGauss3Mass).epsilon(1e-10));
  const Vec p = momentum(f);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(p.c[k]) < 1e-15);
  // Weighted L1 with s = 2 is M0 + M2.
  CHECK(weighted_l1(f, 2.0) ==
        doctest::Approx(moment(f, 0.0) + moment(f, 2.0)).epsilon(1e-13));
}

TEST_CASE("odd moments of symmetric data cancel exactly") {
  const auto g = VelocityGrid::make(3, 10, 5.0);
  const auto f = gaussian_on(g, 2.0, 1.3);
  const Vec p = momentum(f);
  for (int k = 0; k < 3; ++k) CHECK(p.c[k] == 0.0);
}

TEST_CASE("sup norms and l1 distance") {
  const auto g = VelocityGrid::make(3, 8, 4.0);
  auto f = Distribution::zero(g);
  f[37] = 2.0;
  const Vec v37 = g.node(37);
  const auto sn = sup_norms(f, 2.0);
  CHECK(sn.linf == doctest::Approx(2.0));
  CHECK(sn.linf_weighted == doctest::Approx(2.0 * (1.0 + norm2(v37))));

  auto h2 = f;
  h2[37] = 1.25;
  h2[40] += 0.5;
  CHECK(l1_distance(f, h2) ==
        doctest::Approx(g.h * g.h * g.h * (0.75 + 0.5)).epsilon(1e-14));
}

TEST_CASE("entropy: frozen integrand value and zero-continuation") {
  const auto g = VelocityGrid::make(3, 4, 2.0);
  auto f = Distribution::zero(g);
  CHECK(entropy(f) == 0.0);
  // Uniform occupation e - 1 makes (1+f)log(1+f) = e exactly; entropy is the
  // cube volume times the frozen node value.
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = std::exp(1.0) - 1.0;
  CHECK(entropy(f) ==
        doctest::Approx(64.0 * oracle::kEntropyNodeAt32).epsilon(1e-13));
}

TEST_CASE("entropy increases mass-preservingly under spreading") {
  // Two states with identical mass; the spread-out one has higher entropy.
  const auto g = VelocityGrid::make(3, 8, 4.0);
  auto peaked = Distribution::zero(g);
  auto spread = Distribution::zero(g);
  peaked[100] = 1.6;
  spread[100] = 0.8;
  spread[101] = 0.8;
  CHECK(entropy(spread) > entropy(peaked));
}

TEST_CASE("concentration functional: single-point data has closed form") {
  const auto g = VelocityGrid::make(3, 8, 4.0);
  auto f = Distribution::zero(g);
  const std::size_t center = g.index({4, 4, 4});
  f[center] = 3.0;
  const Vec v0 = g.node(center);
  const double gamma = 1.0;
  // Only the self-cell correction contributes: f * 4 pi rc^2 / 2, rc = h/2.
  const double rc = 0.5 * g.h;
  const double want = 3.0 * 4.0 * M_PI * rc * rc / 2.0;
  CHECK(gamma_concentration(f, v0, 2.0, gamma) ==
        doctest::Approx(want).epsilon(1e-13));
  // R0 below h/2 clips the correction ball.
  const double r_small = 0.25 * g.h;
  CHECK(gamma_concentration(f, v0, r_small, gamma) ==
        doctest::Approx(3.0 * 4.0 * M_PI * r_small * r_small / 2.0)
            .epsilon(1e-13));
  // A second point at distance h adds f * h^3 / |dv|^{d-1-gamma} = f h^3 / h.
  f[g.index({5, 4, 4})] = 2.0;
  const double two = want + 2.0 * g.h * g.h * g.h / g.h;
  CHECK(gamma_concentration(f, v0, 2.0, gamma) ==
        doctest::Approx(two).epsilon(1e-13));
  // ...and falls outside a radius smaller than h.
  CHECK(gamma_concentration(f, v0, 0.9 * g.h, gamma) ==
        doctest::Approx(want).epsilon(1e-13));
}

TEST_CASE("concentration sup picks the best center and respects stride") {
  const auto g = VelocityGrid::make(3, 8, 4.0);
  auto f = Distribution::zero(g);
  f[g.index({2, 3, 4})] = 5.0;
  const double full = gamma_sup(f, 1.5, 1.0, 1);
  CHECK(full ==
        doctest::Approx(gamma_concentration(f, g.node(g.index({2, 3, 4})),
                                            1.5, 1.0)));
  // Any stride still returns a lower bound of the full sup.
  CHECK(gamma_sup(f, 1.5, 1.0, 3) <= full + 1e-15);
}

TEST_CASE("hyperplane basis is orthonormal and orthogonal to u") {
  Sampler rng(17);
  for (int t = 0; t < 50; ++t) {
    const Vec u = rng.unit_vector(3);
    Vec basis[2];
    hyperplane_basis(u, 3, basis);
    CHECK(std::abs(dot(basis[0], u)) < 1e-13);
    CHECK(std::abs(dot(basis[1], u)) < 1e-13);
    CHECK(std::abs(dot(basis[0], basis[1])) < 1e-13);
    CHECK(norm2(basis[0]) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(norm2(basis[1]) == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("hyperplane integral of a gaussian matches the analytic marginal") {
  // Integrating A exp(-|v|^2 / 2 s^2) over the plane through the origin with
  // any unit normal gives A (2 pi s^2)^{(d-1)/2} = 2 pi A s^2 in d = 3. The
  // quadrature reads the multilinear interpolant, whose peak-flattening bias
  // is O(h^2); at h = 0.25, s = 1.1 that is well under the 1.5% gate here.
  const auto g = VelocityGrid::make(3, 48, 6.0);
  const double amp = 0.7, s = 1.1;
  const auto f = gaussian_on(g, amp, s);
  const double want = amp * 2.0 * M_PI * s * s;
  for (const Vec& u :
       {vec3(1, 0, 0), vec3(0, 0, 1),
        vec3(1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0),
             1.0 / std::sqrt(3.0))}) {
    const double got = hyperplane_integral(f, zero_vec(3), u);
    CHECK(got == doctest::Approx(want).epsilon(1.5e-2));
  }
  // Off-center plane at distance 1: marginal scales by exp(-1 / (2 s^2)).
  const double off = hyperplane_integral(f, vec3(0, 0, 1), vec3(0, 0, 1));
  CHECK(off ==
        doctest::Approx(want * std::exp(-0.5 / (s * s))).epsilon(1.5e-2));
  CHECK_THROWS_AS(hyperplane_integral(f, zero_vec(3), vec3(1, 1, 0)),
                  std::invalid_argument);
}

TEST_CASE("hyperplane sup dominates the axis planes it samples") {
  const auto g = VelocityGrid::make(3, 16, 4.0);
  const auto f = gaussian_on(g, 1.0, 0.9);
  HyperplaneSampleSpec spec;
  const double sup = hyperplane_sup(f, spec);
  // The through-origin plane is always in the sample ladder, and the gaussian
  // marginal is maximal there, so the sup must be at least that plane's value
  // for whichever directions were sampled; cross-check with a generic one.
  const double origin_plane =
      hyperplane_integral(f, zero_vec(3), vec3(0, 0, 1));
  CHECK(sup >= 0.95 * origin_plane);
  CHECK(std::isfinite(sup));
  CHECK(!spec.describe(g).empty());
}

TEST_CASE("moments record mirrors the individual functionals") {
  const auto g = VelocityGrid::make(3, 8, 4.0);
  const auto f = gaussian_on(g, 0.5, 1.0);
  const MomentsRecord r = moments_record(f, 1.0, 1.0);
  CHECK(r.m0 == doctest::Approx(moment(f, 0.0)));
  CHECK(r.m2 == doctest::Approx(moment(f, 2.0)));
  CHECK(r.m2_plus_gamma == doctest::Approx(moment(f, 3.0)));
  CHECK(r.entropy == doctest::Approx(entropy(f)));
  CHECK(r.linf == doctest::Approx(sup_norms(f, 2.0).linf));
  CHECK(r.gamma_conc == doctest::Approx(gamma_sup(f, 1.0, 1.0, 2)));
}
