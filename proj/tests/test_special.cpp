#include <cmath>
#include <limits>

#include "bnk/initial.hpp"
#include "bnk/special.hpp"
#include "bnk/vec.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bnk;

TEST_CASE("riemann zeta matches frozen half-integer values") {
  CHECK(riemann_zeta(1.5) == doctest::Approx(oracle::kZeta32).epsilon(1e-14));
  CHECK(riemann_zeta(2.5) == doctest::Approx(oracle::kZeta52).epsilon(1e-14));
  CHECK(riemann_zeta(0.5) == doctest::Approx(oracle::kZeta12).epsilon(1e-14));
  CHECK(riemann_zeta(-0.5) == doctest::Approx(oracle::kZetaM12).epsilon(1e-13));
  CHECK(riemann_zeta(-1.5) == doctest::Approx(oracle::kZetaM32).epsilon(1e-13));
  // Classical spot checks with closed forms.
  CHECK(riemann_zeta(2.0) ==
        doctest::Approx(M_PI * M_PI / 6.0).epsilon(1e-14));
  CHECK(riemann_zeta(4.0) ==
        doctest::Approx(std::pow(M_PI, 4) / 90.0).epsilon(1e-14));
}

TEST_CASE("polylogarithms match frozen values on both evaluation branches") {
  // Direct-series branch.
  CHECK(polylog_3_2(0.5) == doctest::Approx(oracle::kLi32Half).epsilon(1e-14));
  CHECK(polylog_5_2(0.5) == doctest::Approx(oracle::kLi52Half).epsilon(1e-14));
  CHECK(polylog_3_2(0.9) == doctest::Approx(oracle::kLi32Of09).epsilon(1e-14));
  // Singular-expansion branch.
  CHECK(polylog_5_2(0.99) ==
        doctest::Approx(oracle::kLi52Of099).epsilon(1e-13));
  CHECK(polylog_3_2(1.0 - 1e-6) ==
        doctest::Approx(oracle::kLi32Near1).epsilon(1e-12));
  // Endpoint values: Li_s(0) = 0, Li_s(1) = zeta(s).
  CHECK(polylog_3_2(0.0) == 0.0);
  CHECK(polylog_3_2(1.0) == doctest::Approx(oracle::kZeta32).epsilon(1e-13));
  CHECK(polylog_5_2(1.0) == doctest::Approx(oracle::kZeta52).epsilon(1e-13));
}

TEST_CASE("polylogarithm branches agree in the switchover window") {
  // Whatever the internal switch point is, values on a fine ladder across
  // [0.9, 1) must be smooth: compare against the defining series summed in
  // long double with brute force (5e6 terms is far past the needed tail).
  for (double z : {0.90, 0.93, 0.95, 0.97, 0.985, 0.995}) {
    long double s32 = 0.0L, s52 = 0.0L, zk = 1.0L;
    for (int k = 1; k <= 5'000'000; ++k) {
      zk *= z;
      const long double t = zk / std::sqrt(static_cast<long double>(k));
      s32 += t / k;
      s52 += t / (static_cast<long double>(k) * k);
    }
    CHECK(polylog_3_2(z) ==
          doctest::Approx(static_cast<double>(s32)).epsilon(2e-13));
    CHECK(polylog_5_2(z) ==
          doctest::Approx(static_cast<double>(s52)).epsilon(2e-13));
  }
}

TEST_CASE("bose moments reproduce the condensation-line values") {
  const BoseMoments m = be_mass_energy(1.0, 0.0);
  CHECK(m.m0 == doctest::Approx(oracle::kBeM0Mu0Beta1).epsilon(1e-13));
  CHECK(m.m2 == doctest::Approx(oracle::kBeM2Mu0Beta1).epsilon(1e-13));
}

TEST_CASE("bose moments scale as beta^{-3/2} and beta^{-5/2} at mu = 0") {
  const BoseMoments a = be_mass_energy(1.0, 0.0);
  const BoseMoments b = be_mass_energy(4.0, 0.0);
  CHECK(a.m0 / b.m0 == doctest::Approx(std::pow(4.0, 1.5)).epsilon(1e-12));
  CHECK(a.m2 / b.m2 == doctest::Approx(std::pow(4.0, 2.5)).epsilon(1e-12));
}

TEST_CASE("bose moments against direct radial quadrature at mu < 0") {
  // M0 = 4 pi int r^2 f(r) dr, M2 = 4 pi int r^4 f(r) dr with
  // f(r) = 1/(exp(beta (r^2 - mu)/2) - 1); simple Simpson on [0, 30].
  const double beta = 0.7, mu = -1.3;
  auto occ = [&](double r) {
    return 1.0 / std::expm1(0.5 * beta * (r * r - mu));
  };
  const int n = 60'000;
  const double a = 0.0, b = 30.0, h = (b - a) / n;
  double s0 = 0.0, s2 = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double r = a + i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    const double f = occ(r);
    s0 += w * r * r * f;
    s2 += w * r * r * r * r * f;
  }
  s0 *= 4.0 * M_PI * h / 3.0;
  s2 *= 4.0 * M_PI * h / 3.0;
  const BoseMoments m = be_mass_energy(beta, mu);
  CHECK(m.m0 == doctest::Approx(s0).epsilon(1e-10));
  CHECK(m.m2 == doctest::Approx(s2).epsilon(1e-10));
}

TEST_CASE("regular bose density: frozen spot, monotonicity, condensate point") {
  const Vec u = vec3(0.3, -0.2, 1.0);
  CHECK(bose_einstein_regular(u, u, 1.0, -1.0) ==
        doctest::Approx(oracle::kBeRegularSpot).epsilon(1e-14));
  // Radially decreasing away from the center.
  double prev = std::numeric_limits<double>::infinity();
  for (double r : {0.0, 0.5, 1.0, 2.0, 4.0}) {
    const double f =
        bose_einstein_regular(vec3(0.3 + r, -0.2, 1.0), u, 1.0, -0.5);
    CHECK(f < prev);
    prev = f;
  }
  // mu = 0 at the center is the condensate point: +infinity, not a junk value.
  CHECK(std::isinf(bose_einstein_regular(u, u, 2.0, 0.0)));
  // Off-center it is finite even at mu = 0.
  CHECK(std::isfinite(
      bose_einstein_regular(vec3(1.3, -0.2, 1.0), u, 2.0, 0.0)));
}
