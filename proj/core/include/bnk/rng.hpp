#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "bnk/vec.hpp"

namespace bnk {

// Deterministic sampling stream. The mt19937_64 engine is bit-exact across
// implementations per the C++ standard; the *distributions* are not, so all
// transforms (uniform, Gaussian, sphere) are written out here. Every consumer of
// randomness takes an explicit seed that ends up in the effective-config echo,
// which is what makes reruns byte-identical.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : eng_(seed) {}

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // Marsaglia polar method; avoids trig and never evaluates log(0).
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
  }

  // Uniform direction on S^{d-1} via normalized Gaussians.
  Vec unit_vector(int d) {
    Vec u = zero_vec(d);
    double n2 = 0.0;
    do {
      n2 = 0.0;
      for (int i = 0; i < d; ++i) {
        u[i] = gaussian();
        n2 += u[i] * u[i];
      }
    } while (n2 == 0.0);
    const double inv = 1.0 / std::sqrt(n2);
    for (int i = 0; i < d; ++i) u[i] *= inv;
    return u;
  }

  // Uniform point in the centered ball of radius r.
  Vec ball_point(int d, double r) {
    Vec u = unit_vector(d);
    const double radius = r * std::pow(uniform(), 1.0 / d);
    for (int i = 0; i < d; ++i) u[i] *= radius;
    return u;
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace bnk
