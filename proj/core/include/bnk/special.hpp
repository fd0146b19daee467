#pragma once

namespace bnk {

// Riemann zeta on the real line (s != 1), by Euler-Maclaurin summation with 12
// Bernoulli correction terms; absolute accuracy ~1e-14 for s >= -20, which covers
// every argument the polylog expansions below request.
double riemann_zeta(double s);

// Bose-Einstein polylogarithms Li_{3/2}(z), Li_{5/2}(z) for z in [0, 1].
//
// For z <= 0.9 the defining series sum_{k>=1} z^k k^{-s} is summed directly with a
// geometric tail bound below 1e-14 relative. Near z = 1 the series tail decays like
// k^{-1/2} z^k and direct summation cannot reach that accuracy, so the evaluation
// switches to the expansion about the singularity (delta = -log z):
//   Li_{3/2}(e^-delta) = Gamma(-1/2) delta^{1/2} + sum_j zeta(3/2 - j) (-delta)^j / j!
//   Li_{5/2}(e^-delta) = Gamma(-3/2) delta^{3/2} + sum_j zeta(5/2 - j) (-delta)^j / j!
// with Gamma(-1/2) = -2 sqrt(pi), Gamma(-3/2) = 4 sqrt(pi)/3. Both branches agree to
// ~1e-14 in the overlap.
double polylog_3_2(double z);
double polylog_5_2(double z);

// Regular-part mass and energy of the Bose-Einstein state with occupation
// f(v) = 1/(exp(beta(|v|^2 - mu)/2) - 1) in dimension 3:
//   M0 = (2 pi / beta)^{3/2} Li_{3/2}(e^{beta mu / 2})
//   M2 = (3 / beta) (2 pi / beta)^{3/2} Li_{5/2}(e^{beta mu / 2})
// (term-by-term Gaussian integrals of the geometric expansion of the occupation).
struct BoseMoments {
  double m0 = 0.0;
  double m2 = 0.0;
};
BoseMoments be_mass_energy(double beta, double mu);

}  // namespace bnk
