#pragma once

#include <string>

#include "bnk/grid.hpp"
#include "bnk/vec.hpp"

namespace bnk {

// Families of initial data. All are sampled at the grid nodes; `tail_report`
// quantifies how much analytic mass falls outside the velocity cube so that a
// too-small truncation radius V is visible instead of silent.
//
//   gaussian   A exp(-|v - center|^2 / (2 sigma^2))
//   spike      same form; separate name used by presets that chase the blow-up
//              guard with a tall, narrow bump
//   plateau    A on the ball |v - center| <= radius, 0 outside
//   bose       1 / (exp(beta (|v - center|^2 - mu) / 2) - 1), mu <= 0
//   power_tail A (1 + |v|^s)^{-1} on |v| <= radius, 0 outside
struct InitialSpec {
  std::string family = "gaussian";
  double amplitude = 1.0;
  double sigma = 1.0;
  double radius = 1.0;
  double s = 4.0;
  double beta = 1.0;
  double mu = -1.0;
  Vec center;

  void validate(int d) const;
};

Distribution build_initial(const VelocityGrid& g, const InitialSpec& spec);

struct TailReport {
  double grid_mass = 0.0;
  double analytic_mass = 0.0;
  bool has_analytic = false;
  double lost_fraction = 0.0;  // (analytic - grid) / analytic when known
};
TailReport tail_report(const Distribution& f, const InitialSpec& spec);

// Pointwise regular Bose-Einstein density (the `bose` family above at one point).
// Singular exactly at mu = 0, v = center; returns +infinity there so callers can
// detect the condensate point instead of receiving a bogus large number.
double bose_einstein_regular(const Vec& v, const Vec& center, double beta, double mu);

}  // namespace bnk
