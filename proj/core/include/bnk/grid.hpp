#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "bnk/vec.hpp"

namespace bnk {

// Uniform, cell-centered, symmetric velocity grid covering [-V, V]^d with N cells
// per axis: nodes v_i = -V + (i + 1/2) h, h = 2V/N. Cell-centering keeps the grid
// invariant under v -> -v (no node at the origin), so odd moments of symmetric
// data vanish by exact cancellation rather than by luck.
struct VelocityGrid {
  int d = 3;
  int N = 0;
  double V = 0.0;
  double h = 0.0;

  static VelocityGrid make(int d, int N, double V);

  std::size_t size() const;
  double coord(int i) const { return -V + (i + 0.5) * h; }

  Vec node(std::size_t flat) const;                      // row-major, axis 0 slowest
  std::size_t index(const std::array<int, kMaxDim>& i) const;

  bool operator==(const VelocityGrid&) const = default;
};

// Values of f at the grid nodes. Non-negative by contract; validate() enforces it
// together with finiteness (mass/energy are then automatically finite).
struct Distribution {
  VelocityGrid grid;
  std::vector<double> values;

  static Distribution zero(const VelocityGrid& g);
  void validate() const;

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
};

// Multilinear interpolation among the 2^d nodes surrounding v, with zero ghost
// nodes outside the lattice: the interpolant ramps linearly from the outermost
// node plane (at V - h/2) to 0 one cell further out, so its support ends h/2
// beyond the velocity cube and it equals half the face value on the cube
// boundary itself. Exact at nodes and for affine functions in the interior.
double interpolate(const Distribution& f, const Vec& v);

// Lightweight view used by the collision quadrature inner loops; identical results
// to interpolate(), minus the abstraction overhead. d = 3 only.
struct InterpView3 {
  const double* vals = nullptr;
  int N = 0;
  double V = 0.0;
  double inv_h = 0.0;

  explicit InterpView3(const Distribution& f);
  double operator()(double x, double y, double z) const;
};

// Midpoint-rule moments: h^d sum |v|^alpha f(v). Compensated, fixed accumulation
// order (flat index), so results are reproducible to ~1 ulp independent of host.
double moment(const Distribution& f, double alpha);
Vec momentum(const Distribution& f);
double weighted_l1(const Distribution& f, double s);  // h^d sum (1 + |v|^s) f

double l1_distance(const Distribution& f, const Distribution& g);  // h^d sum |f - g|

struct SupNorms {
  double linf = 0.0;
  double linf_weighted = 0.0;
};
SupNorms sup_norms(const Distribution& f, double s);

// h^d sum [(1+f)log(1+f) - f log f], integrand continued by 0 at f = 0. The
// integrand grows only like log f for large f, so no clipping is needed.
double entropy(const Distribution& f);

// Concentration functional around v0:
//   Gamma_{v0}(f) = h^d sum_{0 < |v - v0| <= R0} f(v) / |v - v0|^{d-1-gamma}
// plus an analytic correction for the cell containing v0: that cell contributes
// f(nearest node) * |S^{d-1}| rc^{1+gamma} / (1+gamma) with rc = min(h/2, R0)
// (the exact integral of the weight over the inscribed ball, clipped to the
// requested radius), which keeps the estimator consistent as h -> 0 instead of
// dropping an O(h^{1+gamma}) piece — and keeps R0 < h/2 from overcounting.
double gamma_concentration(const Distribution& f, const Vec& v0, double R0, double gamma);

// sup over v0 restricted to grid nodes (a reported lower bound of the continuum
// sup). stride subsamples candidate nodes (1 = all nodes).
double gamma_sup(const Distribution& f, double R0, double gamma, int stride = 1);

// Deterministic orthonormal basis of the hyperplane orthogonal to the unit vector
// u (Gram-Schmidt over coordinate axes in order of increasing |u_k|); fills
// basis[0 .. d-2].
void hyperplane_basis(const Vec& u, int d, Vec* basis);

// (d-1)-dimensional midpoint quadrature of the interpolant over the hyperplane
// through v orthogonal to the unit vector u, with spacing h and transverse extent
// |w| <= 2 V sqrt(d). Throws on non-unit u.
double hyperplane_integral(const Distribution& f, const Vec& v, const Vec& u);

// Deterministic sample specification for hyperplane_sup: `directions` spiral-sampled
// directions (Fibonacci sphere for d = 3) crossed with an odd-ized ladder of
// `offsets` base points s*u, s in linspace(-0.9 V sqrt(d), +0.9 V sqrt(d)), which
// always contains the through-origin plane.
struct HyperplaneSampleSpec {
  int directions = 16;
  int offsets = 9;
  std::string describe(const VelocityGrid& g) const;
};

double hyperplane_sup(const Distribution& f, const HyperplaneSampleSpec& spec);

// Per-state diagnostic record used by the time series.
struct MomentsRecord {
  double m0 = 0.0;
  Vec m1;
  double m2 = 0.0;
  double m2_plus_gamma = 0.0;
  double entropy = 0.0;
  double linf = 0.0;
  double gamma_conc = 0.0;
};
MomentsRecord moments_record(const Distribution& f, double gamma, double gamma_R0,
                             int gamma_stride = 1);

}  // namespace bnk
