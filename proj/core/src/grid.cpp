#include "bnk/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>

#include "bnk/quadrature.hpp"
#include "bnk/summation.hpp"

namespace bnk {

VelocityGrid VelocityGrid::make(int d, int N, double V) {
  if (d < 3 || d > static_cast<int>(kMaxDim))
    throw std::invalid_argument("VelocityGrid: dimension must be 3 or 4");
  if (N < 4 || N % 2 != 0)
    throw std::invalid_argument("VelocityGrid: N must be an even integer >= 4");
  if (!(V > 0.0) || !std::isfinite(V))
    throw std::invalid_argument("VelocityGrid: V must be positive and finite");
  VelocityGrid g;
  g.d = d;
  g.N = N;
  g.V = V;
  g.h = 2.0 * V / static_cast<double>(N);
  return g;
}

std::size_t VelocityGrid::size() const {
  std::size_t n = 1;
  for (int k = 0; k < d; ++k) n *= static_cast<std::size_t>(N);
  return n;
}

Vec VelocityGrid::node(std::size_t flat) const {
  Vec v = zero_vec(d);
  for (int k = d - 1; k >= 0; --k) {
    const std::size_t i = flat % static_cast<std::size_t>(N);
    flat /= static_cast<std::size_t>(N);
    v[k] = coord(static_cast<int>(i));
  }
  return v;
}

std::size_t VelocityGrid::index(const std::array<int, kMaxDim>& i) const {
  std::size_t flat = 0;
  for (int k = 0; k < d; ++k)
    flat = flat * static_cast<std::size_t>(N) + static_cast<std::size_t>(i[k]);
  return flat;
}

Distribution Distribution::zero(const VelocityGrid& g) {
  Distribution f;
  f.grid = g;
  f.values.assign(g.size(), 0.0);
  return f;
}

void Distribution::validate() const {
  if (values.size() != grid.size())
    throw std::runtime_error("Distribution: value array does not match grid size");
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double x = values[i];
    if (!std::isfinite(x))
      throw std::runtime_error("Distribution: non-finite value at node " + std::to_string(i));
    if (x < 0.0)
      throw std::runtime_error("Distribution: negative value at node " + std::to_string(i));
  }
}

namespace {

// Shared corner/fraction computation. Returns false when v is outside the support
// of the zero-extended interpolant (a full cell or more beyond the last node, i.e.
// at or past V + h/2).
inline bool locate(double x, double V, double inv_h, int N, int& i0, double& fr) {
  const double t = (x + V) * inv_h - 0.5;
  if (t <= -1.0 || t >= static_cast<double>(N)) return false;
  double fl = std::floor(t);
  i0 = static_cast<int>(fl);
  fr = t - fl;
  return true;
}

}  // namespace

double interpolate(const Distribution& f, const Vec& v) {
  const VelocityGrid& g = f.grid;
  const double inv_h = 1.0 / g.h;
  int base[kMaxDim];
  double fr[kMaxDim];
  bool interior = true;
  for (int k = 0; k < g.d; ++k) {
    if (!locate(v[k], g.V, inv_h, g.N, base[k], fr[k])) return 0.0;
    interior = interior && base[k] >= 0 && base[k] <= g.N - 2;
  }

  const std::size_t n = static_cast<std::size_t>(g.N);
  if (interior) {
    // All 2^d corners exist: gather with precomputed strides.
    std::size_t flat0 = 0;
    for (int k = 0; k < g.d; ++k)
      flat0 = flat0 * n + static_cast<std::size_t>(base[k]);
    std::size_t stride[kMaxDim];
    stride[g.d - 1] = 1;
    for (int k = g.d - 2; k >= 0; --k) stride[k] = stride[k + 1] * n;

    double acc = 0.0;
    for (unsigned corner = 0; corner < (1u << g.d); ++corner) {
      double w = 1.0;
      std::size_t flat = flat0;
      for (int k = 0; k < g.d; ++k) {
        if (corner & (1u << k)) {
          w *= fr[k];
          flat += stride[k];
        } else {
          w *= 1.0 - fr[k];
        }
      }
      acc += w * f.values[flat];
    }
    return acc;
  }

  // Boundary path: out-of-range corners contribute 0 (zero extension).
  double acc = 0.0;
  for (unsigned corner = 0; corner < (1u << g.d); ++corner) {
    double w = 1.0;
    bool valid = true;
    std::array<int, kMaxDim> idx{};
    for (int k = 0; k < g.d; ++k) {
      const int ik = base[k] + ((corner >> k) & 1u);
      if (ik < 0 || ik >= g.N) {
        valid = false;
        break;
      }
      idx[k] = ik;
      w *= (corner & (1u << k)) ? fr[k] : 1.0 - fr[k];
    }
    if (valid) acc += w * f.values[g.index(idx)];
  }
  return acc;
}

InterpView3::InterpView3(const Distribution& f) {
  if (f.grid.d != 3) throw std::invalid_argument("InterpView3 requires d = 3");
  vals = f.values.data();
  N = f.grid.N;
  V = f.grid.V;
  inv_h = 1.0 / f.grid.h;
}

double InterpView3::operator()(double x, double y, double z) const {
  int ix, iy, iz;
  double fx, fy, fz;
  if (!locate(x, V, inv_h, N, ix, fx)) return 0.0;
  if (!locate(y, V, inv_h, N, iy, fy)) return 0.0;
  if (!locate(z, V, inv_h, N, iz, fz)) return 0.0;

  if (ix >= 0 && ix <= N - 2 && iy >= 0 && iy <= N - 2 && iz >= 0 && iz <= N - 2) {
    const std::size_t n = static_cast<std::size_t>(N);
    const double* p = vals + (static_cast<std::size_t>(ix) * n + static_cast<std::size_t>(iy)) * n +
                      static_cast<std::size_t>(iz);
    const double gx = 1.0 - fx, gy = 1.0 - fy, gz = 1.0 - fz;
    const double c00 = p[0] * gz + p[1] * fz;
    const double c01 = p[n] * gz + p[n + 1] * fz;
    const double c10 = p[n * n] * gz + p[n * n + 1] * fz;
    const double c11 = p[n * n + n] * gz + p[n * n + n + 1] * fz;
    return (c00 * gy + c01 * fy) * gx + (c10 * gy + c11 * fy) * fx;
  }

  // Rare boundary case: defer to the generic gather.
  double acc = 0.0;
  const int bs[3] = {ix, iy, iz};
  const double fs[3] = {fx, fy, fz};
  const std::size_t n = static_cast<std::size_t>(N);
  for (unsigned corner = 0; corner < 8; ++corner) {
    double w = 1.0;
    std::size_t flat = 0;
    bool valid = true;
    for (int k = 0; k < 3; ++k) {
      const int ik = bs[k] + ((corner >> k) & 1u);
      if (ik < 0 || ik >= N) {
        valid = false;
        break;
      }
      flat = flat * n + static_cast<std::size_t>(ik);
      w *= (corner & (1u << k)) ? fs[k] : 1.0 - fs[k];
    }
    if (valid) acc += w * vals[flat];
  }
  return acc;
}

double moment(const Distribution& f, double alpha) {
  if (alpha < 0.0) throw std::invalid_argument("moment: alpha must be >= 0");
  const VelocityGrid& g = f.grid;
  Kahan acc;
  const std::size_t total = g.size();
  for (std::size_t i = 0; i < total; ++i) {
    const double fi = f.values[i];
    if (fi == 0.0) continue;
    if (alpha == 0.0) {
      acc.add(fi);
      continue;
    }
    const double n2 = norm2(g.node(i));
    double w;
    if (alpha == 2.0)
      w = n2;
    else if (alpha == 1.0)
      w = std::sqrt(n2);
    else
      w = (n2 == 0.0) ? 0.0 : std::pow(n2, 0.5 * alpha);
    acc.add(w * fi);
  }
  return acc.value() * std::pow(g.h, g.d);
}

Vec momentum(const Distribution& f) {
  const VelocityGrid& g = f.grid;
  Kahan acc[kMaxDim];
  const std::size_t total = g.size();
  for (std::size_t i = 0; i < total; ++i) {
    const double fi = f.values[i];
    if (fi == 0.0) continue;
    const Vec v = g.node(i);
    for (int k = 0; k < g.d; ++k) acc[k].add(v[k] * fi);
  }
  const double cell = std::pow(g.h, g.d);
  Vec m = zero_vec(g.d);
  for (int k = 0; k < g.d; ++k) m[k] = acc[k].value() * cell;
  return m;
}

double weighted_l1(const Distribution& f, double s) {
  if (s < 0.0) throw std::invalid_argument("weighted_l1: s must be >= 0");
  const VelocityGrid& g = f.grid;
  Kahan acc;
  const std::size_t total = g.size();
  for (std::size_t i = 0; i < total; ++i) {
    const double fi = f.values[i];
    if (fi == 0.0) continue;
    const double n = norm(g.node(i));
    acc.add((1.0 + std::pow(n, s)) * fi);
  }
  return acc.value() * std::pow(g.h, g.d);
}

double l1_distance(const Distribution& f, const Distribution& g) {
  if (!(f.grid == g.grid))
    throw std::invalid_argument("l1_distance: distributions live on different grids");
  Kahan acc;
  for (std::size_t i = 0; i < f.values.size(); ++i)
    acc.add(std::abs(f.values[i] - g.values[i]));
  return acc.value() * std::pow(f.grid.h, f.grid.d);
}

SupNorms sup_norms(const Distribution& f, double s) {
  if (s < 0.0) throw std::invalid_argument("sup_norms: s must be >= 0");
  const VelocityGrid& g = f.grid;
  SupNorms out;
  const std::size_t total = g.size();
  for (std::size_t i = 0; i < total; ++i) {
    const double fi = f.values[i];
    if (fi > out.linf) out.linf = fi;
    if (fi == 0.0) continue;
    const double w = (1.0 + std::pow(norm(g.node(i)), s)) * fi;
    if (w > out.linf_weighted) out.linf_weighted = w;
  }
  return out;
}

double entropy(const Distribution& f) {
  const VelocityGrid& g = f.grid;
  Kahan acc;
  for (double x : f.values) {
    if (x <= 0.0) continue;  // integrand extends continuously by 0
    acc.add((1.0 + x) * std::log1p(x) - x * std::log(x));
  }
  return acc.value() * std::pow(g.h, g.d);
}

double gamma_concentration(const Distribution& f, const Vec& v0, double R0, double gamma) {
  if (!(R0 > 0.0)) throw std::invalid_argument("gamma_concentration: R0 must be > 0");
  const VelocityGrid& g = f.grid;
  const double p = g.d - 1.0 - gamma;
  const double R2 = R0 * R0;

  // Nearest node to v0 (defined whenever v0 is inside the grid cube); its cell is
  // replaced by the exact integral of the singular weight over the inscribed ball.
  bool inside = true;
  std::array<int, kMaxDim> nearest{};
  for (int k = 0; k < g.d; ++k) {
    if (std::abs(v0[k]) > g.V) {
      inside = false;
      break;
    }
    const double t = (v0[k] + g.V) / g.h - 0.5;
    nearest[k] = std::clamp(static_cast<int>(std::floor(t + 0.5)), 0, g.N - 1);
  }
  const std::size_t skip = inside ? g.index(nearest) : static_cast<std::size_t>(-1);

  int lo[kMaxDim], hi[kMaxDim];
  for (int k = 0; k < g.d; ++k) {
    lo[k] = std::max(0, static_cast<int>(std::ceil((v0[k] - R0 + g.V) / g.h - 0.5)));
    hi[k] = std::min(g.N - 1, static_cast<int>(std::floor((v0[k] + R0 + g.V) / g.h - 0.5)));
    if (lo[k] > hi[k]) lo[k] = 1, hi[k] = 0;  // empty box
  }

  Kahan acc;
  std::array<int, kMaxDim> idx{};
  // Odometer over the bounding box (at most 3 or 4 axes).
  for (int k = 0; k < g.d; ++k) idx[k] = lo[k];
  while (idx[0] <= hi[0]) {
    const std::size_t flat = g.index(idx);
    if (flat != skip) {
      const double fi = f.values[flat];
      if (fi != 0.0) {
        double r2 = 0.0;
        for (int k = 0; k < g.d; ++k) {
          const double dk = g.coord(idx[k]) - v0[k];
          r2 += dk * dk;
        }
        if (r2 <= R2 && r2 > 0.0) {
          const double r = std::sqrt(r2);
          const double w = (p == 1.0) ? 1.0 / r : std::pow(r, -p);
          acc.add(fi * w);
        }
      }
    }
    int k = g.d - 1;
    while (k >= 0) {
      if (++idx[k] <= hi[k]) break;
      if (k == 0) break;
      idx[k] = lo[k];
      --k;
    }
    if (k < 0) break;
  }

  double out = acc.value() * std::pow(g.h, g.d);
  if (inside) {
    // Exact cell correction: int_{|w|<rc} |w|^{-(d-1-gamma)} dw
    //                        = |S^{d-1}| rc^{1+gamma} / (1+gamma),
    // with rc capped at R0 — when the query radius is smaller than the half-cell
    // the integration ball is the R0-ball itself, not the inscribed one.
    const double rc = std::min(0.5 * g.h, R0);
    out += f.values[skip] * sphere_area(g.d) * std::pow(rc, 1.0 + gamma) / (1.0 + gamma);
  }
  return out;
}

double gamma_sup(const Distribution& f, double R0, double gamma, int stride) {
  if (stride < 1) throw std::invalid_argument("gamma_sup: stride must be >= 1");
  const VelocityGrid& g = f.grid;
  double best = 0.0;
  std::array<int, kMaxDim> idx{};
  for (int k = 0; k < g.d; ++k) idx[k] = 0;
  while (true) {
    Vec v0 = zero_vec(g.d);
    for (int k = 0; k < g.d; ++k) v0[k] = g.coord(idx[k]);
    best = std::max(best, gamma_concentration(f, v0, R0, gamma));
    int k = g.d - 1;
    while (k >= 0) {
      idx[k] += stride;
      if (idx[k] < g.N) break;
      idx[k] = 0;
      --k;
    }
    if (k < 0) break;
  }
  return best;
}

void hyperplane_basis(const Vec& u, int d, Vec* basis) {
  int order[kMaxDim];
  for (int k = 0; k < d; ++k) order[k] = k;
  std::sort(order, order + d,
            [&u](int a, int b) { return std::abs(u[a]) < std::abs(u[b]); });
  int got = 0;
  for (int t = 0; t < d && got < d - 1; ++t) {
    Vec e = zero_vec(d);
    e[order[t]] = 1.0;
    // Remove the u component and previously accepted directions.
    double du = dot(e, u);
    for (int k = 0; k < d; ++k) e[k] -= du * u[k];
    for (int j = 0; j < got; ++j) {
      const double c = dot(e, basis[j]);
      for (int k = 0; k < d; ++k) e[k] -= c * basis[j][k];
    }
    const double n = norm(e);
    if (n < 1e-10) continue;
    for (int k = 0; k < d; ++k) e[k] /= n;
    basis[got++] = e;
  }
  if (got != d - 1) throw std::runtime_error("hyperplane_basis: degenerate direction");
}

double hyperplane_integral(const Distribution& f, const Vec& v, const Vec& u) {
  const VelocityGrid& g = f.grid;
  if (u.d != g.d || v.d != g.d)
    throw std::invalid_argument("hyperplane_integral: dimension mismatch");
  if (std::abs(norm2(u) - 1.0) > 1e-12)
    throw std::invalid_argument("hyperplane_integral: u must be a unit vector");

  Vec basis[kMaxDim];
  hyperplane_basis(u, g.d, basis);

  const double Rmax = 2.0 * g.V * std::sqrt(static_cast<double>(g.d));
  const double R2 = Rmax * Rmax;
  const int M = static_cast<int>(std::ceil(2.0 * Rmax / g.h));
  const double c0 = -0.5 * static_cast<double>(M - 1) * g.h;  // symmetric midpoint lattice

  const int m = g.d - 1;
  Kahan acc;
  int idx[kMaxDim] = {0, 0, 0, 0};
  while (true) {
    double w2 = 0.0;
    double c[kMaxDim];
    for (int j = 0; j < m; ++j) {
      c[j] = c0 + idx[j] * g.h;
      w2 += c[j] * c[j];
    }
    if (w2 <= R2) {
      Vec x = v;
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < g.d; ++k) x[k] += c[j] * basis[j][k];
      const double fx = interpolate(f, x);
      if (fx != 0.0) acc.add(fx);
    }
    int k = m - 1;
    while (k >= 0) {
      if (++idx[k] < M) break;
      idx[k] = 0;
      --k;
    }
    if (k < 0) break;
  }
  return acc.value() * std::pow(g.h, m);
}

std::string HyperplaneSampleSpec::describe(const VelocityGrid& g) const {
  const int off = offsets | 1;
  const double S = 0.9 * g.V * std::sqrt(static_cast<double>(g.d));
  std::ostringstream os;
  os << "directions=" << directions << "(spiral) offsets=" << off << " in [-" << S << "," << S
     << "] incl. 0";
  return os.str();
}

double hyperplane_sup(const Distribution& f, const HyperplaneSampleSpec& spec) {
  const VelocityGrid& g = f.grid;
  if (spec.directions < 1 || spec.offsets < 1)
    throw std::invalid_argument("hyperplane_sup: sample counts must be >= 1");
  const int D = spec.directions;
  const int O = spec.offsets | 1;  // odd count so the ladder contains s = 0 exactly
  const double S = 0.9 * g.V * std::sqrt(static_cast<double>(g.d));

  double best = 0.0;
  for (int kdir = 0; kdir < D; ++kdir) {
    Vec u = zero_vec(g.d);
    if (g.d == 3) {
      // Fibonacci spiral: near-uniform, reproducible.
      constexpr double kGolden = 2.399963229728653;  // pi (3 - sqrt 5)
      const double z = 1.0 - (2.0 * kdir + 1.0) / D;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = kGolden * kdir;
      u = vec3(r * std::cos(phi), r * std::sin(phi), z);
    } else {
      // Deterministic low-order ladder of axis/diagonal directions for d = 4.
      Vec w = zero_vec(g.d);
      for (int k = 0; k < g.d; ++k)
        w[k] = std::cos(1.0 + 0.7318 * (kdir + 1) * (k + 1));
      const double n = norm(w);
      for (int k = 0; k < g.d; ++k) u[k] = w[k] / n;
    }
    for (int j = 0; j < O; ++j) {
      const double s = (O == 1) ? 0.0 : S * (2.0 * j / (O - 1) - 1.0);
      Vec base = zero_vec(g.d);
      for (int k = 0; k < g.d; ++k) base[k] = s * u[k];
      best = std::max(best, hyperplane_integral(f, base, u));
    }
  }
  return best;
}

MomentsRecord moments_record(const Distribution& f, double gamma, double gamma_R0,
                             int gamma_stride) {
  const VelocityGrid& g = f.grid;
  MomentsRecord r;
  r.m1 = zero_vec(g.d);

  Kahan a0, a2, a2g, aH;
  Kahan a1[kMaxDim];
  const std::size_t total = g.size();
  for (std::size_t i = 0; i < total; ++i) {
    const double fi = f.values[i];
    if (fi > r.linf) r.linf = fi;
    if (fi == 0.0) continue;
    const Vec v = g.node(i);
    const double n2 = norm2(v);
    a0.add(fi);
    for (int k = 0; k < g.d; ++k) a1[k].add(v[k] * fi);
    a2.add(n2 * fi);
    a2g.add(((gamma == 1.0) ? n2 * std::sqrt(n2) : std::pow(n2, 0.5 * (2.0 + gamma))) * fi);
    aH.add((1.0 + fi) * std::log1p(fi) - fi * std::log(fi));
  }
  const double cell = std::pow(g.h, g.d);
  r.m0 = a0.value() * cell;
  for (int k = 0; k < g.d; ++k) r.m1[k] = a1[k].value() * cell;
  r.m2 = a2.value() * cell;
  r.m2_plus_gamma = a2g.value() * cell;
  r.entropy = aH.value() * cell;
  r.gamma_conc = gamma_sup(f, gamma_R0, gamma, gamma_stride);
  return r;
}

}  // namespace bnk
