#include "navslip/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "navslip/errors.hpp"

namespace navslip {

namespace {

double bump_e(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
double bump_e_d1(double t) { return t > 0.0 ? std::exp(-1.0 / t) / (t * t) : 0.0; }

void check_finite(const Mat2& m) {
  if (!std::isfinite(m.a11) || !std::isfinite(m.a12) || !std::isfinite(m.a21) ||
      !std::isfinite(m.a22)) {
    throw ConfigError("friction tensor has non-finite entries");
  }
}

}  // namespace

const char* wall_name(Wall w) {
  switch (w) {
    case Wall::lower: return "lower";
    case Wall::upper: return "upper";
    case Wall::torus: return "torus";
  }
  return "?";
}

double Mat2::norm2() const {
  // sqrt of the largest eigenvalue of M^T M
  const double p = a11 * a11 + a21 * a21;
  const double q = a12 * a12 + a22 * a22;
  const double s = a11 * a12 + a21 * a22;
  const double tr = p + q;
  const double disc = std::sqrt(std::max(0.0, 0.25 * (p - q) * (p - q) + s * s));
  return std::sqrt(std::max(0.0, 0.5 * tr + disc));
}

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double e0 = bump_e(t), e1 = bump_e(1.0 - t);
  return e0 / (e0 + e1);
}

double smooth_step_d1(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double e0 = bump_e(t), e1 = bump_e(1.0 - t);
  const double d0 = bump_e_d1(t), d1 = bump_e_d1(1.0 - t);
  const double s = e0 + e1;
  return (d0 * e1 + e0 * d1) / (s * s);
}

double cutoff_profile(double xi, double a) { return smooth_step((2.0 * a - xi) / a); }

double cutoff_profile_d1(double xi, double a) {
  return -smooth_step_d1((2.0 * a - xi) / a) / a;
}

double cutoff_sigma(double z, Wall wall, double h) {
  if (!(z >= 0.0 && z <= h)) {
    throw DomainError("cutoff_sigma: z=" + std::to_string(z) + " outside [0,h]");
  }
  const double a = h / 8.0;
  switch (wall) {
    case Wall::lower: return cutoff_profile(z, a);
    case Wall::upper: return cutoff_profile(h - z, a);
    default: throw DomainError("cutoff_sigma: channel walls only");
  }
}

double weight_zeta(double z, double h) {
  if (!(z >= 0.0 && z <= h)) {
    throw DomainError("weight_zeta: z=" + std::to_string(z) + " outside [0,h]");
  }
  if (z <= 0.25 * h) return z;
  if (z >= 0.75 * h) return h - z;
  return 0.25 * h;
}

bool ChannelGrid::same_shape(const ChannelGrid& o) const {
  return Nx == o.Nx && Ny == o.Ny && Nz == o.Nz && L1 == o.L1 && L2 == o.L2 && h == o.h &&
         z_nodes == o.z_nodes;
}

ChannelGrid make_channel_grid(double L1, double L2, double h, int Nx, int Ny, int Nz,
                              double clustering) {
  if (!(L1 > 0.0) || !(L2 > 0.0) || !(h > 0.0)) {
    throw ConfigError("channel dimensions must be positive");
  }
  if (Nx < 4 || Ny < 4 || Nx % 2 != 0 || Ny % 2 != 0) {
    throw ConfigError("Nx and Ny must be even and >= 4");
  }
  if (Nz < 9) throw ConfigError("Nz must be >= 9");
  if (!(clustering >= 0.0) || !std::isfinite(clustering)) {
    throw ConfigError("clustering must be >= 0");
  }
  ChannelGrid g;
  g.L1 = L1;
  g.L2 = L2;
  g.h = h;
  g.Nx = Nx;
  g.Ny = Ny;
  g.Nz = Nz;
  g.clustering = clustering;
  g.z_nodes.resize(Nz);
  const double c = clustering;
  for (int k = 0; k < Nz; ++k) {
    const double s = static_cast<double>(k) / (Nz - 1);
    if (c == 0.0) {
      g.z_nodes[k] = h * s;
    } else {
      g.z_nodes[k] = 0.5 * h * (1.0 + std::tanh(c * (2.0 * s - 1.0)) / std::tanh(c));
    }
  }
  g.z_nodes.front() = 0.0;
  g.z_nodes.back() = h;
  // symmetrize so both walls see identical spacing
  for (int k = 0; k < Nz / 2; ++k) {
    const double zk = 0.5 * (g.z_nodes[k] + (h - g.z_nodes[Nz - 1 - k]));
    g.z_nodes[k] = zk;
    g.z_nodes[Nz - 1 - k] = h - zk;
  }
  if (Nz % 2 == 1) g.z_nodes[Nz / 2] = 0.5 * h;
  for (int k = 1; k < Nz; ++k) {
    if (!(g.z_nodes[k] > g.z_nodes[k - 1])) {
      throw ConfigError("clustering too strong: z nodes not strictly increasing");
    }
  }
  g.z_weights.assign(Nz, 0.0);
  for (int k = 0; k + 1 < Nz; ++k) {
    const double dz = g.z_nodes[k + 1] - g.z_nodes[k];
    g.z_weights[k] += 0.5 * dz;
    g.z_weights[k + 1] += 0.5 * dz;
  }
  return g;
}

double clustering_for_layer(double h, int Nz, double width, int nodes) {
  if (nodes >= Nz / 2) throw ConfigError("clustering_for_layer: too many layer nodes");
  auto z_at = [&](double c) {
    const double s = static_cast<double>(nodes) / (Nz - 1);
    if (c == 0.0) return h * s;
    return 0.5 * h * (1.0 + std::tanh(c * (2.0 * s - 1.0)) / std::tanh(c));
  };
  if (z_at(0.0) <= width) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (z_at(hi) > width) {
    hi *= 2.0;
    if (hi > 64.0) throw ConfigError("clustering_for_layer: layer unresolvable with Nz nodes");
  }
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (z_at(mid) > width ? lo : hi) = mid;
  }
  return hi;
}

FrictionTensor FrictionTensor::constant(Wall wall, const Mat2& m) {
  check_finite(m);
  FrictionTensor t;
  t.wall_ = wall;
  t.constant_ = true;
  t.value_ = m;
  t.alpha_bar_ = m.norm2();
  return t;
}

FrictionTensor FrictionTensor::field(Wall wall, std::function<Mat2(double, double)> fn,
                                     double period1, double period2, int samples) {
  if (!fn) throw ConfigError("friction tensor field: empty callable");
  FrictionTensor t;
  t.wall_ = wall;
  t.constant_ = false;
  t.fn_ = std::move(fn);
  double bar = 0.0;
  for (int i = 0; i < samples; ++i) {
    for (int j = 0; j < samples; ++j) {
      const Mat2 m = t.fn_(period1 * i / samples, period2 * j / samples);
      check_finite(m);
      bar = std::max(bar, m.norm2());
    }
  }
  t.value_ = t.fn_(0.0, 0.0);
  t.alpha_bar_ = bar;
  return t;
}

Mat2 FrictionTensor::at(double s1, double s2) const {
  return constant_ ? value_ : fn_(s1, s2);
}

double FrictionPair::alpha_bar() const { return std::max(lower.alpha_bar(), upper.alpha_bar()); }

TorusChart::TorusChart(double R_, double r_, double a_) : R(R_), r(r_), a(a_) {
  if (!(r > 0.0) || !(R > r)) throw GeometryError("torus needs 0 < r < R");
  if (!(a > 0.0)) throw GeometryError("torus collar width a must be positive");
  if (!(3.0 * a < r)) {
    throw GeometryError("torus collar 3a must be smaller than r (metric degenerates)");
  }
}

namespace {
void check_xi(const TorusChart& c, double xi3) {
  if (!(xi3 >= 0.0 && xi3 <= 3.0 * c.a * (1.0 + 1e-14))) {
    throw DomainError("torus: xi3=" + std::to_string(xi3) + " outside [0,3a]");
  }
}
}  // namespace

Vec3 torus_outer_normal(double eta1, double eta2) {
  return {std::cos(eta1) * std::cos(eta2), std::cos(eta1) * std::sin(eta2), std::sin(eta1)};
}

Vec3 torus_e1(double eta1, double eta2) {
  return {-std::sin(eta1) * std::cos(eta2), -std::sin(eta1) * std::sin(eta2), std::cos(eta1)};
}

Vec3 torus_e2(double /*eta1*/, double eta2) { return {-std::sin(eta2), std::cos(eta2), 0.0}; }

Vec3 torus_point(const TorusChart& c, double eta1, double eta2, double xi3) {
  check_xi(c, xi3);
  const double rho = c.R + c.r * std::cos(eta1);
  const Vec3 n = torus_outer_normal(eta1, eta2);
  return {rho * std::cos(eta2) - xi3 * n[0], rho * std::sin(eta2) - xi3 * n[1],
          c.r * std::sin(eta1) - xi3 * n[2]};
}

std::array<double, 2> torus_curvatures(const TorusChart& c, double eta1) {
  return {1.0 / c.r, std::cos(eta1) / (c.R + c.r * std::cos(eta1))};
}

TorusMetric torus_metric(const TorusChart& c, double eta1, double /*eta2*/, double xi3) {
  check_xi(c, xi3);
  const auto k = torus_curvatures(c, eta1);
  const double rho = c.R + c.r * std::cos(eta1);
  const double f1 = 1.0 - k[0] * xi3, f2 = 1.0 - k[1] * xi3;
  if (!(f1 > 0.0) || !(f2 > 0.0)) throw GeometryError("torus metric determinant <= 0");
  TorusMetric m;
  m.q11 = f1 * f1 * c.r * c.r;
  m.q22 = f2 * f2 * rho * rho;
  m.q33 = 1.0;
  m.sqrt_q = f1 * f2 * c.r * rho;
  return m;
}

Mat2 torus_shape_operator(const TorusChart& c, double eta1, double /*eta2*/) {
  const auto k = torus_curvatures(c, eta1);
  return {k[0], 0.0, 0.0, k[1]};
}

}  // namespace navslip
