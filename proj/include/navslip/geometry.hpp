#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

namespace navslip {

enum class Wall { lower, upper, torus };

const char* wall_name(Wall w);

// Small dense 2x2 matrix, row major: {a11, a12, a21, a22}.
struct Mat2 {
  double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;

  static Mat2 identity(double s = 1.0) { return {s, 0.0, 0.0, s}; }
  std::array<double, 2> apply(double v1, double v2) const {
    return {a11 * v1 + a12 * v2, a21 * v1 + a22 * v2};
  }
  bool is_zero() const { return a11 == 0.0 && a12 == 0.0 && a21 == 0.0 && a22 == 0.0; }
  // Largest singular value.
  double norm2() const;
};

// C-infinity step: 0 for t <= 0, 1 for t >= 1, smooth monotone in between.
double smooth_step(double t);
double smooth_step_d1(double t);

// Cutoff with plateau width `a`: 1 on [0,a], 0 on [2a,inf).  xi is the
// distance to the wall.
double cutoff_profile(double xi, double a);
double cutoff_profile_d1(double xi, double a);

// Channel cutoffs: sigma_L = 1 on [0,h/8], 0 on [h/4,h]; sigma_R(z) = sigma_L(h-z).
double cutoff_sigma(double z, Wall wall, double h);
double weight_zeta(double z, double h);

struct ChannelGrid {
  double L1 = 0.0, L2 = 0.0, h = 0.0;
  int Nx = 0, Ny = 0, Nz = 0;
  double clustering = 0.0;
  std::vector<double> z_nodes;
  std::vector<double> z_weights;

  double dx() const { return L1 / Nx; }
  double dy() const { return L2 / Ny; }
  double x(int i) const { return dx() * i; }
  double y(int j) const { return dy() * j; }
  double volume() const { return L1 * L2 * h; }
  std::size_t size() const { return static_cast<std::size_t>(Nx) * Ny * Nz; }
  std::size_t plane() const { return static_cast<std::size_t>(Nx) * Ny; }
  // z is the fastest index.
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * Ny + j) * Nz + k;
  }
  bool same_shape(const ChannelGrid& o) const;
};

ChannelGrid make_channel_grid(double L1, double L2, double h, int Nx, int Ny, int Nz,
                              double clustering);

// Clustering parameter giving at least `nodes` grid points inside [0, width]
// for a tanh grid with Nz points.
double clustering_for_layer(double h, int Nz, double width, int nodes);

// Friction tensor of one wall.  Either constant or sampled from a callable
// of the tangential coordinates.
class FrictionTensor {
 public:
  FrictionTensor() = default;
  static FrictionTensor constant(Wall wall, const Mat2& m);
  static FrictionTensor field(Wall wall, std::function<Mat2(double, double)> fn,
                              double period1, double period2, int samples = 64);

  Wall wall() const { return wall_; }
  bool is_constant() const { return constant_; }
  Mat2 at(double s1, double s2) const;
  const Mat2& constant_value() const { return value_; }
  double alpha_bar() const { return alpha_bar_; }

 private:
  Wall wall_ = Wall::lower;
  bool constant_ = true;
  Mat2 value_{};
  std::function<Mat2(double, double)> fn_;
  double alpha_bar_ = 0.0;
};

struct FrictionPair {
  FrictionTensor lower = FrictionTensor::constant(Wall::lower, Mat2{});
  FrictionTensor upper = FrictionTensor::constant(Wall::upper, Mat2{});
  double alpha_bar() const;
};

using Vec3 = std::array<double, 3>;

// Solid torus, poloidal angle eta1, toroidal angle eta2, inward distance xi3.
struct TorusChart {
  double R = 2.0, r = 1.0, a = 0.25;
  TorusChart() = default;
  TorusChart(double R_, double r_, double a_);
};

struct TorusMetric {
  double q11 = 0.0, q22 = 0.0, q33 = 1.0, sqrt_q = 0.0;
};

Vec3 torus_point(const TorusChart& c, double eta1, double eta2, double xi3);
Vec3 torus_outer_normal(double eta1, double eta2);
// Unit vectors along d/deta1 and d/deta2.
Vec3 torus_e1(double eta1, double eta2);
Vec3 torus_e2(double eta1, double eta2);
std::array<double, 2> torus_curvatures(const TorusChart& c, double eta1);
TorusMetric torus_metric(const TorusChart& c, double eta1, double eta2, double xi3);
Mat2 torus_shape_operator(const TorusChart& c, double eta1, double eta2);

}  // namespace navslip
