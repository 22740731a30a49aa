#pragma once

#include <array>
#include <numbers>
#include <functional>
#include <string>
#include <vector>

#include "navslip/analysis.hpp"
#include "navslip/field.hpp"
#include "navslip/geometry.hpp"

namespace navslip {

// Tangential boundary data u~ sampled on the tangential grid of a wall
// (n1 x n2 nodes, second index fastest).
struct BoundaryData {
  Wall wall = Wall::lower;
  double t = 0.0;
  int n1 = 0, n2 = 0;
  std::vector<double> u1, u2;
};

BoundaryData euler_boundary_data_channel(const VectorField& u0, const FrictionTensor& A, Wall wall,
                                         double t = 0.0);

// Layer profile phi(xi) = sigma_a(xi) (1 - exp(-xi/sqrt(eps))).
struct LayerProfile {
  double a = 0.0;
  double eps = 0.0;
  double phi(double xi) const;
  double dphi(double xi) const;
};

struct WallValues {
  double u1 = 0.0, u2 = 0.0, div = 0.0;
};

// Pointwise channel corrector from lower/upper wall data at height z.
Vec3 channel_corrector_point(const WallValues& lower, const WallValues& upper, double z, double h,
                             double eps);

struct CorrectorField {
  VectorField theta;
  double epsilon = 0.0;
  double t = 0.0;
  BoundaryData lower, upper;
};

CorrectorField build_corrector_channel(const VectorField& u0, const FrictionPair& A, double epsilon,
                                       double t = 0.0);
// Corrector from boundary data given directly.
CorrectorField build_corrector_channel(const BoundaryData& lower, const BoundaryData& upper,
                                       GridPtr grid, double epsilon);

using EulerProvider = std::function<VectorField(double t)>;

// Central difference of the corrector in time with step dt.
VectorField corrector_time_derivative(const EulerProvider& u0, const FrictionPair& A, double epsilon,
                                      double t, double dt);

// R(theta) = -d theta/dt + eps * Laplacian theta.  Pass nullptr for steady data.
VectorField corrector_residual_R(const CorrectorField& theta, double epsilon,
                                 const VectorField* dtheta_dt);

struct DerivativeSpec {
  int l = 0, k = 0, n = 0;
};
void validate_derivative_spec(const DerivativeSpec& s);

struct ScalingEntry {
  std::string name;
  double target = 0.0;
  std::vector<double> values;
  RateFit fit;
  std::string error;  // set when the series cannot be fitted (e.g. identically zero)
};

struct ScalingTable {
  std::vector<double> eps;
  std::vector<ScalingEntry> entries;
};

struct ScalingOptions {
  double T = 0.25;
  int snapshots = 5;
  bool weighted = false;  // add the zeta-weighted norms
  bool sup = false;       // add the sup-norm table
};

ScalingTable corrector_norm_scalings(const EulerProvider& u0, const FrictionPair& A,
                                     const std::vector<double>& eps_list,
                                     const std::vector<DerivativeSpec>& specs,
                                     const ScalingOptions& opt);

// Linear corrector dump: one row per node with columns i,j,k,theta1,theta2,theta3.
void write_corrector_csv(const CorrectorField& c, const std::string& path);

// ---------------- torus ----------------

struct TorusGrid {
  TorusChart chart;
  int N1 = 0, N2 = 0, N3 = 0;
  std::vector<double> xi;
  std::vector<double> xi_weights;

  double d1() const { return 2.0 * std::numbers::pi / N1; }
  double d2() const { return 2.0 * std::numbers::pi / N2; }
  double eta1(int i) const { return d1() * i; }
  double eta2(int j) const { return d2() * j; }
  std::size_t size() const { return static_cast<std::size_t>(N1) * N2 * N3; }
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * N2 + j) * N3 + k;
  }
};

// xi3 in [0,3a], clustered towards xi3=0.
TorusGrid make_torus_grid(const TorusChart& chart, int N1, int N2, int N3, double clustering);

using SurfaceFn = std::function<std::array<double, 2>(double eta1, double eta2)>;

// Boundary input: tangential velocity and tangential strain [S(u)n]_tan, both in
// the unit principal frame.
struct TorusBoundaryInput {
  SurfaceFn u_tan;
  SurfaceFn strain_n;
};

struct TorusCorrectorOptions {
  bool flat_limit = false;  // set both curvatures to zero
};

struct TorusCorrectorField {
  TorusGrid grid;
  double epsilon = 0.0;
  // components along e1, e2 and the inward normal
  std::array<std::vector<double>, 3> theta;
  std::array<std::vector<double>, 2> u_tilde;
  std::vector<double> div_tan;
  std::array<std::vector<double>, 2> E_error;
};

TorusCorrectorField build_corrector_torus(const TorusBoundaryInput& in, const FrictionTensor& A,
                                          double epsilon, const TorusGrid& grid,
                                          const TorusCorrectorOptions& opt = {});

// Torus kernel at a single point.
Vec3 torus_corrector_point(double u1, double u2, double div, double kappa1, double kappa2,
                           double xi3, double a, double eps);

// Discrete metric divergence of theta (max norm over nodes).
double torus_metric_divergence(const TorusCorrectorField& c);
// max_i,nodes |d theta_i/d xi3 (xi3=0) - (u~_i - sqrt(eps) E_i)| with a
// `points`-point one-sided stencil.
double torus_neumann_residual(const TorusCorrectorField& c, int points);
// L2 norms in the metric volume element.
double torus_norm_L2(const TorusCorrectorField& c, const std::vector<double>& f);

}  // namespace navslip
