#pragma once

#include <array>
#include <string>
#include <vector>

#include "navslip/field.hpp"
#include "navslip/geometry.hpp"

namespace navslip {

enum class RegionKind { whole, boundary_strip, interior };

struct Region {
  RegionKind kind = RegionKind::whole;
  double a = 0.0;

  static Region whole() { return {}; }
  static Region strip(double a) { return {RegionKind::boundary_strip, a}; }
  static Region interior(double a) { return {RegionKind::interior, a}; }
  std::string label() const;
};

enum class TimeMode { instant, sup_over_time, L2_over_time };
const char* time_mode_name(TimeMode m);

struct NormReport {
  std::string name;
  Region region;
  double value = 0.0;
  double epsilon = 0.0;
  TimeMode t_mode = TimeMode::instant;
};

struct RateFit {
  std::vector<double> eps_values;
  std::vector<double> norm_values;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<std::string> notes;
};

// ---- quadrature and derivatives on the channel grid ----

// Integral of a nodal scalar over the channel (rectangle x trapezoid).
double integrate(const ChannelGrid& g, const std::vector<double>& f);
// Integral over the wall plane z=z_k of a nodal scalar.
double integrate_plane(const ChannelGrid& g, const std::vector<double>& f, int k);

// z-derivative of order m with 2nd-order Lagrange stencils.
void ddz(const ChannelGrid& g, const std::vector<double>& in, std::vector<double>& out, int m = 1);

// grad[d][c] = d f_c / d x_d
std::array<VectorField, 3> gradient(const VectorField& f);
std::vector<double> divergence(const VectorField& f);

// ---- norms ----
double norm_L2(const ChannelGrid& g, const std::vector<double>& f, Region r = Region::whole());
double norm_L2(const VectorField& f, Region r = Region::whole());
double norm_grad(const VectorField& f, Region r = Region::whole());
double norm_H1(const VectorField& f, Region r = Region::whole());
double norm_Linf_region(const VectorField& f, Region r = Region::whole());
double norm_Linf_region(const ChannelGrid& g, const std::vector<double>& f,
                        Region r = Region::whole());

// Conormal Sobolev norm with generators {d/dx, d/dy, z(h-z)/h d/dz}.
double conormal_norm(const ChannelGrid& g, const std::vector<double>& f, int m);
double conormal_norm(const VectorField& f, int m);
// True if the highest conormal derivatives are poorly resolved on the grid.
bool conormal_accuracy_warning(const VectorField& f, int m);

// Time norms over snapshots: max and trapezoid-in-time L2.
double sup_over_time(const std::vector<double>& values);
double l2_over_time(const std::vector<double>& times, const std::vector<double>& values);

RateFit fit_rate(const std::vector<double>& eps, const std::vector<double>& values);

// ---- inequality checkers ----

struct AgmonResult {
  double lhs_boundary = 0.0, rhs_boundary = 0.0;
  double lhs_interior = 0.0, rhs_interior = 0.0;
  double ratio_boundary = 0.0, ratio_interior = 0.0;
};
AgmonResult agmon_anisotropic_check(const VectorField& f, int m, double a);

// Samples of a scalar on a uniform tensor grid over a box in 1, 2 or 3 dimensions.
// Index order: first coordinate slowest.
struct BoxField {
  int dim = 1;
  std::array<int, 3> n{1, 1, 1};
  std::array<double, 3> len{1.0, 1.0, 1.0};
  std::vector<double> v;

  static BoxField sample(int dim, std::array<int, 3> n, std::array<double, 3> len,
                         const std::function<double(double, double, double)>& fn);
  std::size_t size() const { return v.size(); }
};
double box_norm_L2(const BoxField& f);
double box_norm_Hk(const BoxField& f, int k);
double lemma_agmon_check(const BoxField& f, int k);

struct Lemma1Result {
  double lhs = 0.0, rhs = 0.0, gap = 0.0;
};
Lemma1Result lemma1_ibp_check(const VectorField& f, const VectorField& g);

struct TraceResult {
  double lhs = 0.0, rhs = 0.0, ratio = 0.0;
  bool excluded = false;
  std::string note;
};
TraceResult trace_inequality_check(const VectorField& u);

// Residual of 2([S(u)n]_tan + A u) - (curl u x n)_tan on torus surface
// samples, derivatives by finite differences of step `delta` in the chart.
using CartesianFn = std::function<Vec3(const Vec3&)>;
double shape_bc_equivalence_check(const CartesianFn& u, const TorusChart& chart, int n1, int n2,
                                  double delta);

// Max of |f(N)| / |f(first member)| over a family of ratios.
double family_growth(const std::vector<double>& ratios);

}  // namespace navslip
