#pragma once

#include <vector>

namespace navslip {

// Finite-difference weights for the m-th derivative at x0 using nodes x[0..n).
std::vector<double> fornberg_weights(double x0, const double* x, int n, int m);

// Banded finite-difference operator acting on a line of nodal values.
class FdOperator {
 public:
  FdOperator() = default;

  // Centered `width`-point stencils in the interior, one-sided stencils of
  // `boundary_width` points in the first/last rows that cannot be centered.
  static FdOperator lagrange(const std::vector<double>& x, int deriv, int width,
                             int boundary_width);
  // First derivative whose norm matrix is the trapezoid rule:
  // interior (u[k+1]-u[k-1])/(x[k+1]-x[k-1]), boundary (u1-u0)/(x1-x0).
  static FdOperator sbp_first(const std::vector<double>& x);

  int size() const { return static_cast<int>(start_.size()); }
  int row_start(int k) const { return start_[k]; }
  const std::vector<double>& row(int k) const { return w_[k]; }

  void apply(const double* in, double* out) const;
  double apply_row(int k, const double* in) const;

 private:
  std::vector<int> start_;
  std::vector<std::vector<double>> w_;
};

// One-sided first derivative at x[0] (lower) or x[n-1] (upper) with `points` nodes.
double wall_derivative(const std::vector<double>& x, const double* f, bool lower, int points);
std::vector<double> wall_derivative_weights(const std::vector<double>& x, bool lower, int points);

// Trapezoid integral of samples f on nodes x.
double trapezoid(const std::vector<double>& x, const std::vector<double>& f);

// Periodic 4th-order centered first derivative of a uniformly sampled
// function with spacing d.
double periodic_d1_o4(const double* f, int n, int i, double d, int stride = 1);

// Cubic Lagrange interpolation of (x,f) at the point t.
double interp_cubic(const std::vector<double>& x, const std::vector<double>& f, double t);

}  // namespace navslip
