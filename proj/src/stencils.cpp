#include "navslip/stencils.hpp"

#include <algorithm>
#include <cmath>

#include "navslip/errors.hpp"

namespace navslip {

std::vector<double> fornberg_weights(double x0, const double* x, int n, int m) {
  if (n <= m) throw ConfigError("fornberg_weights: need more nodes than derivative order");
  // c[j][k]: weight of node j for derivative k
  std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0;
  double c4 = x[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        }
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int j = 0; j < n; ++j) w[j] = c[j][m];
  return w;
}

FdOperator FdOperator::lagrange(const std::vector<double>& x, int deriv, int width,
                                int boundary_width) {
  const int n = static_cast<int>(x.size());
  if (width > n || boundary_width > n) throw ConfigError("FdOperator: stencil wider than grid");
  FdOperator op;
  op.start_.resize(n);
  op.w_.resize(n);
  const int half = width / 2;
  for (int k = 0; k < n; ++k) {
    int s = k - half;
    int w = width;
    if (s < 0 || s + width > n) {
      w = boundary_width;
      s = (s < 0) ? 0 : n - w;
    }
    op.start_[k] = s;
    op.w_[k] = fornberg_weights(x[k], x.data() + s, w, deriv);
  }
  return op;
}

FdOperator FdOperator::sbp_first(const std::vector<double>& x) {
  const int n = static_cast<int>(x.size());
  if (n < 3) throw ConfigError("sbp_first: need >= 3 nodes");
  FdOperator op;
  op.start_.resize(n);
  op.w_.resize(n);
  const double d0 = x[1] - x[0];
  op.start_[0] = 0;
  op.w_[0] = {-1.0 / d0, 1.0 / d0};
  for (int k = 1; k + 1 < n; ++k) {
    const double d = x[k + 1] - x[k - 1];
    op.start_[k] = k - 1;
    op.w_[k] = {-1.0 / d, 0.0, 1.0 / d};
  }
  const double dn = x[n - 1] - x[n - 2];
  op.start_[n - 1] = n - 2;
  op.w_[n - 1] = {-1.0 / dn, 1.0 / dn};
  return op;
}

double FdOperator::apply_row(int k, const double* in) const {
  const auto& w = w_[k];
  const double* p = in + start_[k];
  double s = 0.0;
  for (std::size_t q = 0; q < w.size(); ++q) s += w[q] * p[q];
  return s;
}

void FdOperator::apply(const double* in, double* out) const {
  const int n = size();
  for (int k = 0; k < n; ++k) out[k] = apply_row(k, in);
}

std::vector<double> wall_derivative_weights(const std::vector<double>& x, bool lower,
                                            int points) {
  const int n = static_cast<int>(x.size());
  if (points > n) throw ConfigError("wall_derivative: grid too small");
  if (lower) return fornberg_weights(x[0], x.data(), points, 1);
  return fornberg_weights(x[n - 1], x.data() + n - points, points, 1);
}

double wall_derivative(const std::vector<double>& x, const double* f, bool lower, int points) {
  const auto w = wall_derivative_weights(x, lower, points);
  const int n = static_cast<int>(x.size());
  const double* p = lower ? f : f + n - points;
  double s = 0.0;
  for (int q = 0; q < points; ++q) s += w[q] * p[q];
  return s;
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& f) {
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < x.size(); ++k) s += 0.5 * (x[k + 1] - x[k]) * (f[k] + f[k + 1]);
  return s;
}

double periodic_d1_o4(const double* f, int n, int i, double d, int stride) {
  auto at = [&](int q) { return f[static_cast<std::size_t>(((q % n) + n) % n) * stride]; };
  return (-at(i + 2) + 8.0 * at(i + 1) - 8.0 * at(i - 1) + at(i - 2)) / (12.0 * d);
}

double interp_cubic(const std::vector<double>& x, const std::vector<double>& f, double t) {
  const int n = static_cast<int>(x.size());
  if (n < 4) throw ConfigError("interp_cubic: need >= 4 nodes");
  if (t < x.front() || t > x.back()) throw DomainError("interp_cubic: point outside table");
  int k = static_cast<int>(std::upper_bound(x.begin(), x.end(), t) - x.begin()) - 1;
  int s = std::clamp(k - 1, 0, n - 4);
  double r = 0.0;
  for (int a = 0; a < 4; ++a) {
    double l = 1.0;
    for (int b = 0; b < 4; ++b) {
      if (b != a) l *= (t - x[s + b]) / (x[s + a] - x[s + b]);
    }
    r += l * f[s + a];
  }
  return r;
}

}  // namespace navslip
