#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "navslip/geometry.hpp"
#include "navslip/spectral.hpp"
#include "navslip/stencils.hpp"

using namespace navslip;
using std::numbers::pi;

TEST(Fornberg, CentralWeights) {
  const double x[3] = {-1, 0, 1};
  auto w1 = fornberg_weights(0, x, 3, 1);
  EXPECT_NEAR(w1[0], -0.5, 1e-15);
  EXPECT_NEAR(w1[1], 0.0, 1e-15);
  EXPECT_NEAR(w1[2], 0.5, 1e-15);
  auto w2 = fornberg_weights(0, x, 3, 2);
  EXPECT_NEAR(w2[0], 1.0, 1e-15);
  EXPECT_NEAR(w2[1], -2.0, 1e-15);
  EXPECT_NEAR(w2[2], 1.0, 1e-15);
}

TEST(Fornberg, ExactOnPolynomials) {
  const double x[4] = {0.0, 0.1, 0.35, 0.5};
  auto w = fornberg_weights(0.0, x, 4, 1);
  double s = 0;
  for (int i = 0; i < 4; ++i) s += w[i] * std::pow(x[i], 3);
  EXPECT_NEAR(s, 0.0, 1e-12);
  s = 0;
  for (int i = 0; i < 4; ++i) s += w[i] * (2 + 3 * x[i] - x[i] * x[i]);
  EXPECT_NEAR(s, 3.0, 1e-12);
}

TEST(FdOperator, SecondOrderOnClusteredGrid) {
  double err[2];
  for (int r = 0; r < 2; ++r) {
    const int n = r == 0 ? 65 : 129;
    const auto g = make_channel_grid(1, 1, 1, 4, 4, n, 1.5);
    const auto D = FdOperator::lagrange(g.z_nodes, 1, 3, 3);
    std::vector<double> f(n), d(n);
    for (int k = 0; k < n; ++k) f[k] = std::sin(3 * g.z_nodes[k]);
    D.apply(f.data(), d.data());
    err[r] = 0;
    for (int k = 0; k < n; ++k) err[r] = std::max(err[r], std::abs(d[k] - 3 * std::cos(3 * g.z_nodes[k])));
  }
  EXPECT_GT(err[0] / err[1], 3.5);
}

TEST(FdOperator, SbpFirstIsSummationByParts) {
  const auto g = make_channel_grid(1, 1, 1, 4, 4, 33, 1.0);
  const auto D = FdOperator::sbp_first(g.z_nodes);
  const int n = 33;
  std::vector<double> u(n), v(n), du(n), dv(n);
  for (int k = 0; k < n; ++k) {
    u[k] = std::cos(2 * g.z_nodes[k]) + g.z_nodes[k];
    v[k] = std::exp(g.z_nodes[k]);
  }
  D.apply(u.data(), du.data());
  D.apply(v.data(), dv.data());
  double lhs = 0;
  for (int k = 0; k < n; ++k) lhs += g.z_weights[k] * (du[k] * v[k] + u[k] * dv[k]);
  EXPECT_NEAR(lhs, u[n - 1] * v[n - 1] - u[0] * v[0], 1e-12);
}

TEST(WallDerivative, ThreePointThirdOrder) {
  double err[2];
  for (int r = 0; r < 2; ++r) {
    const int n = r == 0 ? 33 : 65;
    const auto g = make_channel_grid(1, 1, 1, 4, 4, n, 0.0);
    std::vector<double> f(n);
    for (int k = 0; k < n; ++k) f[k] = std::exp(2 * g.z_nodes[k]);
    err[r] = std::abs(wall_derivative(g.z_nodes, f.data(), false, 3) - 2 * std::exp(2.0));
  }
  EXPECT_GT(err[0] / err[1], 3.5);
}

TEST(Quadrature, TrapezoidAndInterp) {
  std::vector<double> x(101), f(101);
  for (int k = 0; k <= 100; ++k) {
    x[k] = k / 100.0;
    f[k] = 2 * x[k] + 1;
  }
  EXPECT_NEAR(trapezoid(x, f), 2.0, 1e-14);
  for (auto& v : f) v = v * v;
  EXPECT_NEAR(interp_cubic(x, f, 0.123), std::pow(2 * 0.123 + 1, 2), 1e-13);
}

TEST(Periodic, FourthOrderDerivative) {
  double err[2];
  for (int r = 0; r < 2; ++r) {
    const int n = r == 0 ? 32 : 64;
    std::vector<double> f(n);
    const double d = 2 * pi / n;
    for (int i = 0; i < n; ++i) f[i] = std::sin(i * d);
    err[r] = 0;
    for (int i = 0; i < n; ++i) err[r] = std::max(err[r], std::abs(periodic_d1_o4(f.data(), n, i, d) - std::cos(i * d)));
  }
  EXPECT_GT(err[0] / err[1], 14.0);
}

TEST(Fourier2D, RoundTripAndDerivatives) {
  const int Nx = 16, Ny = 8, nz = 3;
  const double L1 = 2 * pi, L2 = 1.0;
  Fourier2D F(Nx, Ny, nz, L1, L2);
  std::vector<double> u(F.physical_size()), back(F.physical_size()), dx(F.physical_size()),
      lap(F.physical_size());
  for (int i = 0; i < Nx; ++i)
    for (int j = 0; j < Ny; ++j)
      for (int k = 0; k < nz; ++k) {
        const double x = L1 * i / Nx, y = L2 * j / Ny;
        u[(i * Ny + j) * nz + k] = (k + 1) * std::sin(2 * x) * std::cos(2 * pi * y);
      }
  std::vector<cplx> s(F.spectral_size());
  F.forward(u.data(), s.data());
  F.backward(s.data(), back.data());
  F.derivative(u.data(), dx.data(), 1, 0);
  F.laplacian(u.data(), lap.data());
  const double lam = 4 + 4 * pi * pi;
  for (int i = 0; i < Nx; ++i)
    for (int j = 0; j < Ny; ++j)
      for (int k = 0; k < nz; ++k) {
        const std::size_t q = (i * Ny + j) * nz + k;
        const double x = L1 * i / Nx, y = L2 * j / Ny;
        EXPECT_NEAR(back[q], u[q], 1e-13);
        EXPECT_NEAR(dx[q], 2 * (k + 1) * std::cos(2 * x) * std::cos(2 * pi * y), 1e-12);
        EXPECT_NEAR(lap[q], -lam * u[q], 1e-11);
      }
  EXPECT_EQ(F.kx_odd(Nx / 2), 0.0);
}
