#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "navslip/analysis.hpp"
#include "navslip/errors.hpp"

using namespace navslip;
using std::numbers::pi;

namespace {

GridPtr grid(int Nx, int Ny, int Nz, double cl = 0.0) {
  return std::make_shared<const ChannelGrid>(make_channel_grid(1, 1, 1, Nx, Ny, Nz, cl));
}

}  // namespace

TEST(Norms, Basics) {
  const auto g = grid(8, 8, 65);
  const auto c = sample_field(g, [](double, double, double) { return Vec3{-3, 0, 0}; });
  EXPECT_NEAR(norm_L2(c), 3.0, 1e-13);
  EXPECT_NEAR(norm_grad(c), 0.0, 1e-12);
  const auto s = sample_field(g, [](double x, double, double) { return Vec3{std::sin(2 * pi * x), 0, 0}; });
  EXPECT_NEAR(std::pow(norm_L2(s), 2), 0.5, 1e-13);
  const auto z = sample_field(g, [](double, double, double z) { return Vec3{z, 0, 0}; });
  EXPECT_NEAR(norm_grad(z), 1.0, 1e-12);
  EXPECT_NEAR(norm_H1(z), std::sqrt(1.0 + 1.0 / 3.0), 1e-4);
}

TEST(Norms, HomogeneityAndTriangle) {
  const auto g = grid(8, 8, 33, 1.0);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int trial = 0; trial < 5; ++trial) {
    VectorField f(g, FieldRole::generic), h(g, FieldRole::generic);
    for (int c = 0; c < 3; ++c)
      for (std::size_t n = 0; n < g->size(); ++n) {
        f.c[c][n] = U(rng);
        h.c[c][n] = U(rng);
      }
    EXPECT_NEAR(norm_L2(-2.0 * f), 2 * norm_L2(f), 1e-12);
    EXPECT_NEAR(norm_H1(3.0 * f), 3 * norm_H1(f), 1e-9 * norm_H1(f));
    EXPECT_LE(norm_L2(f + h), norm_L2(f) + norm_L2(h) + 1e-12);
    EXPECT_LE(norm_Linf_region(f + h), norm_Linf_region(f) + norm_Linf_region(h) + 1e-12);
  }
}

TEST(Norms, RegionsPartitionTheChannel) {
  const auto g = grid(4, 4, 129);
  const auto f = sample_field(g, [](double, double, double z) { return Vec3{1 + z, 0, 0}; });
  const double a = 1.0 / 8;
  const double s = norm_L2(f, Region::strip(a)), i = norm_L2(f, Region::interior(a));
  EXPECT_NEAR(s * s + i * i, std::pow(norm_L2(f), 2), 1e-3);
  EXPECT_NEAR(norm_Linf_region(f, Region::strip(a)), 2.0, 1e-15);
  EXPECT_NEAR(norm_Linf_region(f, Region::interior(a)), 1.875, 1e-2);
}

TEST(Conormal, Properties) {
  const auto g = grid(8, 8, 129);
  const auto f = sample_field(g, [](double x, double, double z) { return Vec3{std::cos(2 * pi * x) * z * (1 - z), 0, 0}; });
  EXPECT_NEAR(conormal_norm(f, 0), norm_L2(f), 1e-14);
  double prev = 0;
  for (int m = 0; m <= 3; ++m) {
    const double v = conormal_norm(f, m);
    EXPECT_GE(v, prev);
    prev = v;
  }
  // z-independent data: only tangential generators contribute
  const auto t = sample_field(g, [](double x, double, double) { return Vec3{std::sin(2 * pi * x), 0, 0}; });
  const double k = 2 * pi;
  EXPECT_NEAR(conormal_norm(t, 1), std::sqrt(0.5 + 0.5 * k * k), 1e-10);
}

TEST(TimeNorms, SupAndL2) {
  EXPECT_EQ(sup_over_time({1, 3, 2}), 3.0);
  EXPECT_NEAR(l2_over_time({0, 1, 2}, {2, 2, 2}), std::sqrt(8.0), 1e-14);
}

TEST(FitRate, PowerLawConstantAndErrors) {
  const std::vector<double> eps{1e-2, 1e-3, 1e-4, 1e-5};
  std::vector<double> v;
  for (double e : eps) v.push_back(2 * std::pow(e, 0.75));
  const auto f = fit_rate(eps, v);
  EXPECT_NEAR(f.slope, 0.75, 1e-12);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
  EXPECT_NEAR(fit_rate(eps, {5, 5, 5, 5}).slope, 0.0, 1e-12);
  EXPECT_THROW(fit_rate({1e-2, 1e-3}, {1, 2}), FitError);
  const auto g = fit_rate(eps, {1e-20, v[1], v[2], v[3]});
  EXPECT_FALSE(g.notes.empty());
  EXPECT_THROW(fit_rate(eps, {0, 0, v[2], v[3]}), FitError);
}

TEST(Agmon, OneDimensional) {
  const auto c = BoxField::sample(1, {256, 1, 1}, {2.0, 1, 1}, [](double, double, double) { return 1.5; });
  EXPECT_NEAR(lemma_agmon_check(c, 1), 1.0 / std::sqrt(2.0), 1e-10);
  std::vector<double> r;
  for (int n = 1; n <= 32; n *= 2) {
    const auto s = BoxField::sample(1, {1024, 1, 1}, {2 * pi, 1, 1}, [n](double x, double, double) { return std::sin(n * x); });
    r.push_back(lemma_agmon_check(s, 1));
  }
  EXPECT_LT(family_growth(r), 10.0);
  const auto z = BoxField::sample(1, {64, 1, 1}, {1, 1, 1}, [](double, double, double) { return 0.0; });
  EXPECT_THROW(lemma_agmon_check(z, 1), InputError);
  EXPECT_THROW(lemma_agmon_check(c, 0), ConfigError);
}

TEST(Agmon, AnisotropicScalingAndLayer) {
  const auto g = grid(8, 8, 257, 2.0);
  auto layer = [&](double d) {
    return sample_field(g, [d](double x, double, double z) {
      return Vec3{std::exp(-z / d) * (1 + 0.2 * std::cos(2 * pi * x)), 0, 0};
    });
  };
  const auto f = layer(0.03);
  const auto a = agmon_anisotropic_check(f, 3, 0.125);
  const auto b = agmon_anisotropic_check(5.0 * f, 3, 0.125);
  EXPECT_NEAR(a.ratio_boundary, b.ratio_boundary, 1e-10 * a.ratio_boundary);
  EXPECT_NEAR(a.ratio_interior, b.ratio_interior, 1e-10 * a.ratio_interior);
  std::vector<double> r;
  for (double d : {0.1, 0.03, 0.01}) r.push_back(agmon_anisotropic_check(layer(d), 3, 0.125).ratio_boundary);
  EXPECT_LT(family_growth(r), 10.0);
  EXPECT_LE(agmon_anisotropic_check(layer(0.01), 3, 0.125).lhs_interior, 1.2 * std::exp(-12.5) * (1 + 1e-12));
  EXPECT_THROW(agmon_anisotropic_check(f, 2, 0.125), ConfigError);
}

TEST(IntegrationByParts, PolynomialAndZero) {
  const auto g = grid(8, 8, 65);
  const auto f = sample_field(g, [](double, double, double z) { return Vec3{z * z, 0, 0}; });
  const auto one = sample_field(g, [](double, double, double) { return Vec3{1, 0, 0}; });
  const auto r = lemma1_ibp_check(f, one);
  EXPECT_NEAR(r.lhs, -2.0, 1e-10);
  EXPECT_NEAR(r.rhs, -2.0, 1e-10);
  const VectorField z(g, FieldRole::generic);
  const auto r0 = lemma1_ibp_check(z, z);
  EXPECT_EQ(r0.gap, 0.0);
  const auto bad = sample_field(g, [](double x, double, double) { return Vec3{x, 0, 0}; });
  EXPECT_THROW(lemma1_ibp_check(bad, one), InputError);
}

TEST(Trace, Families) {
  const auto g = grid(8, 8, 257);
  const auto s = sample_field(g, [](double, double, double z) { return Vec3{std::sin(pi * z), 0, 0}; });
  EXPECT_NEAR(trace_inequality_check(s).ratio, 0.0, 1e-12);
  const auto c = sample_field(g, [](double, double, double z) { return Vec3{std::cos(pi * z), 0, 0}; });
  const auto t = trace_inequality_check(c);
  // |u|_{L2(walls)} = sqrt(2), |u| = sqrt(1/2), |grad u| = pi sqrt(1/2)
  EXPECT_NEAR(t.lhs, std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(t.ratio, std::sqrt(2.0) / std::sqrt(0.5 * pi), 1e-4);
  const auto k = sample_field(g, [](double, double, double) { return Vec3{2, 0, 0}; });
  EXPECT_TRUE(trace_inequality_check(k).excluded);
  const auto n = sample_field(g, [](double, double, double) { return Vec3{0, 0, 1}; });
  EXPECT_THROW(trace_inequality_check(n), InputError);
}
