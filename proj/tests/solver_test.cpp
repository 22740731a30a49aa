#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "navslip/analysis.hpp"
#include "navslip/errors.hpp"
#include "navslip/solver.hpp"

using namespace navslip;
using std::numbers::pi;

namespace {

FrictionPair iso(double al) {
  FrictionPair A;
  A.lower = FrictionTensor::constant(Wall::lower, Mat2::identity(al));
  A.upper = FrictionTensor::constant(Wall::upper, Mat2::identity(al));
  return A;
}

GridPtr grid(double L1, int Nx, int Ny, int Nz, double cl = 0.0) {
  return std::make_shared<const ChannelGrid>(make_channel_grid(L1, 1, 1, Nx, Ny, Nz, cl));
}

// satisfies dz u = +-2 al u on the walls for A = al I
Profile2 compatible(double al) {
  return [al](double z) {
    const double s1 = std::sin(2 * pi * z), s2 = std::sin(pi * z);
    return std::array<double, 2>{1 + 2 * al * z * (1 - z) + 0.3 * s1 * s1, 0.2 * s2 * s2};
  };
}

VectorField from_profile(GridPtr g, const Profile2& U) {
  return sample_field(g, [&](double, double, double z) {
    const auto v = U(z);
    return Vec3{v[0], v[1], 0.0};
  });
}

// two-mode stream function field, divergence-free with u3 = 0 on the walls
VectorField two_mode(GridPtr g) {
  return sample_field(g, [](double x, double, double z) {
    return Vec3{pi * std::sin(x) * std::cos(pi * z) + pi * std::sin(2 * x) * std::cos(2 * pi * z), 0,
                -(std::cos(x) * std::sin(pi * z) + std::cos(2 * x) * std::sin(2 * pi * z))};
  });
}

double solver_error(int Nz) {
  const auto U = compatible(0.5);
  const auto g = grid(1, 4, 4, Nz);
  SolverOptions so;
  so.snapshots = 5;
  so.dt = 1e-3;
  const auto tr = ns_solve(from_profile(g, U), Forcing::zero(), 1e-3, iso(0.5), 0.25, so);
  OracleOptions oo;
  oo.snapshots = 5;
  const auto o = shear_flow_oracle(U, iso(0.5), 1e-3, 0.25, 1.0, 4097, oo);
  const auto ref = oracle_on_grid(o, 5, g);
  return norm_L2(tr.snapshots.back().u - ref) / norm_L2(ref);
}

}  // namespace

TEST(Oracle, NeumannEigenmodeDecay) {
  const double eps = 1e-2, T = 0.25;
  OracleOptions oo;
  oo.steps = 2000;
  oo.snapshots = 4;
  const auto o = shear_flow_oracle([](double z) { return std::array<double, 2>{std::cos(pi * z), 0.0}; },
                                   iso(0.0), eps, T, 1.0, 1025, oo);
  ASSERT_EQ(o.times.size(), 5u);
  const double decay = std::exp(-eps * pi * pi * T);
  double err = 0;
  for (std::size_t k = 0; k < o.z.size(); ++k) err = std::max(err, std::abs(o.u1[4][k] - decay * std::cos(pi * o.z[k])));
  EXPECT_LT(err, 1e-5);
}

TEST(Oracle, TinyViscosityKeepsProfile) {
  OracleOptions oo;
  oo.steps = 200;
  oo.snapshots = 2;
  const auto U = [](double z) { return std::array<double, 2>{std::tanh(z - 0.5), 0.0}; };
  const auto o = shear_flow_oracle(U, iso(0.5), 1e-14, 0.25, 1.0, 257, oo);
  for (std::size_t k = 1; k + 1 < o.z.size(); ++k) EXPECT_NEAR(o.u1[2][k], U(o.z[k])[0], 1e-6);
}

TEST(Oracle, OffDiagonalCouplingActsThroughTheWall) {
  FrictionPair A;
  A.lower = FrictionTensor::constant(Wall::lower, Mat2{0.5, 0.0, 0.8, 0.5});
  A.upper = FrictionTensor::constant(Wall::upper, Mat2{0.5, 0.0, 0.0, 0.5});
  OracleOptions oo;
  oo.steps = 1000;
  oo.snapshots = 1;
  const auto o = shear_flow_oracle([](double) { return std::array<double, 2>{1.0, 0.0}; }, A, 1e-3, 0.25,
                                   1.0, 1025, oo);
  const auto& u2 = o.u2[1];
  // dz u2 = 2 a21 u1 > 0 at z = 0 drives u2 negative next to the lower wall
  EXPECT_LT(u2.front(), -1e-3);
  EXPECT_LT(std::abs(u2[512]), 1e-10);
  EXPECT_LT(std::abs(u2.back()), 1e-10);
}

TEST(Euler, SteadyShearAndZero) {
  const auto g = grid(1, 8, 8, 65, 1.0);
  const auto u = sample_field(g, [](double, double, double z) { return Vec3{std::tanh(3 * (z - 0.5)), 0.2 * z, 0}; });
  SolverOptions so;
  so.snapshots = 4;
  const auto tr = euler_solve(u, Forcing::zero(), 0.25, so);
  EXPECT_LT((tr.snapshots.back().u - u).max_abs(), 1e-12);
  const auto z = euler_solve(VectorField(g, FieldRole::physical), Forcing::zero(), 0.25, so);
  EXPECT_EQ(z.snapshots.back().u.max_abs(), 0.0);
}

TEST(Euler, EnergyConservedForTwoModeField) {
  const auto g = grid(2 * pi, 32, 4, 65);
  SolverOptions so;
  so.snapshots = 5;
  const auto tr = euler_solve(two_mode(g), Forcing::zero(), 0.25, so);
  const double e0 = tr.diagnostics.front().energy, e1 = tr.diagnostics.back().energy;
  EXPECT_LT(std::abs(e1 / e0 - 1), 1e-3);
  EXPECT_LT(tr.diagnostics.back().div_max, 1e-8);
}

TEST(NavierStokes, MatchesShearOracle) {
  EXPECT_LT(solver_error(257), 1e-6);
}

TEST(NavierStokes, SelfConvergenceIsSecondOrder) {
  const double e1 = solver_error(65), e2 = solver_error(129);
  EXPECT_GE(e1 / e2, 3.5);
}

TEST(NavierStokes, FreeSlipEnergyDecaysMonotonically) {
  const auto g = grid(1, 8, 8, 65);
  const auto u = sample_field(g, [](double x, double y, double z) {
    return Vec3{std::cos(pi * z) * std::cos(2 * pi * y), std::cos(pi * z) * std::sin(2 * pi * x), 0};
  });
  SolverOptions so;
  so.snapshots = 10;
  const auto tr = ns_solve(u, Forcing::zero(), 1e-2, iso(0.0), 0.25, so);
  ASSERT_GT(tr.diagnostics.size(), 10u);
  for (std::size_t n = 1; n < tr.diagnostics.size(); ++n)
    EXPECT_LE(tr.diagnostics[n].energy, tr.diagnostics[n - 1].energy * (1 + 1e-13));
  for (const auto& s : tr.snapshots)
    for (std::size_t p = 0; p < g->plane(); ++p) {
      EXPECT_EQ(s.u.c[2][p * g->Nz], 0.0);
      EXPECT_EQ(s.u.c[2][p * g->Nz + g->Nz - 1], 0.0);
    }
}

TEST(NavierStokes, RejectsBadInput) {
  const auto g = grid(1, 4, 4, 33);
  const auto u = from_profile(g, compatible(0.5));
  EXPECT_THROW(ns_solve(u, Forcing::zero(), 0.0, iso(0.5), 0.1), ConfigError);
  auto bad = u;
  bad.c[2][0] = 1.0;
  EXPECT_THROW(ns_solve(bad, Forcing::zero(), 1e-3, iso(0.5), 0.1), InputError);
}

TEST(Projection, IdempotentAndSolenoidal) {
  const auto g = grid(1, 16, 8, 33, 1.0);
  auto u = sample_field(g, [](double x, double y, double z) {
    return Vec3{std::sin(2 * pi * x) * z, std::cos(2 * pi * y) + z * z, std::sin(pi * z) * std::cos(2 * pi * x)};
  });
  project_divergence_free(u);
  auto v = u;
  project_divergence_free(v);
  EXPECT_LT((v - u).max_abs(), 1e-12);
  double d = 0;
  for (double x : solver_divergence(u)) d = std::max(d, std::abs(x));
  EXPECT_LT(d, 1e-10);
}

TEST(Remainder, ZeroAndMisaligned) {
  const auto g = grid(1, 4, 4, 33);
  Trajectory a;
  for (int s = 0; s < 3; ++s) {
    FlowState st;
    st.u = from_profile(g, compatible(0.5));
    st.t = 0.1 * s;
    a.snapshots.push_back(st);
  }
  std::vector<CorrectorField> th(3);
  for (int s = 0; s < 3; ++s) {
    th[s].theta = VectorField(g, FieldRole::corrector);
    th[s].t = 0.1 * s;
  }
  const auto w = remainder(a, a, th);
  for (const auto& s : w.snapshots) EXPECT_EQ(s.u.max_abs(), 0.0);
  th[2].t = 0.3;
  EXPECT_THROW(remainder(a, a, th), InputError);
}

TEST(NonlinearGap, VanishingCases) {
  const auto g = grid(2 * pi, 16, 4, 33);
  const auto u = two_mode(g);
  EXPECT_EQ(nonlinear_gap_J(u, u).J.max_abs(), 0.0);
  const auto s = from_profile(g, compatible(0.5));
  const auto z = from_profile(g, [](double z) { return std::array<double, 2>{z, -z}; });
  EXPECT_LT(nonlinear_gap_J(s, z).J.max_abs(), 1e-13);
}

TEST(NonlinearGap, SkewTermVanishes) {
  const auto g = grid(2 * pi, 16, 4, 65);
  // the skew form vanishes for discretely solenoidal fields
  auto u = two_mode(g);
  project_divergence_free(u);
  const auto th = VectorField(g, FieldRole::corrector);
  const auto u0 = 0.5 * u;
  const auto w = u - u0;
  const auto gap = nonlinear_gap_J(u, u0, &th);
  ASSERT_TRUE(gap.has_terms);
  const double scale = norm_L2(u) * std::pow(norm_L2(w), 2);
  EXPECT_LT(std::abs(gap.terms[0]), 1e-12 * scale);
}

TEST(Checkpoint, RoundTrip) {
  const auto g = grid(1, 4, 6, 17, 1.0);
  FlowState s;
  s.u = two_mode(g);
  s.p = ScalarField(g);
  for (std::size_t n = 0; n < g->size(); ++n) s.p.v[n] = 0.01 * n;
  s.t = 0.125;
  s.epsilon = 1e-3;
  s.A = iso(0.5);
  const auto path = (std::filesystem::temp_directory_path() / "navslip_ckpt_test.bin").string();
  write_checkpoint(s, path);
  const auto r = read_checkpoint(path);
  std::filesystem::remove(path);
  EXPECT_EQ(r.u.grid->Nx, 4);
  EXPECT_EQ(r.u.grid->Ny, 6);
  EXPECT_EQ(r.u.grid->z_nodes, g->z_nodes);
  EXPECT_EQ(r.t, 0.125);
  EXPECT_EQ(r.epsilon, 1e-3);
  EXPECT_EQ(r.A.upper.constant_value().a22, 0.5);
  for (int c = 0; c < 3; ++c) EXPECT_EQ(r.u.c[c], s.u.c[c]);
  EXPECT_EQ(r.p.v, s.p.v);
  std::ofstream(path) << "not a checkpoint";
  EXPECT_THROW(read_checkpoint(path), IoError);
  std::filesystem::remove(path);
}

TEST(Diagnostics, CsvHeader) {
  Trajectory tr;
  tr.diagnostics.push_back({0.0, 1.0, 0.0, 0.0});
  const auto path = (std::filesystem::temp_directory_path() / "navslip_diag_test.csv").string();
  write_diagnostics_csv(tr, path);
  std::ifstream in(path);
  std::string head;
  std::getline(in, head);
  EXPECT_EQ(head, "t,energy,div_max,robin_residual");
  std::filesystem::remove(path);
}
