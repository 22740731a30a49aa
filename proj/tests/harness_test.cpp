#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "navslip/config.hpp"
#include "navslip/errors.hpp"
#include "navslip/harness.hpp"
#include "navslip/report.hpp"

using namespace navslip;

namespace {

// Coarse oracle sweep, fast enough for unit tests.
StudyConfig small_sweep(StudyKind kind) {
  StudyConfig c;
  c.kind = kind;
  c.eps_list = {1e-2, 3.16e-3, 1e-3, 3.16e-4};
  c.oracle_Nz_fine = 513;
  c.oracle_steps = 1000;
  c.snapshots = 10;
  return c;
}

std::string echo_text(const StudyConfig& c) {
  std::string s;
  for (const auto& [k, v] : c.echo()) s += k + " = " + v + "\n";
  return s;
}

}  // namespace

TEST(Config, ParsesKeysAndComments) {
  const auto c = parse_config(
      "# study\n"
      "kind = uniform   # alias\n"
      "A = 0.3\n"
      "eps_list = 1e-2, 1e-3, 1e-4\n"
      "Nx = 8\n"
      "oracle.Nz_fine = 1025\n");
  EXPECT_EQ(c.kind, StudyKind::uniform_rates);
  EXPECT_EQ(c.A_upper.a22, 0.3);
  EXPECT_EQ(c.A_lower.a12, 0.0);
  EXPECT_EQ(c.eps_list.size(), 3u);
  EXPECT_EQ(c.Nx, 8);
  EXPECT_EQ(c.oracle_Nz_fine, 1025);
}

TEST(Config, Errors) {
  EXPECT_THROW(parse_config("bogus = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("Nx = eight\n"), ConfigError);
  EXPECT_THROW(parse_config("Nx 8\n"), ConfigError);
  EXPECT_THROW(parse_config("eps_list = 1e-3, 1e-2, 1e-4\n"), ConfigError);
  EXPECT_THROW(parse_config("eps_list = 0.1, 1e-3, 1e-4\n"), ConfigError);
  EXPECT_THROW(parse_config("kind = uniform\nforcing = custom\nforcing.value = 1,0,0\n"), ConfigError);
  EXPECT_THROW(parse_config("initial_data = custom\n"), ConfigError);
  EXPECT_THROW(parse_study_kind("nonsense"), ConfigError);
}

TEST(Config, EchoRoundTrip) {
  StudyConfig c = small_sweep(StudyKind::corrected_rates);
  c.A_lower = Mat2{0.5, 0.1, 0.0, 0.25};
  c.seed = 42;
  const auto back = parse_config(echo_text(c));
  EXPECT_EQ(back.echo(), c.echo());
}

TEST(Report, JsonRoundTripAndCsv) {
  ConvergenceReport r;
  r.kind = "uncorrected_rates";
  r.config = StudyConfig{}.echo();
  r.norms.push_back({"u_eps-u0:L2", Region::whole(), 0.1, 1e-2, TimeMode::sup_over_time});
  r.norms.push_back({"u_eps-u0:L2", Region::strip(0.125), 0.01, 1e-3, TimeMode::sup_over_time});
  r.fits.push_back(make_fit_entry("u_eps-u0:L2", Region::whole(), TimeMode::sup_over_time,
                                  {1e-2, 1e-3, 1e-4}, {1.0, 0.1, 0.01}, 1.0, 0.9, 1.1));
  r.fits.push_back(make_fit_entry("bad", Region::whole(), TimeMode::instant, {1e-2, 1e-3}, {1, 2}, 0.5,
                                  0.4, std::numeric_limits<double>::infinity()));
  r.checks.push_back(make_check("c", 2.0, "<=", 3.0, "detail"));
  r.notes.push_back("note");
  EXPECT_TRUE(r.fits[0].pass);
  EXPECT_FALSE(r.fits[1].pass);
  EXPECT_FALSE(r.fits[1].error.empty());
  const auto j = report_to_json(r);
  EXPECT_EQ(report_to_json(report_from_json(j)), j);

  const auto csv = report_to_csv(r);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "epsilon,norm,region,value");
  int rows = 0;
  while (std::getline(in, line)) rows += line.empty() ? 0 : 1;
  EXPECT_EQ(rows, 2);
  EXPECT_EQ(report_to_csv(ConvergenceReport{}), "epsilon,norm,region,value\n");
  EXPECT_THROW(report_from_json("{"), InputError);
}

TEST(Report, EmitWritesFiles) {
  ConvergenceReport r;
  r.kind = "x";
  const auto dir = std::filesystem::temp_directory_path();
  const auto p = (dir / "navslip_emit_test.csv").string();
  emit_report(r, ReportFormat::plot_csv, p);
  std::ifstream in(p);
  std::string head;
  std::getline(in, head);
  EXPECT_EQ(head, "norm,region,log_eps,log_value");
  std::filesystem::remove(p);
  EXPECT_THROW(emit_report(r, ReportFormat::json, "/nonexistent-dir/x.json"), IoError);
}

TEST(Studies, TwoEpsilonValuesSurfaceFitError) {
  StudyConfig c = small_sweep(StudyKind::uncorrected_rates);
  c.eps_list = {1e-2, 1e-3};
  const auto r = run_uncorrected_rates(c);
  const FitEntry* f = r.find_fit("u_eps-u0:L2");
  ASSERT_NE(f, nullptr);
  EXPECT_FALSE(f->error.empty());
  EXPECT_FALSE(f->pass);
}

TEST(Studies, ZeroCorrectorReproducesUncorrected) {
  StudyConfig c = small_sweep(StudyKind::corrected_rates);
  c.zero_corrector = true;
  const auto w = run_corrected_rates(c);
  c.kind = StudyKind::uncorrected_rates;
  const auto u = run_uncorrected_rates(c);
  const FitEntry* a = w.find_fit("w:L2");
  const FitEntry* b = u.find_fit("u_eps-u0:L2");
  ASSERT_TRUE(a && b);
  EXPECT_EQ(a->fit.norm_values, b->fit.norm_values);
  EXPECT_EQ(w.find_fit("w:H1")->fit.norm_values, u.find_fit("u_eps-u0:H1")->fit.norm_values);
}

TEST(Studies, UniformTargets) {
  StudyConfig c = small_sweep(StudyKind::uniform_rates);
  const auto r = run_uniform_rates(c);
  const FitEntry* b = r.find_fit("u_eps-u0:Linf", "boundary_strip");
  const FitEntry* i = r.find_fit("u_eps-u0:Linf", "interior");
  ASSERT_TRUE(b && i);
  EXPECT_NEAR(b->target, 0.3125, 1e-12);
  EXPECT_NEAR(i->target, 0.75 - 9.0 / 56.0, 1e-12);
  EXPECT_NEAR(b->lo, 0.2125, 1e-12);
  EXPECT_GE(i->fit.slope, b->fit.slope);
  StudyConfig f = c;
  f.forcing = ForcingKind::custom;
  f.forcing_value = {1, 0, 0};
  EXPECT_THROW(run_uniform_rates(f), ConfigError);
}

TEST(Studies, Deterministic) {
  StudyConfig c = small_sweep(StudyKind::uncorrected_rates);
  c.seed = 3;
  auto a = run_study(c);
  auto b = run_study(c);
  a.wall_clock_s = b.wall_clock_s = 0.0;
  EXPECT_EQ(report_to_json(a), report_to_json(b));
}

TEST(Studies, InitialDataHelpers) {
  StudyConfig c;
  const auto U = shear_profile_fn(c);
  EXPECT_NEAR(U(0.5)[0], 0.0, 1e-15);
  c.shear_profile = "compatible";
  const auto V = shear_profile_fn(c);
  const double d = 1e-7;
  // dz u = 2 alpha u at the lower wall
  EXPECT_NEAR((V(d)[0] - V(0)[0]) / d, 2 * 0.5 * V(0)[0], 1e-5);
  const auto tg = taylor_green_like_fn(c);
  EXPECT_NEAR(tg(0.3, 0.1, 0.0)[2], 0.0, 1e-15);
  EXPECT_NEAR(tg(0.3, 0.1, 1.0)[2], 0.0, 1e-15);
  c.A_upper = Mat2{0.5, 0.2, 0.0, 0.5};
  EXPECT_THROW(shear_profile_fn(c), ConfigError);
}
