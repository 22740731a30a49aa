// Acceptance runner: one PASS/FAIL line per criterion.
//
//   acceptance            criteria 1-8 (criterion 9 is reported as SKIP)
//   acceptance --only N   a single criterion
//   acceptance --strict   exit status 1 when any criterion fails
//
// Without --strict the exit status is non-zero only when a criterion could not
// be evaluated at all (exception), so known failures stay visible in the log
// without breaking the build.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "navslip/analysis.hpp"
#include "navslip/config.hpp"
#include "navslip/corrector.hpp"
#include "navslip/harness.hpp"
#include "navslip/report.hpp"
#include "navslip/solver.hpp"

using namespace navslip;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* title;
  double budget_s;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fit_text(const ConvergenceReport& r, const std::string& norm) {
  const FitEntry* f = r.find_fit(norm);
  if (!f) return norm + "=missing";
  if (!f->error.empty()) return norm + " fit error (" + f->error + ")";
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s slope %.4f in [%.3g, %.3g]%s", norm.c_str(), f->fit.slope, f->lo,
                f->hi, f->pass ? "" : " <- out of band");
  return buf;
}

bool fits_pass(const ConvergenceReport& r, const std::vector<std::string>& norms) {
  for (const auto& n : norms) {
    const FitEntry* f = r.find_fit(n);
    if (!f || !f->pass) return false;
  }
  return true;
}

std::string failed_items(const ConvergenceReport& r) {
  std::string s;
  int total = 0, bad = 0;
  for (const auto& f : r.fits) {
    ++total;
    if (!f.pass) {
      ++bad;
      s += " " + f.norm;
    }
  }
  for (const auto& c : r.checks) {
    ++total;
    if (!c.pass) {
      ++bad;
      s += " " + c.name;
    }
  }
  return std::to_string(total - bad) + "/" + std::to_string(total) + " items pass" +
         (bad ? "; failing:" + s : "");
}

StudyConfig shear_study(StudyKind kind) {
  StudyConfig c;
  c.kind = kind;
  c.A_lower = c.A_upper = Mat2{0.5, 0.0, 0.0, 0.5};
  c.eps_list = {1e-2, 3.16e-3, 1e-3, 3.16e-4, 1e-4};
  c.T = 0.25;
  c.oracle_Nz_fine = 2049;
  return c;
}

Outcome criterion1() {
  const auto r = run_uncorrected_rates(shear_study(StudyKind::uncorrected_rates));
  return {fits_pass(r, {"u_eps-u0:L2", "u_eps-u0:H1"}),
          fit_text(r, "u_eps-u0:L2") + "; " + fit_text(r, "u_eps-u0:H1")};
}

Outcome criterion2() {
  const auto r = run_corrected_rates(shear_study(StudyKind::corrected_rates));
  return {fits_pass(r, {"w:L2", "w:H1"}), fit_text(r, "w:L2") + "; " + fit_text(r, "w:H1") +
                                              " (info: " + fit_text(r, "R_eps(theta):L2") + ")"};
}

Outcome criterion3() {
  StudyConfig c;
  c.kind = StudyKind::corrector_scalings;
  c.initial = InitialData::taylor_green_like;
  c.eps_list = {1e-8, 1e-9, 1e-10, 1e-11, 1e-12};
  c.Nx = c.Ny = 8;
  c.Nz = 4097;
  const auto r = run_corrector_scalings(c);
  return {r.all_pass() && !r.fits.empty(), failed_items(r)};
}

Outcome criterion4() {
  StudyConfig c = shear_study(StudyKind::uniform_rates);
  c.nominal_m = 7;
  const auto r = run_uniform_rates(c);
  const FitEntry* b = r.find_fit("u_eps-u0:Linf", "boundary_strip");
  const FitEntry* i = r.find_fit("u_eps-u0:Linf", "interior");
  if (!b || !i) return {false, "missing fits"};
  char buf[200];
  std::snprintf(buf, sizeof buf, "boundary slope %.4f >= %.4f; interior slope %.4f >= %.4f", b->fit.slope,
                b->lo, i->fit.slope, i->lo);
  return {b->pass && i->pass, buf};
}

Outcome criterion5() {
  const auto r = run_corrector_checks(StudyConfig{});
  return {r.all_pass() && r.checks.size() >= 7, failed_items(r)};
}

// |J1| <= 1e-8 |u_eps| |w|^2 on every snapshot of a nonlinear run.
Outcome criterion6() {
  StudyConfig c;
  const double eps = 1e-3;
  const double cl = clustering_for_layer(1.0, 65, std::sqrt(eps), 8);
  auto g = std::make_shared<const ChannelGrid>(make_channel_grid(1.0, 1.0, 1.0, 16, 8, 65, cl));
  const VectorField u = sample_field(g, taylor_green_like_fn(c));
  const FrictionPair A = friction_from(c);
  SolverOptions so;
  so.snapshots = 5;
  so.dt = 2e-3;
  const Trajectory te = euler_solve(u, Forcing::zero(), 0.05, so);
  const Trajectory tn = ns_solve(u, Forcing::zero(), eps, A, 0.05, so);
  double worst = 0.0;
  for (std::size_t s = 0; s < tn.snapshots.size(); ++s) {
    const auto& ue = tn.snapshots[s].u;
    const auto th = build_corrector_channel(te.snapshots[s].u, A, eps, te.snapshots[s].t).theta;
    const NonlinearGap gap = nonlinear_gap_J(ue, te.snapshots[s].u, &th);
    const VectorField w = ue - te.snapshots[s].u - th;
    const double scale = norm_L2(ue) * std::pow(norm_L2(w), 2);
    if (scale > 0.0) worst = std::max(worst, std::abs(gap.terms[0]) / scale);
  }
  return {worst <= 1e-8, fmt("max |J1| / (|u_eps| |w|^2) = %.3e (limit 1e-8)", worst)};
}

Outcome criterion7() {
  const auto r = run_inequality_suite(StudyConfig{});
  return {r.all_pass() && !r.checks.empty(), failed_items(r)};
}

// ns_solve on x,y-invariant data against the one-dimensional oracle.
Outcome criterion8() {
  StudyConfig c;
  c.shear_profile = "compatible";
  const Profile2 U = shear_profile_fn(c);
  const FrictionPair A = friction_from(c);
  const double eps = 1e-3, T = 0.25;
  auto g = std::make_shared<const ChannelGrid>(make_channel_grid(1.0, 1.0, 1.0, 4, 4, 513, 0.0));
  const VectorField u0 = sample_field(g, [&](double, double, double z) {
    const auto v = U(z);
    return Vec3{v[0], v[1], 0.0};
  });
  SolverOptions so;
  so.snapshots = 10;
  so.dt = 1e-3;
  const Trajectory tr = ns_solve(u0, Forcing::zero(), eps, A, T, so);
  OracleOptions oo;
  oo.snapshots = 10;
  const ProfileTrajectory o = shear_flow_oracle(U, A, eps, T, 1.0, 4097, oo);
  const VectorField ref = oracle_on_grid(o, o.times.size() - 1, g);
  const double rel = norm_L2(tr.snapshots.back().u - ref) / norm_L2(ref);
  return {rel <= 1e-6, fmt("relative L2 discrepancy at T: %.3e (limit 1e-6)", rel)};
}

Outcome criterion9() {
  StudyConfig c;
  c.kind = StudyKind::corrected_rates;
  c.path = SolvePath::solver;
  c.initial = InitialData::taylor_green_like;
  c.Nx = c.Ny = 16;
  c.Nz = 129;
  c.eps_list = {1e-2, 1e-3, 1e-4};
  c.snapshots = 10;
  c.solver_dt = 1e-3;
  c.band = 0.2;
  const auto r = run_corrected_rates(c);
  std::string d = fit_text(r, "w:L2");
  for (const auto& f : r.failures) d += "; run failure: " + f;
  return {fits_pass(r, {"w:L2"}), d};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  bool strict = false;
  app.add_option("--only", only, "run a single criterion (1-9)")->check(CLI::Range(1, 9));
  app.add_flag("--strict", strict, "exit 1 when any criterion fails");
  CLI11_PARSE(app, argc, argv);

  // runtime budgets refer to one worker thread
  setenv("NAVSLIP_THREADS", "1", 0);

  const std::vector<Criterion> all = {
      {1, "uncorrected convergence rates", 120, criterion1},
      {2, "corrected remainder rates", 180, criterion2},
      {3, "corrector norm scalings", 30, criterion3},
      {4, "uniform rates, f = 0, m = 7", 180, criterion4},
      {5, "corrector structural suite", 30, criterion5},
      {6, "nonlinear term identity J1", 30, criterion6},
      {7, "inequality suite", 60, criterion7},
      {8, "solver vs shear oracle", 60, criterion8},
      {9, "nonlinear 3D smoke study (slow)", 1200, criterion9},
  };

  int failed = 0, errored = 0;
  for (const auto& c : all) {
    if (only != 0 && c.id != only) continue;
    if (only == 0 && c.id == 9) {
      std::printf("[SKIP] %d %s: slow, run with --only 9\n", c.id, c.title);
      continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    bool error = false;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
      error = true;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = o.pass && in_time;
    std::printf("[%s] %d %s: %s; %.1f s (budget %.0f s)%s\n", pass ? "PASS" : "FAIL", c.id, c.title,
                o.detail.c_str(), secs, c.budget_s, in_time ? "" : " <- over budget");
    std::fflush(stdout);
    failed += pass ? 0 : 1;
    errored += error ? 1 : 0;
  }
  std::printf("%d criteria failed\n", failed);
  if (errored > 0) return 2;
  return strict && failed > 0 ? 1 : 0;
}
