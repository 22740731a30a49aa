// navslip command-line driver.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "navslip/config.hpp"
#include "navslip/errors.hpp"
#include "navslip/harness.hpp"
#include "navslip/report.hpp"

using namespace navslip;

namespace {

void print_report(const ConvergenceReport& r) {
  std::printf("study: %s  (%.2f s)\n", r.kind.c_str(), r.wall_clock_s);
  for (const auto& f : r.fits) {
    if (!f.error.empty()) {
      std::printf("  FAIL  %-34s %-15s fit error: %s\n", f.norm.c_str(), f.region.c_str(), f.error.c_str());
      continue;
    }
    std::printf("  %s  %-34s %-15s slope %+.4f  r2 %.4f  band [%g, %g]\n", f.pass ? "pass" : "FAIL",
                f.norm.c_str(), f.region.c_str(), f.fit.slope, f.fit.r_squared, f.lo, f.hi);
  }
  for (const auto& c : r.checks) {
    std::printf("  %s  %-44s %.4e %s %g  %s\n", c.pass ? "pass" : "FAIL", c.name.c_str(), c.value,
                c.relation.c_str(), c.threshold, c.detail.c_str());
  }
  for (const auto& f : r.failures) std::printf("  run failure: %s\n", f.c_str());
  for (const auto& n : r.notes) std::printf("  note: %s\n", n.c_str());
}

StudyConfig config_or_default(const std::string& path, StudyKind kind) {
  StudyConfig c = path.empty() ? StudyConfig{} : load_config(path);
  c.kind = kind;
  validate_config(c);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"navslip: vanishing-viscosity experiments for channel flow with Navier friction walls"};
  app.require_subcommand(1);

  std::string config_path, json_out, csv_out, plot_out;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key=value study configuration file");
    sub->add_option("--json", json_out, "write the report as JSON");
    sub->add_option("--csv", csv_out, "write per-epsilon norms as CSV");
    sub->add_option("--plot-csv", plot_out, "write log-log plot data as CSV");
  };

  std::string kind = "uncorrected";
  auto* converge = app.add_subcommand("converge", "epsilon sweep of convergence rates");
  converge->add_option("--kind", kind, "uncorrected | corrected | uniform")
      ->check(CLI::IsMember({"uncorrected", "corrected", "uniform"}));
  add_common(converge);

  bool scalings = false, check = false;
  auto* corrector = app.add_subcommand("corrector", "boundary-layer corrector studies");
  auto* g = corrector->add_option_group("mode");
  g->add_flag("--scalings", scalings, "norm scalings across epsilon");
  g->add_flag("--check", check, "structural checks");
  g->require_option(1);
  add_common(corrector);

  auto* ineq = app.add_subcommand("inequalities", "interpolation, trace and integration-by-parts checks");
  add_common(ineq);
  auto* torus = app.add_subcommand("torus", "torus corrector and shape-operator checks");
  add_common(torus);

  std::string emit_in, emit_format = "csv", emit_out;
  auto* emit = app.add_subcommand("emit", "re-emit a saved JSON report");
  emit->add_option("--input", emit_in, "report JSON")->required();
  emit->add_option("--format", emit_format, "csv | json | plot_csv")
      ->check(CLI::IsMember({"csv", "json", "plot_csv"}));
  emit->add_option("--output", emit_out, "output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (emit->parsed()) {
      std::ifstream in(emit_in);
      if (!in) throw IoError("cannot read " + emit_in);
      std::stringstream ss;
      ss << in.rdbuf();
      const ConvergenceReport r = report_from_json(ss.str());
      const ReportFormat f = emit_format == "json"  ? ReportFormat::json
                             : emit_format == "csv" ? ReportFormat::csv
                                                    : ReportFormat::plot_csv;
      emit_report(r, f, emit_out);
      return 0;
    }

    ConvergenceReport rep;
    StudyConfig cfg;
    if (converge->parsed()) {
      cfg = config_or_default(config_path, parse_study_kind(kind));
      rep = run_study(cfg);
    } else if (corrector->parsed()) {
      cfg = config_or_default(config_path, StudyKind::corrector_scalings);
      if (scalings && config_path.empty()) {
        // defaults resolving the layer at every swept epsilon
        cfg.eps_list = {1e-8, 1e-9, 1e-10, 1e-11, 1e-12};
        cfg.initial = InitialData::taylor_green_like;
        cfg.Nx = cfg.Ny = 8;
      }
      rep = scalings ? run_corrector_scalings(cfg) : run_corrector_checks(cfg);
    } else if (ineq->parsed()) {
      cfg = config_or_default(config_path, StudyKind::inequality_suite);
      rep = run_inequality_suite(cfg);
    } else {
      cfg = config_or_default(config_path, StudyKind::torus_suite);
      rep = run_torus_suite(cfg);
    }
    if (!json_out.empty()) cfg.output_json = json_out;
    if (!csv_out.empty()) cfg.output_csv = csv_out;
    if (!plot_out.empty()) cfg.output_plot_csv = plot_out;
    write_outputs(rep, cfg);
    print_report(rep);
    return rep.all_pass() ? 0 : 1;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
