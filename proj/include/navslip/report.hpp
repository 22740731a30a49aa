#pragma once

#include <limits>
#include <map>
#include <string>
#include <vector>

#include "navslip/analysis.hpp"

namespace navslip {

// One fitted series with its pass band [lo, hi].
struct FitEntry {
  std::string norm;
  std::string region;
  std::string t_mode;
  RateFit fit;
  double target = 0.0;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool pass = false;
  std::string error;  // non-empty when the fit could not be made
};

// Scalar verification (structural checks, inequality families, ...).
struct CheckEntry {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  std::string relation;  // "<=", ">=", "=="
  bool pass = false;
  std::string detail;
};

struct ConvergenceReport {
  std::string kind;
  std::map<std::string, std::string> config;
  std::vector<NormReport> norms;
  std::vector<FitEntry> fits;
  std::vector<CheckEntry> checks;
  std::vector<std::string> failures;  // per-epsilon isolation records
  std::vector<std::string> notes;
  double wall_clock_s = 0.0;

  bool all_pass() const;
  const FitEntry* find_fit(const std::string& norm, const std::string& region = "") const;
  const CheckEntry* find_check(const std::string& name) const;
};

// Pass iff lo <= slope <= hi.
FitEntry make_fit_entry(const std::string& norm, Region region, TimeMode mode,
                        const std::vector<double>& eps, const std::vector<double>& values,
                        double target, double lo, double hi);
CheckEntry make_check(const std::string& name, double value, const std::string& relation,
                      double threshold, const std::string& detail = "");

std::string report_to_json(const ConvergenceReport& r);
ConvergenceReport report_from_json(const std::string& text);
// Rows: epsilon,norm,region,value.
std::string report_to_csv(const ConvergenceReport& r);
// Rows: norm,region,log_eps,log_value.
std::string report_to_plot_csv(const ConvergenceReport& r);

enum class ReportFormat { csv, json, plot_csv };
void emit_report(const ConvergenceReport& r, ReportFormat format, const std::string& path);

}  // namespace navslip
