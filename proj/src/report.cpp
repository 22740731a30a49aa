#include "navslip/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"
#include "navslip/errors.hpp"

namespace navslip {

using nlohmann::json;

namespace {

// JSON has no infinities; open band ends are written as null.
json bound(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double unbound(const json& j, double inf) { return j.is_null() ? inf : j.get<double>(); }

json fit_json(const RateFit& f) {
  return json{{"eps_values", f.eps_values}, {"norm_values", f.norm_values}, {"slope", f.slope},
              {"intercept", f.intercept},   {"r2", f.r_squared},          {"notes", f.notes}};
}

RateFit fit_from(const json& j) {
  RateFit f;
  f.eps_values = j.at("eps_values").get<std::vector<double>>();
  f.norm_values = j.at("norm_values").get<std::vector<double>>();
  f.slope = j.at("slope").get<double>();
  f.intercept = j.at("intercept").get<double>();
  f.r_squared = j.at("r2").get<double>();
  f.notes = j.at("notes").get<std::vector<std::string>>();
  return f;
}

Region region_from_label(const std::string& s, double a) {
  if (s.rfind("boundary_strip", 0) == 0) return Region::strip(a);
  if (s.rfind("interior", 0) == 0) return Region::interior(a);
  return Region::whole();
}

TimeMode mode_from(const std::string& s) {
  if (s == time_mode_name(TimeMode::sup_over_time)) return TimeMode::sup_over_time;
  if (s == time_mode_name(TimeMode::L2_over_time)) return TimeMode::L2_over_time;
  return TimeMode::instant;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

bool ConvergenceReport::all_pass() const {
  for (const auto& f : fits)
    if (!f.pass) return false;
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

const FitEntry* ConvergenceReport::find_fit(const std::string& norm, const std::string& region) const {
  for (const auto& f : fits)
    if (f.norm == norm && (region.empty() || f.region == region)) return &f;
  return nullptr;
}

const CheckEntry* ConvergenceReport::find_check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

FitEntry make_fit_entry(const std::string& norm, Region region, TimeMode mode,
                        const std::vector<double>& eps, const std::vector<double>& values,
                        double target, double lo, double hi) {
  FitEntry e;
  e.norm = norm;
  e.region = region.label();
  e.t_mode = time_mode_name(mode);
  e.target = target;
  e.lo = lo;
  e.hi = hi;
  try {
    e.fit = fit_rate(eps, values);
    e.pass = e.fit.slope >= lo && e.fit.slope <= hi;
  } catch (const Error& ex) {
    e.fit.eps_values = eps;
    e.fit.norm_values = values;
    e.error = ex.what();
    e.pass = false;
  }
  return e;
}

CheckEntry make_check(const std::string& name, double value, const std::string& relation,
                      double threshold, const std::string& detail) {
  CheckEntry c{name, value, threshold, relation, false, detail};
  if (relation == "<=") c.pass = value <= threshold;
  else if (relation == ">=") c.pass = value >= threshold;
  else if (relation == "==") c.pass = value == threshold;
  else throw ConfigError("unknown check relation '" + relation + "'");
  if (!std::isfinite(value)) c.pass = false;
  return c;
}

std::string report_to_json(const ConvergenceReport& r) {
  json j;
  j["kind"] = r.kind;
  j["config"] = r.config;
  json norms = json::array();
  for (const auto& n : r.norms) {
    norms.push_back({{"epsilon", n.epsilon},
                     {"norm", n.name},
                     {"region", n.region.label()},
                     {"region_a", n.region.a},
                     {"t_mode", time_mode_name(n.t_mode)},
                     {"value", n.value}});
  }
  j["norms"] = norms;
  json fits = json::array();
  for (const auto& f : r.fits) {
    json e = fit_json(f.fit);
    e["norm"] = f.norm;
    e["region"] = f.region;
    e["t_mode"] = f.t_mode;
    e["target"] = f.target;
    e["lo"] = bound(f.lo);
    e["hi"] = bound(f.hi);
    e["pass"] = f.pass;
    e["error"] = f.error;
    fits.push_back(e);
  }
  j["fits"] = fits;
  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name},
                      {"value", std::isfinite(c.value) ? json(c.value) : json(nullptr)},
                      {"threshold", c.threshold},
                      {"relation", c.relation},
                      {"pass", c.pass},
                      {"detail", c.detail}});
  }
  j["checks"] = checks;
  j["failures"] = r.failures;
  j["notes"] = r.notes;
  j["pass"] = r.all_pass();
  j["wall_clock_s"] = r.wall_clock_s;
  return j.dump(2);
}

ConvergenceReport report_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("report JSON: ") + e.what());
  }
  ConvergenceReport r;
  try {
    r.kind = j.at("kind").get<std::string>();
    r.config = j.at("config").get<std::map<std::string, std::string>>();
    for (const auto& n : j.at("norms")) {
      NormReport nr;
      nr.epsilon = n.at("epsilon").get<double>();
      nr.name = n.at("norm").get<std::string>();
      nr.region = region_from_label(n.at("region").get<std::string>(), n.at("region_a").get<double>());
      nr.t_mode = mode_from(n.at("t_mode").get<std::string>());
      nr.value = n.at("value").get<double>();
      r.norms.push_back(nr);
    }
    const double inf = std::numeric_limits<double>::infinity();
    for (const auto& f : j.at("fits")) {
      FitEntry e;
      e.fit = fit_from(f);
      e.norm = f.at("norm").get<std::string>();
      e.region = f.at("region").get<std::string>();
      e.t_mode = f.at("t_mode").get<std::string>();
      e.target = f.at("target").get<double>();
      e.lo = unbound(f.at("lo"), -inf);
      e.hi = unbound(f.at("hi"), inf);
      e.pass = f.at("pass").get<bool>();
      e.error = f.at("error").get<std::string>();
      r.fits.push_back(e);
    }
    for (const auto& c : j.at("checks")) {
      CheckEntry e;
      e.name = c.at("name").get<std::string>();
      e.value = c.at("value").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                        : c.at("value").get<double>();
      e.threshold = c.at("threshold").get<double>();
      e.relation = c.at("relation").get<std::string>();
      e.pass = c.at("pass").get<bool>();
      e.detail = c.at("detail").get<std::string>();
      r.checks.push_back(e);
    }
    r.failures = j.at("failures").get<std::vector<std::string>>();
    r.notes = j.at("notes").get<std::vector<std::string>>();
    r.wall_clock_s = j.at("wall_clock_s").get<double>();
  } catch (const json::exception& e) {
    throw InputError(std::string("report JSON: ") + e.what());
  }
  return r;
}

std::string report_to_csv(const ConvergenceReport& r) {
  std::string s = "epsilon,norm,region,value\n";
  for (const auto& n : r.norms) {
    s += num(n.epsilon) + "," + n.name + "," + n.region.label() + "," + num(n.value) + "\n";
  }
  return s;
}

std::string report_to_plot_csv(const ConvergenceReport& r) {
  std::string s = "norm,region,log_eps,log_value\n";
  for (const auto& f : r.fits) {
    for (std::size_t i = 0; i < f.fit.eps_values.size() && i < f.fit.norm_values.size(); ++i) {
      const double v = f.fit.norm_values[i];
      if (!(v > 0.0)) continue;
      s += f.norm + "," + f.region + "," + num(std::log(f.fit.eps_values[i])) + "," +
           num(std::log(v)) + "\n";
    }
  }
  return s;
}

void emit_report(const ConvergenceReport& r, ReportFormat format, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  switch (format) {
    case ReportFormat::csv: out << report_to_csv(r); break;
    case ReportFormat::json: out << report_to_json(r) << "\n"; break;
    case ReportFormat::plot_csv: out << report_to_plot_csv(r); break;
  }
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace navslip
