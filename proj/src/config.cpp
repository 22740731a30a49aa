#include "navslip/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "navslip/errors.hpp"

namespace navslip {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (trim(v.substr(used)).empty()) return d;
  } catch (const std::exception&) {
  }
  throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
}

int to_int(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d != static_cast<int>(d)) throw ConfigError("config key '" + key + "': expected an integer");
  return static_cast<int>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config key '" + key + "': expected true/false");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(key, item));
  }
  return out;
}

Mat2 to_mat(const std::string& key, const std::string& v) {
  const auto l = to_list(key, v);
  if (l.size() == 1) return Mat2{l[0], 0.0, 0.0, l[0]};
  if (l.size() != 4) throw ConfigError("config key '" + key + "': expected a11,a12,a21,a22");
  return Mat2{l[0], l[1], l[2], l[3]};
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s;
}

std::string fmt_mat(const Mat2& m) {
  return fmt_list({m.a11, m.a12, m.a21, m.a22});
}

const char* initial_name(InitialData d) {
  switch (d) {
    case InitialData::shear_profile: return "shear_profile";
    case InitialData::taylor_green_like: return "taylor_green_like";
    case InitialData::custom: return "custom";
  }
  return "?";
}

const char* path_name(SolvePath p) {
  switch (p) {
    case SolvePath::automatic: return "auto";
    case SolvePath::oracle: return "oracle";
    case SolvePath::solver: return "solver";
  }
  return "?";
}

}  // namespace

const char* study_kind_name(StudyKind k) {
  switch (k) {
    case StudyKind::uncorrected_rates: return "uncorrected_rates";
    case StudyKind::corrected_rates: return "corrected_rates";
    case StudyKind::corrector_scalings: return "corrector_scalings";
    case StudyKind::uniform_rates: return "uniform_rates";
    case StudyKind::inequality_suite: return "inequality_suite";
    case StudyKind::torus_suite: return "torus_suite";
  }
  return "?";
}

StudyKind parse_study_kind(const std::string& s) {
  for (StudyKind k : {StudyKind::uncorrected_rates, StudyKind::corrected_rates,
                      StudyKind::corrector_scalings, StudyKind::uniform_rates,
                      StudyKind::inequality_suite, StudyKind::torus_suite}) {
    if (s == study_kind_name(k)) return k;
  }
  if (s == "uncorrected") return StudyKind::uncorrected_rates;
  if (s == "corrected") return StudyKind::corrected_rates;
  if (s == "uniform") return StudyKind::uniform_rates;
  throw ConfigError("unknown study kind '" + s + "'");
}

std::map<std::string, std::string> StudyConfig::echo() const {
  std::map<std::string, std::string> m;
  m["kind"] = study_kind_name(kind);
  m["L1"] = fmt(L1);
  m["L2"] = fmt(L2);
  m["h"] = fmt(h);
  m["Nx"] = std::to_string(Nx);
  m["Ny"] = std::to_string(Ny);
  m["Nz"] = std::to_string(Nz);
  m["clustering"] = fmt(clustering);
  m["A_lower"] = fmt_mat(A_lower);
  m["A_upper"] = fmt_mat(A_upper);
  m["eps_list"] = fmt_list(eps_list);
  m["T"] = fmt(T);
  m["snapshots"] = std::to_string(snapshots);
  m["initial_data"] = initial_name(initial);
  m["shear_profile"] = shear_profile;
  m["initial_path"] = initial_path;
  m["forcing"] = forcing == ForcingKind::zero ? "zero" : "custom";
  m["forcing.value"] = fmt_list({forcing_value[0], forcing_value[1], forcing_value[2]});
  m["path"] = path_name(path);
  m["nominal_m"] = std::to_string(nominal_m);
  m["region_a"] = fmt(region_a);
  m["oracle.Nz_fine"] = std::to_string(oracle_Nz_fine);
  m["oracle.steps"] = std::to_string(oracle_steps);
  m["solver.dt"] = fmt(solver_dt);
  m["solver.cfl"] = fmt(solver_cfl);
  m["band"] = fmt(band);
  m["scalings.snapshots"] = std::to_string(scaling_snapshots);
  m["torus.R"] = fmt(torus_R);
  m["torus.r"] = fmt(torus_r);
  m["torus.a"] = fmt(torus_a);
  m["torus.N1"] = std::to_string(torus_N1);
  m["torus.N2"] = std::to_string(torus_N2);
  m["torus.N3"] = std::to_string(torus_N3);
  m["output.json"] = output_json;
  m["output.csv"] = output_csv;
  m["output.plot_csv"] = output_plot_csv;
  m["seed"] = std::to_string(seed);
  m["debug.zero_corrector"] = zero_corrector ? "true" : "false";
  return m;
}

StudyConfig parse_config(const std::string& text) {
  StudyConfig c;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"kind", [&](auto&, auto& v) { c.kind = parse_study_kind(v); }},
      {"L1", [&](auto& k, auto& v) { c.L1 = to_double(k, v); }},
      {"L2", [&](auto& k, auto& v) { c.L2 = to_double(k, v); }},
      {"h", [&](auto& k, auto& v) { c.h = to_double(k, v); }},
      {"Nx", [&](auto& k, auto& v) { c.Nx = to_int(k, v); }},
      {"Ny", [&](auto& k, auto& v) { c.Ny = to_int(k, v); }},
      {"Nz", [&](auto& k, auto& v) { c.Nz = to_int(k, v); }},
      {"clustering", [&](auto& k, auto& v) { c.clustering = to_double(k, v); }},
      {"A_lower", [&](auto& k, auto& v) { c.A_lower = to_mat(k, v); }},
      {"A_upper", [&](auto& k, auto& v) { c.A_upper = to_mat(k, v); }},
      {"A", [&](auto& k, auto& v) { c.A_lower = c.A_upper = to_mat(k, v); }},
      {"eps_list", [&](auto& k, auto& v) { c.eps_list = to_list(k, v); }},
      {"T", [&](auto& k, auto& v) { c.T = to_double(k, v); }},
      {"snapshots", [&](auto& k, auto& v) { c.snapshots = to_int(k, v); }},
      {"initial_data",
       [&](auto&, auto& v) {
         if (v == "shear_profile") c.initial = InitialData::shear_profile;
         else if (v == "taylor_green_like") c.initial = InitialData::taylor_green_like;
         else if (v == "custom") c.initial = InitialData::custom;
         else throw ConfigError("unknown initial_data '" + v + "'");
       }},
      {"shear_profile",
       [&](auto&, auto& v) {
         if (v != "tanh" && v != "compatible" && v != "cos") {
           throw ConfigError("unknown shear_profile '" + v + "'");
         }
         c.shear_profile = v;
       }},
      {"initial_path", [&](auto&, auto& v) { c.initial_path = v; }},
      {"forcing",
       [&](auto&, auto& v) {
         if (v == "zero") c.forcing = ForcingKind::zero;
         else if (v == "custom") c.forcing = ForcingKind::custom;
         else throw ConfigError("unknown forcing '" + v + "'");
       }},
      {"forcing.value",
       [&](auto& k, auto& v) {
         const auto l = to_list(k, v);
         if (l.size() != 3) throw ConfigError("forcing.value needs three components");
         c.forcing_value = {l[0], l[1], l[2]};
       }},
      {"path",
       [&](auto&, auto& v) {
         if (v == "auto") c.path = SolvePath::automatic;
         else if (v == "oracle") c.path = SolvePath::oracle;
         else if (v == "solver") c.path = SolvePath::solver;
         else throw ConfigError("unknown path '" + v + "'");
       }},
      {"nominal_m", [&](auto& k, auto& v) { c.nominal_m = to_int(k, v); }},
      {"region_a", [&](auto& k, auto& v) { c.region_a = to_double(k, v); }},
      {"oracle.Nz_fine", [&](auto& k, auto& v) { c.oracle_Nz_fine = to_int(k, v); }},
      {"oracle.steps", [&](auto& k, auto& v) { c.oracle_steps = to_int(k, v); }},
      {"solver.dt", [&](auto& k, auto& v) { c.solver_dt = to_double(k, v); }},
      {"solver.cfl", [&](auto& k, auto& v) { c.solver_cfl = to_double(k, v); }},
      {"band", [&](auto& k, auto& v) { c.band = to_double(k, v); }},
      {"scalings.snapshots", [&](auto& k, auto& v) { c.scaling_snapshots = to_int(k, v); }},
      {"torus.R", [&](auto& k, auto& v) { c.torus_R = to_double(k, v); }},
      {"torus.r", [&](auto& k, auto& v) { c.torus_r = to_double(k, v); }},
      {"torus.a", [&](auto& k, auto& v) { c.torus_a = to_double(k, v); }},
      {"torus.N1", [&](auto& k, auto& v) { c.torus_N1 = to_int(k, v); }},
      {"torus.N2", [&](auto& k, auto& v) { c.torus_N2 = to_int(k, v); }},
      {"torus.N3", [&](auto& k, auto& v) { c.torus_N3 = to_int(k, v); }},
      {"output.json", [&](auto&, auto& v) { c.output_json = v; }},
      {"output.csv", [&](auto&, auto& v) { c.output_csv = v; }},
      {"output.plot_csv", [&](auto&, auto& v) { c.output_plot_csv = v; }},
      {"seed", [&](auto& k, auto& v) { c.seed = static_cast<std::uint64_t>(to_int(k, v)); }},
      {"debug.zero_corrector", [&](auto& k, auto& v) { c.zero_corrector = to_bool(k, v); }},
  };

  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) {
      throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    it->second(key, value);
  }
  validate_config(c);
  return c;
}

StudyConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate_config(const StudyConfig& c) {
  if (!(c.L1 > 0.0) || !(c.L2 > 0.0) || !(c.h > 0.0)) throw ConfigError("L1, L2, h must be positive");
  if (!(c.T > 0.0)) throw ConfigError("T must be positive");
  if (c.snapshots < 2) throw ConfigError("snapshots must be >= 2");
  const bool needs_eps = c.kind != StudyKind::inequality_suite && c.kind != StudyKind::torus_suite;
  if (needs_eps) {
    if (c.eps_list.empty()) throw ConfigError("eps_list is empty");
    const double cap = (c.h / 8.0) * (c.h / 8.0);
    for (std::size_t i = 0; i < c.eps_list.size(); ++i) {
      if (!(c.eps_list[i] > 0.0)) throw ConfigError("eps_list entries must be positive");
      if (c.eps_list[i] >= cap) {
        throw ConfigError("eps_list entry " + fmt(c.eps_list[i]) + " is not below (h/8)^2 = " + fmt(cap));
      }
      if (i > 0 && !(c.eps_list[i] < c.eps_list[i - 1])) {
        throw ConfigError("eps_list must be strictly decreasing");
      }
    }
  }
  if (c.kind == StudyKind::uniform_rates && c.forcing != ForcingKind::zero) {
    throw ConfigError(
        "uniform_rates requires forcing = zero (the uniform-in-space rates assume f = 0)");
  }
  if (c.initial == InitialData::custom && c.initial_path.empty()) {
    throw ConfigError("initial_data = custom needs initial_path");
  }
  if (c.nominal_m < 2) throw ConfigError("nominal_m must be >= 2");
  if (c.region_a > 0.0 && c.region_a >= c.h / 2.0) throw ConfigError("region_a must be below h/2");
  if (c.oracle_Nz_fine < 9) throw ConfigError("oracle.Nz_fine must be >= 9");
}

}  // namespace navslip
