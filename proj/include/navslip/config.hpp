#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "navslip/geometry.hpp"

namespace navslip {

enum class StudyKind {
  uncorrected_rates,
  corrected_rates,
  corrector_scalings,
  uniform_rates,
  inequality_suite,
  torus_suite
};
const char* study_kind_name(StudyKind k);
StudyKind parse_study_kind(const std::string& s);

enum class InitialData { shear_profile, taylor_green_like, custom };
enum class ForcingKind { zero, custom };
// auto: the shear fast path whenever the data are x,y-invariant.
enum class SolvePath { automatic, oracle, solver };

struct StudyConfig {
  StudyKind kind = StudyKind::corrected_rates;

  double L1 = 1.0, L2 = 1.0, h = 1.0;
  int Nx = 4, Ny = 4;
  int Nz = 0;               // 0: oracle grid (fast path) or 129 (solver)
  double clustering = -1.0; // < 0: chosen from the smallest epsilon

  Mat2 A_lower{0.5, 0.0, 0.0, 0.5};
  Mat2 A_upper{0.5, 0.0, 0.0, 0.5};

  std::vector<double> eps_list{1e-2, 3.16e-3, 1e-3, 3.16e-4, 1e-4};
  double T = 0.25;
  int snapshots = 50;

  InitialData initial = InitialData::shear_profile;
  std::string shear_profile = "tanh";  // tanh | compatible | cos
  std::string initial_path;            // checkpoint file for custom data

  ForcingKind forcing = ForcingKind::zero;
  std::array<double, 3> forcing_value{0.0, 0.0, 0.0};

  SolvePath path = SolvePath::automatic;
  int nominal_m = 7;
  double region_a = -1.0;  // < 0: h/8

  int oracle_Nz_fine = 2049;
  int oracle_steps = 5000;
  double solver_dt = 0.0;
  double solver_cfl = 0.5;

  double band = -1.0;  // < 0: kind-specific default
  int scaling_snapshots = 5;

  double torus_R = 2.0, torus_r = 1.0, torus_a = -1.0;  // a < 0: r/4
  int torus_N1 = 32, torus_N2 = 32, torus_N3 = 257;

  std::string output_json, output_csv, output_plot_csv;
  std::uint64_t seed = 0;
  bool zero_corrector = false;

  double effective_region_a() const { return region_a > 0.0 ? region_a : h / 8.0; }
  double effective_torus_a() const { return torus_a > 0.0 ? torus_a : torus_r / 4.0; }
  // Ordered key=value echo, parseable by parse_config.
  std::map<std::string, std::string> echo() const;
};

// Plain-text key=value; '#' starts a comment; unknown keys are errors.
StudyConfig parse_config(const std::string& text);
StudyConfig load_config(const std::string& path);
// Throws ConfigError on inconsistent settings.
void validate_config(const StudyConfig& c);

}  // namespace navslip
