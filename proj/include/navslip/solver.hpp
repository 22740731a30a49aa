#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "navslip/corrector.hpp"
#include "navslip/field.hpp"
#include "navslip/geometry.hpp"

namespace navslip {

// Body force f(x,y,z,t); an empty handle means f = 0.
struct Forcing {
  std::function<Vec3(double x, double y, double z, double t)> fn;
  bool is_zero() const { return !fn; }
  static Forcing zero() { return {}; }
};

struct FlowState {
  VectorField u;
  ScalarField p;
  double t = 0.0;
  double epsilon = 0.0;
  FrictionPair A;
};

struct StepDiagnostics {
  double t = 0.0;
  double energy = 0.0;
  double div_max = 0.0;
  double robin_residual = 0.0;
};

struct Trajectory {
  std::vector<FlowState> snapshots;
  double cadence = 0.0;
  double dt = 0.0;
  std::vector<StepDiagnostics> diagnostics;

  std::vector<double> times() const;
};

struct SolverOptions {
  double dt = 0.0;         // 0: from the CFL number at t = 0, then fixed
  double cfl = 0.5;
  double cfl_max = 1.0;    // larger CFL during the run is a step-size error
  int snapshots = 50;      // cadence T/snapshots
  int damping_steps = 4;   // fully implicit start-up steps (viscous runs)
  double blowup_factor = 10.0;
  bool record_diagnostics = true;
};

Trajectory euler_solve(const VectorField& u_init, const Forcing& f, double T,
                       const SolverOptions& opt = {});
Trajectory ns_solve(const VectorField& u_init, const Forcing& f, double epsilon,
                    const FrictionPair& A, double T, const SolverOptions& opt = {});

// Discrete Leray projection used by the solvers (u3 = 0 kept on the walls).
void project_divergence_free(VectorField& u);
// Divergence with the solvers' operators (spectral x,y; summation-by-parts z).
std::vector<double> solver_divergence(const VectorField& u);
// Max over wall nodes of |dz u_i -+ 2 A u| with the solvers' 3-point wall stencil.
double robin_residual(const VectorField& u, const FrictionPair& A);

// One-dimensional reference for x,y-invariant data.
struct ProfileTrajectory {
  double h = 1.0;
  std::vector<double> z;
  std::vector<double> times;
  std::vector<std::vector<double>> u1, u2;
};

struct OracleOptions {
  int steps = 5000;        // rounded up to a multiple of `snapshots`
  int snapshots = 50;
  int damping_steps = 4;   // Rannacher start-up (each = two backward-Euler half steps)
};

using Profile2 = std::function<std::array<double, 2>(double z)>;

ProfileTrajectory shear_flow_oracle(const Profile2& U0, const FrictionPair& A, double epsilon,
                                    double T, double h, int Nz_fine, const OracleOptions& opt = {});

// Samples the oracle (cubic interpolation in z) at snapshot `s` onto a channel grid.
VectorField oracle_on_grid(const ProfileTrajectory& o, std::size_t s, GridPtr grid,
                           FieldRole role = FieldRole::physical);

Trajectory remainder(const Trajectory& u_eps, const Trajectory& u0,
                     const std::vector<CorrectorField>& theta);

struct NonlinearGap {
  VectorField J;
  // J1..J5 paired with w; only filled when a corrector is supplied.
  std::array<double, 5> terms{0.0, 0.0, 0.0, 0.0, 0.0};
  bool has_terms = false;
};
NonlinearGap nonlinear_gap_J(const VectorField& u_eps, const VectorField& u0,
                             const VectorField* theta = nullptr);

// Checkpoint I/O (binary, native little-endian doubles; layout in the README).
void write_checkpoint(const FlowState& s, const std::string& path);
FlowState read_checkpoint(const std::string& path);
void write_diagnostics_csv(const Trajectory& tr, const std::string& path);

}  // namespace navslip
