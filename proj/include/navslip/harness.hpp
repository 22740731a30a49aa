#pragma once

#include <functional>
#include <string>

#include "navslip/config.hpp"
#include "navslip/field.hpp"
#include "navslip/report.hpp"
#include "navslip/solver.hpp"

namespace navslip {

// Worker count for sweeps: NAVSLIP_THREADS if set (>= 1), else hardware threads.
int parallelism();

// Initial data selected by the config.
Profile2 shear_profile_fn(const StudyConfig& c);
// u1 = 0.5 tanh(s)(1 + 0.1 cos kx), u3 = 0.015 k sin(kx)(ln cosh s - ln cosh(h/0.6)),
// s = (z - h/2)/0.3, k = 2 pi / L1; solenoidal with u3 = 0 on the walls.
PointFn taylor_green_like_fn(const StudyConfig& c);

FrictionPair friction_from(const StudyConfig& c);

ConvergenceReport run_uncorrected_rates(const StudyConfig& c);
ConvergenceReport run_corrected_rates(const StudyConfig& c);
ConvergenceReport run_uniform_rates(const StudyConfig& c);
ConvergenceReport run_corrector_scalings(const StudyConfig& c);
// Structural properties of the channel and torus correctors.
ConvergenceReport run_corrector_checks(const StudyConfig& c);
ConvergenceReport run_inequality_suite(const StudyConfig& c);
ConvergenceReport run_torus_suite(const StudyConfig& c);

ConvergenceReport run_study(const StudyConfig& c);

// Writes the outputs named in the config (json, csv, plot csv) when set.
void write_outputs(const ConvergenceReport& r, const StudyConfig& c);

}  // namespace navslip
