#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "navslip/diagnostics.hpp"
#include "scenario.hpp"

namespace navslip::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_internal = 1,
  exit_validation = 2,
  exit_picard = 3,
  exit_collision = 4,
  exit_integration = 5,  ///< gap ODE step underflow
};

/// The gap ODE stopped on a step-size underflow before T or contact.
class GapIntegrationFailure : public std::runtime_error {
 public:
  explicit GapIntegrationFailure(const std::string& what);
};

struct RunRequest {
  Mode mode = Mode::simulate;
  std::string scenario_path;
  std::string study;    ///< rates: connect, test-function, rigidify, penalization, all
  std::string test_fn;  ///< check: e.g. "carrier:0.3,0.5,0.4,0.4,0.7+bump:0.4,0.5,0.3"
};

/// Runs one request; never throws. Failures leave <prefix>_error.json in the
/// output directory (NAVSLIP_OUTPUT_DIR overrides the scenario's [output].dir).
int run(const RunRequest& request);

/// RFC 4180 field quoting.
std::string csv_field(std::string_view s);

/// Sum of "bump:cx,cy,radius[,amplitude]" and "carrier:vx,vy,omega,r_in,r_out"
/// terms (the carrier is centered on the solid's initial position), damped to
/// zero at time T.
SpaceTimeTest parse_test_function(const std::string& spec, const Vec2& solid_center, double T);

}  // namespace navslip::cli
