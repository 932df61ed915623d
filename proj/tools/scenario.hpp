#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "navslip/collision.hpp"
#include "navslip/galerkin.hpp"

namespace navslip::cli {

/// Parse or validation error at a position of the scenario text.
class ScenarioError : public InvalidInput {
 public:
  ScenarioError(int line, int column, std::string key, const std::string& message);
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& key() const { return key_; }  ///< "[section].key", or "[section]" / "" for structural errors

 private:
  int line_, column_;
  std::string key_;
};

struct CavitySection {
  double width = 0.0, height = 0.0;
  bool operator==(const CavitySection&) const = default;
};

struct SolidSection {
  double radius = 0.0, rho = 0.0, x = 0.0, y = 0.0;
  double angle = 0.0;
  double vx = 0.0, vy = 0.0;  ///< initial velocity of the solid (fluid at rest); zero means rest
  bool operator==(const SolidSection&) const = default;
};

struct FluidSection {
  double rho = 0.0, mu = 0.0, beta_S = 0.0, beta_Omega = 0.0;
  double g = 0.0;  ///< gravity magnitude, acting along -y
  bool operator==(const FluidSection&) const = default;
};

struct SchemeSection {
  double n = 100.0;
  std::optional<double> delta;  ///< default 0.1 * initial gap, filled in when the geometry is known
  int N = 32;
  double dt = 1e-3;
  double T = 0.0;
  double picard_tol = 1e-10;
  int picard_max_iter = 200;
  double relaxation = 0.7;
  bool operator==(const SchemeSection&) const = default;
};

struct GapOdeSection {
  DragKind law = DragKind::log;
  double kappa = 1.0;
  double h_min = 0.0;
  double h0 = 0.0;
  double hdot0 = 0.0;
  std::optional<double> a;  ///< default from [fluid] / [solid] densities and g
  double T = 0.0;
  double abs_tol = 1e-12, rel_tol = 1e-12;
  double h_contact = 1e-9;
  bool operator==(const GapOdeSection&) const = default;
};

struct OutputSection {
  std::string dir = "out";
  std::string prefix = "run";
  bool operator==(const OutputSection&) const = default;
};

struct Scenario {
  std::optional<CavitySection> cavity;
  std::optional<SolidSection> solid;
  std::optional<FluidSection> fluid;
  std::optional<SchemeSection> scheme;
  std::optional<GapOdeSection> gap_ode;
  OutputSection output;
  bool operator==(const Scenario&) const = default;
};

/// Strict parser: sections and keys must be known, values well formed and
/// within their invariants; duplicates are errors.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::string& path);

/// Canonical text with every default filled in; parse_scenario(dump) == s.
std::string dump_scenario(const Scenario& s);

enum class Mode { simulate, gap_ode, rates, check };
/// Throws InvalidInput naming the first missing section the mode needs.
void require_sections(const Scenario& s, Mode mode);

Cavity make_cavity(const Scenario& s);
SolidShape make_shape(const Scenario& s);
Placement make_placement(const Scenario& s);
SimParams make_params(const Scenario& s);
DragLaw make_drag(const Scenario& s);
GapOdeOptions make_gap_options(const Scenario& s);
double gap_ode_acceleration(const Scenario& s);

}  // namespace navslip::cli
