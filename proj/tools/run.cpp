#include "run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "navslip/collision.hpp"

namespace navslip::cli {

using nlohmann::json;
namespace fs = std::filesystem;

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string o = "\"";
  for (char c : s) {
    if (c == '"') o += '"';
    o += c;
  }
  return o + "\"";
}

namespace {

std::string num(double v) { return fmt::format("{:.17g}", v); }

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

class Output {
 public:
  Output(std::string dir, std::string prefix) : dir_(std::move(dir)), prefix_(std::move(prefix)) {
    if (const char* env = std::getenv("NAVSLIP_OUTPUT_DIR"); env && *env) dir_ = env;
  }
  fs::path path(const std::string& name) const { return fs::path(dir_) / (prefix_ + "_" + name); }
  void write(const std::string& name, const std::string& content) const {
    fs::create_directories(dir_);
    std::ofstream out(path(name), std::ios::binary);
    if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path(name).string()));
    out << content;
  }
  void write_json(const std::string& name, const json& j) const { write(name, j.dump(2) + "\n"); }
  void csv(const std::string& name, const std::vector<std::string>& header,
           const std::vector<std::vector<std::string>>& rows) const {
    std::string o;
    auto line = [&o](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) o += (i ? "," : "") + csv_field(cells[i]);
      o += "\r\n";
    };
    line(header);
    for (const auto& r : rows) line(r);
    write(name, o);
  }

 private:
  std::string dir_, prefix_;
};

json ledger_json(const EnergyLedger& l) {
  return {{"kinetic", l.kinetic},     {"viscous", l.viscous},
          {"wall_slip", l.wall_slip}, {"interface_slip", l.interface_slip},
          {"penalization", l.penalization}, {"gravity_work", l.gravity_work}};
}

json rate_json(const RateStudy& s) {
  return {{"name", s.name},         {"parameter_name", s.parameter_name}, {"parameter", s.parameter},
          {"value", s.value},       {"slope", s.slope},                   {"expected", s.expected},
          {"lower", nullable(s.lower)}, {"upper", nullable(s.upper)},     {"pass", s.pass()}};
}

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::completed:
      return "completed";
    case Termination::collision_approach:
      return "collision_approach";
    case Termination::picard_failure:
      return "picard_failure";
  }
  return "?";
}

Eigen::VectorXd initial_alpha(const GalerkinModel& model, const Scenario& s) {
  const Vec2 v(s.solid->vx, s.solid->vy);
  if (v.isZero()) return rest_coefficients(model.basis());
  return solid_translation_coefficients(model.basis(), make_placement(s), make_shape(s), v);
}

void write_trajectory(const Output& out, const Trajectory& tr) {
  std::vector<std::vector<std::string>> rows, ledger;
  for (const auto& r : tr.steps) {
    const auto& st = r.state;
    rows.push_back({num(st.t), num(st.placement.center.x()), num(st.placement.center.y()), num(st.placement.angle),
                    num(st.rigid.V.x()), num(st.rigid.V.y()), num(st.rigid.omega), num(r.gap),
                    num(r.penalty_defect), num(r.flux_norm), num(r.numerical_slack),
                    std::to_string(r.picard_iterations)});
    const auto& l = r.ledger;
    ledger.push_back({num(st.t), num(l.kinetic), num(l.viscous), num(l.wall_slip), num(l.interface_slip),
                      num(l.penalization), num(l.gravity_work)});
  }
  out.csv("trajectory.csv",
          {"t [s]", "x [m]", "y [m]", "angle [rad]", "V_x [m/s]", "V_y [m/s]", "omega [rad/s]", "gap [m]",
           "penalty_defect [m^4/s^2]", "flux_norm [m^1.5/s]", "numerical_slack [J/m]", "picard_iterations [1]"},
          rows);
  out.csv("ledger.csv",
          {"t [s]", "kinetic [J/m]", "viscous [W/m]", "wall_slip [W/m]", "interface_slip [W/m]",
           "penalization [W/m]", "gravity_work [W/m]"},
          ledger);
}

json simulation_summary(const Trajectory& tr, double delta) {
  const auto er = energy_report(tr);
  double max_ke = 0.0;
  for (const auto& r : tr.steps) max_ke = std::max(max_ke, r.ledger.kinetic);
  json event = nullptr;
  const auto ce = contact_time(tr, delta);
  if (ce.event || tr.termination == Termination::collision_approach) {
    event = {{"time", tr.event_time},
             {"gap", tr.event_gap},
             {"guard", 2.0 * delta},
             {"guard_time", ce.guard_time},
             {"bracket", {ce.bracket_lo, ce.bracket_hi}},
             {"extrapolated_contact", ce.extrapolated ? json(*ce.extrapolated) : json(nullptr)}};
  }
  const bool at_rest = !(tr.steps.front().ledger.kinetic > 0.0);
  return {{"mode", "simulate"},
          {"termination", termination_name(tr.termination)},
          {"message", tr.message},
          {"steps", tr.steps.size() - 1},
          {"t_final", tr.steps.back().state.t},
          {"final_gap", tr.steps.back().gap},
          {"max_kinetic", max_ke},
          {"penalty_norm", penalty_norm(tr)},
          {"slip_flux_integral", slip_flux_integral(tr)},
          // a disk starting at rest has no meaningful kinetic bound
          {"horizon", at_rest ? json(nullptr) : json(tr.horizon)},
          {"velocity_bound", at_rest ? json(nullptr) : json(tr.velocity_bound)},
          {"energy",
           {{"holds", er.holds},
            {"tolerance", er.tolerance},
            {"final_slack", er.final_slack},
            {"min_slack", er.min_slack},
            {"final", ledger_json(tr.steps.back().ledger)}}},
          {"event", event},
          {"picard_history", tr.picard_history}};
}

int simulate(const Scenario& s, const Output& out) {
  const SimParams p = make_params(s);
  const GalerkinModel model(make_cavity(s), make_shape(s), p);
  const auto tr = run_simulation(model, make_placement(s), initial_alpha(model, s), s.scheme->T);
  write_trajectory(out, tr);
  const json summary = simulation_summary(tr, p.delta);
  out.write_json("summary.json", summary);
  std::cout << fmt::format("simulate: {} after {} steps (t = {:.6g}), max kinetic energy {:.3e}\n",
                           termination_name(tr.termination), tr.steps.size() - 1, tr.steps.back().state.t,
                           summary["max_kinetic"].get<double>());
  if (tr.termination == Termination::collision_approach) throw CollisionApproach(tr.message, tr.event_time, tr.event_gap);
  if (tr.termination == Termination::picard_failure) throw PicardFailure(tr.message, tr.picard_history);
  return exit_ok;
}

int gap_ode(const Scenario& s, const Output& out) {
  const auto& g = *s.gap_ode;
  const double a = gap_ode_acceleration(s);
  const auto r = integrate_gap_ode({0.0, g.h0, g.hdot0}, make_drag(s), a, g.T, make_gap_options(s));
  std::vector<std::vector<std::string>> rows;
  for (const auto& x : r.samples) rows.push_back({num(x.t), num(x.h), num(x.hdot)});
  out.csv("gap.csv", {"t [s]", "h [m]", "hdot [m/s]"}, rows);
  out.write_json("gap_event.json",
                 {{"mode", "gap-ode"},
                  {"outcome", to_string(r.outcome)},
                  {"contact_time", r.contact_time ? json(*r.contact_time) : json(nullptr)},
                  {"min_h", r.min_h},
                  {"steps", r.steps},
                  {"law", to_string(g.law)},
                  {"kappa", g.kappa},
                  {"a", a},
                  {"h0", g.h0},
                  {"hdot0", g.hdot0},
                  {"T", g.T},
                  {"h_contact", g.h_contact},
                  {"message", r.message}});
  std::cout << fmt::format("gap-ode: {} (min h {:.6e}{})\n", to_string(r.outcome), r.min_h,
                           r.contact_time ? fmt::format(", contact at t = {:.12g}", *r.contact_time) : "");
  if (r.outcome == GapOutcome::underflow) throw GapIntegrationFailure(r.message);
  return exit_ok;
}

int rates(const Scenario& s, const std::string& study, const Output& out) {
  static const std::vector<std::string> known{"connect", "test-function", "rigidify", "penalization", "all"};
  if (std::find(known.begin(), known.end(), study) == known.end())
    throw InvalidInput(fmt::format("unknown study '{}' (expected connect, test-function, rigidify, penalization, all)",
                                   study));
  std::vector<RateStudy> results;
  const bool all = study == "all";
  if (all || study == "connect") results.push_back(connect_rate_study());
  if (all || study == "test-function")
    for (auto& r : test_function_rate_study()) results.push_back(r);
  if (all || study == "rigidify") results.push_back(rigidify_rate_study());
  if (all || study == "penalization") {
    require_sections(s, Mode::rates);
    PenalizationScenario sc;
    sc.cavity = make_cavity(s);
    sc.shape = make_shape(s);
    sc.params = make_params(s);
    sc.start = make_placement(s);
    sc.T_end = s.scheme->T;
    for (auto& r : penalization_rate_study(sc)) results.push_back(r);
  }
  json arr = json::array();
  for (const auto& r : results) {
    arr.push_back(rate_json(r));
    std::cout << fmt::format("rates: {:<18} slope {:+.4f}  expected {:+.4f}  {}\n", r.name, r.slope, r.expected,
                             r.pass() ? "within band" : "outside band");
  }
  out.write_json("rates_" + study + ".json", {{"mode", "rates"}, {"study", study}, {"results", arr}});
  return exit_ok;
}

int check(const Scenario& s, const std::string& spec, const Output& out) {
  const SimParams p = make_params(s);
  const GalerkinModel model(make_cavity(s), make_shape(s), p);
  const Placement start = make_placement(s);
  const double T = s.scheme->T;
  const auto tf = parse_test_function(spec, start.center, T);
  const auto tr = run_simulation(model, start, initial_alpha(model, s), T);
  const double trace_tol = 1e-8;
  const auto rep = weak_residual(model, tr, tf, trace_tol);
  // mass test: Psi = (1 - t/T)^2 (1 + |x - x_0|^2)
  ScalarTest psi;
  const Vec2 c = start.center;
  psi.value = [=](double t, const Vec2& x) { return std::pow(1 - t / T, 2) * (1 + (x - c).squaredNorm()); };
  psi.dt = [=](double t, const Vec2& x) { return -2.0 / T * (1 - t / T) * (1 + (x - c).squaredNorm()); };
  psi.grad = [=](double t, const Vec2& x) { return Vec2(std::pow(1 - t / T, 2) * 2.0 * (x - c)); };
  const double mass = mass_residual(tr, model.shape(), psi, p.solid_order);
  const auto& t = rep.terms;
  out.write_json("check.json",
                 {{"mode", "check"},
                  {"test_function", spec},
                  {"termination", termination_name(tr.termination)},
                  {"t_final", tr.steps.back().state.t},
                  {"residual", rep.residual},
                  {"terms",
                   {{"time_fluid", t.time_fluid},
                    {"time_solid", t.time_solid},
                    {"convection", t.convection},
                    {"viscous", t.viscous},
                    {"wall_slip", t.wall_slip},
                    {"interface_slip", t.interface_slip},
                    {"gravity", t.gravity},
                    {"initial", t.initial}}},
                  {"trace_defect", rep.trace_defect},
                  {"mass_residual", mass},
                  {"metadata",
                   {{"samples", rep.samples},
                    {"dt", p.dt},
                    {"cavity_points", rep.cavity_points},
                    {"solid_order", rep.solid_order},
                    {"trace_tol", trace_tol}}}});
  std::cout << fmt::format("check: weak residual {:.6e}, mass residual {:.6e}\n", rep.residual, mass);
  return exit_ok;
}

json error_json(const char* kind, int code, const std::string& message) {
  return {{"status", "error"}, {"kind", kind}, {"exit_code", code}, {"message", message}};
}

}  // namespace

GapIntegrationFailure::GapIntegrationFailure(const std::string& what) : std::runtime_error(what) {}

SpaceTimeTest parse_test_function(const std::string& spec, const Vec2& center, double T) {
  if (spec.empty()) throw InvalidInput("--test-fn: empty specification");
  std::optional<SpaceTimeTest> sum;
  std::stringstream terms(spec);
  std::string term;
  while (std::getline(terms, term, '+')) {
    const auto colon = term.find(':');
    if (colon == std::string::npos) throw InvalidInput(fmt::format("--test-fn: '{}' lacks 'kind:'", term));
    const std::string kind = term.substr(0, colon);
    std::vector<double> v;
    std::stringstream args(term.substr(colon + 1));
    std::string a;
    while (std::getline(args, a, ',')) {
      std::size_t used = 0;
      double x = 0.0;
      try {
        x = std::stod(a, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != a.size() || !std::isfinite(x))
        throw InvalidInput(fmt::format("--test-fn: '{}' is not a number in '{}'", a, term));
      v.push_back(x);
    }
    SpaceTimeTest t;
    if (kind == "bump" && (v.size() == 3 || v.size() == 4)) {
      t = bump_test({v[0], v[1]}, v[2], T, v.size() == 4 ? v[3] : 1.0);
    } else if (kind == "carrier" && v.size() == 5) {
      t = carrier_test(RigidField{{v[0], v[1]}, v[2], center}, v[3], v[4], T);
    } else {
      throw InvalidInput(fmt::format(
          "--test-fn: '{}' must be bump:cx,cy,radius[,amplitude] or carrier:vx,vy,omega,r_in,r_out", term));
    }
    sum = sum ? *sum + t : t;
  }
  return *sum;
}

int run(const RunRequest& req) {
  Output out("out", "run");
  try {
    const Scenario s = load_scenario(req.scenario_path);
    out = Output(s.output.dir, s.output.prefix);
    // rates checks its own needs: only the penalization sweep uses the physical sections
    if (req.mode != Mode::rates) require_sections(s, req.mode);
    out.write("scenario.ini", dump_scenario(s));
    switch (req.mode) {
      case Mode::simulate:
        return simulate(s, out);
      case Mode::gap_ode:
        return gap_ode(s, out);
      case Mode::rates:
        return rates(s, req.study, out);
      case Mode::check:
        return check(s, req.test_fn, out);
    }
    return exit_internal;
  } catch (const ScenarioError& e) {
    json j = error_json("validation", exit_validation, e.what());
    j["line"] = e.line();
    j["column"] = e.column();
    j["key"] = e.key();
    std::cerr << "error: " << e.what() << "\n";
    try {
      out.write_json("error.json", j);
    } catch (...) {
    }
    return exit_validation;
  } catch (const std::exception& e) {
    int code = exit_internal;
    const char* kind = "internal";
    json extra = json::object();
    if (const auto* c = dynamic_cast<const CollisionApproach*>(&e)) {
      code = exit_collision;
      kind = "collision_approach";
      extra = {{"time", c->time()}, {"gap", c->gap()}};
    } else if (const auto* p = dynamic_cast<const PicardFailure*>(&e)) {
      code = exit_picard;
      kind = "picard_failure";
      extra = {{"history", p->history()}};
    } else if (dynamic_cast<const GapIntegrationFailure*>(&e)) {
      code = exit_integration;
      kind = "integration_failure";
    } else if (const auto* d = dynamic_cast<const IncompatibleData*>(&e)) {
      code = exit_validation;
      kind = "validation";
      extra = {{"defect", d->defect()}};
    } else if (dynamic_cast<const InvalidInput*>(&e)) {
      code = exit_validation;
      kind = "validation";
    } else if (dynamic_cast<const ConvergenceFailure*>(&e)) {
      code = exit_picard;
      kind = "picard_failure";
    }
    std::cerr << "error (" << kind << "): " << e.what() << "\n";
    json j = error_json(kind, code, e.what());
    if (!extra.empty()) j["event"] = extra;
    try {
      out.write_json("error.json", j);
    } catch (...) {
    }
    return code;
  }
}

}  // namespace navslip::cli
