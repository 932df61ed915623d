#include <CLI11.hpp>

#include "run.hpp"

int main(int argc, char** argv) {
  using navslip::cli::Mode;
  CLI::App app{"navslip: rigid disk in a viscous cavity with Navier slip, penalized Galerkin scheme"};
  app.require_subcommand(1);
  navslip::cli::RunRequest req;

  auto* sim = app.add_subcommand("simulate", "run the Galerkin scheme; writes trajectory, ledger and summary");
  sim->add_option("file", req.scenario_path, "scenario file")->required();
  auto* gap = app.add_subcommand("gap-ode", "integrate the reduced gap ODE; writes the gap trajectory and event");
  gap->add_option("file", req.scenario_path, "scenario file")->required();
  auto* rates = app.add_subcommand("rates", "rate studies: connect, test-function, rigidify, penalization, all");
  rates->add_option("study", req.study, "study name")->required();
  rates->add_option("file", req.scenario_path, "scenario file")->required();
  auto* chk = app.add_subcommand("check", "weak and mass residuals of a simulated trajectory");
  chk->add_option("file", req.scenario_path, "scenario file")->required();
  chk->add_option("--test-fn", req.test_fn,
                  "sum of bump:cx,cy,radius[,amplitude] and carrier:vx,vy,omega,r_in,r_out terms")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : navslip::cli::exit_validation;
  }
  if (sim->parsed()) req.mode = Mode::simulate;
  if (gap->parsed()) req.mode = Mode::gap_ode;
  if (rates->parsed()) req.mode = Mode::rates;
  if (chk->parsed()) req.mode = Mode::check;
  return navslip::cli::run(req);
}
