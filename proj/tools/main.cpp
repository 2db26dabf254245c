#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "CLI11.hpp"
#include "velast/config.hpp"
#include "velast/scenario.hpp"

int main(int argc, char** argv) {
  // SOLVER_THREADS caps linear-algebra parallelism (0 = library default).
  // Assembly itself is sequential, which keeps CSV output bit-identical
  // across reruns of the same configuration.
  if (const char* env = std::getenv("SOLVER_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) Eigen::setNbThreads(n);
  }

  CLI::App app{
      "2D finite-element simulator for damped nonlinear elastodynamics "
      "under a global volume constraint with hydraulic pressure"};
  app.require_subcommand(1);

  std::string config_arg;
  double dt_override = 0.0;
  double t_end_override = 0.0;
  std::string out_override;
  CLI::App* solve = app.add_subcommand(
      "solve", "Run a scenario from a config file or a preset name");
  solve
      ->add_option("config", config_arg,
                   "config file path, or one of: equilibrium, beat, crush, "
                   "mms-linear")
      ->required();
  solve->add_option("--dt", dt_override, "override sim.dt");
  solve->add_option("--t-end", t_end_override, "override sim.t_end");
  solve->add_option("--out", out_override, "override output.directory");

  int levels = 3;
  CLI::App* mms = app.add_subcommand(
      "mms", "Convergence table for the manufactured linear solution");
  mms->add_option("--levels", levels, "number of mesh levels (2-5)");

  std::string probe;
  std::vector<double> t_list;
  std::string est_out = ".";
  CLI::App* est =
      app.add_subcommand("estlab", "Desk-scale functional-estimate probes");
  est->add_option("probe", probe, "holder, basic, lipschitz, cofactor or all")
      ->required();
  est->add_option("--T-list", t_list, "horizons for the scaling fits");
  est->add_option("--out", est_out, "directory for CSV reports");

  std::string model;
  CLI::App* chk = app.add_subcommand(
      "checkmat", "Finite-difference consistency suite for one material");
  chk->add_option("model", model, "stvk, fung or ogden")->required();

  CLI11_PARSE(app, argc, argv);

  if (solve->parsed()) {
    try {
      velast::RunConfig cfg = velast::is_preset(config_arg)
                                  ? velast::preset_config(config_arg)
                                  : velast::parse_config(config_arg);
      if (solve->count("--dt")) {
        cfg.sim.dt = dt_override;
        cfg.sim.dt_min = std::min(cfg.sim.dt_min, cfg.sim.dt);
      }
      if (solve->count("--t-end")) cfg.sim.t_end = t_end_override;
      if (solve->count("--out")) cfg.output.directory = out_override;
      return velast::run_scenario(cfg, std::cout);
    } catch (const std::exception& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 1;
    }
  }
  if (mms->parsed()) return velast::run_mms(levels, std::cout);
  if (est->parsed())
    return velast::run_estlab(probe, t_list, est_out, std::cout);
  if (chk->parsed()) return velast::run_checkmat(model, std::cout);
  return 1;
}
