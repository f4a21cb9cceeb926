// Command-line front end: moments, rates, delays, optimization and figure
// bundles for uplink NOMA between mobile users and IoT devices.

#include <CLI11.hpp>

#include <iostream>

#include "anoma/commands.hpp"

namespace {

void add_common(CLI::App* app, anoma::CommonOptions& o, bool engine = true) {
  app->add_option("--config", o.config, "key=value parameter file");
  app->add_option("--seed", o.seed, "master seed");
  app->add_option("--threads", o.threads, "worker cap")->check(CLI::PositiveNumber);
  app->add_option("--out", o.out, "output directory");
  app->add_option("--budget", o.budget, "wall-clock budget in seconds (0 = none)");
  app->add_option("--jm-cache", o.jm_cache, "cache file for the inverse JM-cell area");
  app->add_option("--jm-cells", o.jm_cells, "cells per inverse-area estimate");
  app->add_option("--eps-m", o.eps_m, "override eps_m");
  app->add_option("--eps-t", o.eps_t, "override eps_t");
  app->add_option("--eta", o.eta, "override eta");
  app->add_option("--beta-t-db", o.beta_t_db, "override beta_t (dB)");
  app->add_option("--beta-m-db", o.beta_m_db, "override beta_m (dB)");
  if (engine) {
    app->add_option("--engine", o.engine, "analytic | mc | both")
        ->check(CLI::IsMember({"analytic", "mc", "both"}));
    app->add_option("--n-geo", o.n_geo, "geometries for the simulation engine")
        ->check(CLI::Range(100L, 100000000L));
    app->add_option("--beta-grid", o.beta_grid, "comma-separated thresholds in dB");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Meta-distribution analysis of uplink NOMA with mobile users and IoT devices"};
  app.require_subcommand(1);

  anoma::CommonOptions common;

  anoma::MomentOptions mo;
  auto* moment = app.add_subcommand("moment", "b-th moment of the conditional success probability");
  add_common(moment, common);
  moment->add_option("--device", mo.device)->check(CLI::IsMember({"mobile", "iot"}));
  moment->add_option("--scheme", mo.scheme)->check(CLI::IsMember({"noma", "oma"}));
  moment->add_option("--b", mo.b, "moment order");

  std::string rate_scheme = "both";
  auto* rate = app.add_subcommand("rate", "ergodic rate of the typical mobile user");
  add_common(rate, common);
  rate->add_option("--scheme", rate_scheme)->check(CLI::IsMember({"noma", "oma", "both"}));

  anoma::DelayOptions dopt;
  auto* delay = app.add_subcommand("delay", "mean local delay of the typical IoT device");
  add_common(delay, common);
  delay->add_option("--scheme", dopt.scheme)->check(CLI::IsMember({"noma", "oma", "both"}));
  delay->add_option("--eta-grid", dopt.eta_grid, "comma-separated eta sweep (OMA)");

  anoma::OptimizeOptions oo;
  auto* optimize = app.add_subcommand("optimize", "rate maximization under a delay cap");
  add_common(optimize, common, false);
  optimize->add_option("--scheme", oo.scheme)->check(CLI::IsMember({"noma", "oma", "both"}));
  optimize->add_option("--tau", oo.tau, "delay cap (default: config tau)");
  optimize->add_option("--grid-res", oo.grid_res)->check(CLI::Range(0.01, 0.25));

  std::string figure;
  double repro_res = 0.05;
  auto* reproduce = app.add_subcommand("reproduce", "figure bundle: left, middle or right");
  add_common(reproduce, common);
  reproduce->add_option("figure", figure)->required()->check(
      CLI::IsMember({"left", "middle", "right"}));
  reproduce->add_option("--grid-res", repro_res)->check(CLI::Range(0.01, 0.25));

  long jm_cells = anoma::kDefaultJmCells;
  int jm_points = 100000;
  auto* jm = app.add_subcommand("jm-area", "estimate and cache E[1/|JM cell|]");
  add_common(jm, common, false);
  jm->add_option("--cells", jm_cells)->check(CLI::Range(100L, 100000000L));
  jm->add_option("--test-points", jm_points)->check(CLI::PositiveNumber);

  auto* snapshot = app.add_subcommand("snapshot", "dump one network geometry");
  add_common(snapshot, common, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return anoma::kExitConfig;
  }

  try {
    if (*moment) return anoma::cmd_moment(common, mo);
    if (*rate) return anoma::cmd_rate(common, rate_scheme);
    if (*delay) return anoma::cmd_delay(common, dopt);
    if (*optimize) return anoma::cmd_optimize(common, oo);
    if (*reproduce) return anoma::cmd_reproduce(common, figure, repro_res);
    if (*jm) return anoma::cmd_jm_area(common, jm_cells, jm_points);
    if (*snapshot) return anoma::cmd_snapshot(common);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
