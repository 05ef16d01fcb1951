// feedersim command-line tool.
//
//   feedersim run      solve one scenario and print the voltage profile
//   feedersim sweep    run the scheme x K x scale x realization study
//   feedersim validate cross-check the Newton solver against the references
//
// All subcommands accept --config <file>; flags override file values.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "feedersim/config_io.hpp"
#include "feedersim/metrics.hpp"
#include "feedersim/svg.hpp"
#include "feedersim/sweep.hpp"
#include "feedersim/validation.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  feedersim::SweepConfig load() const {
    return config_path.empty() ? feedersim::SweepConfig{}
                               : feedersim::load_sweep_config(config_path);
  }
};

int cmd_run(const CommonArgs& common, const std::string& scheme_name, double k, double scale,
            const std::string& case_str, std::uint64_t seed, bool seed_set, bool mean_load,
            bool verbose) {
  feedersim::SweepConfig cfg = common.load();
  if (seed_set) cfg.master_seed = seed;
  if (mean_load) cfg.mean_load_mode = true;

  const feedersim::FeederModel model = feedersim::build_feeder(cfg.feeder);
  const feedersim::CaseKind kind = case_str == "over" ? feedersim::CaseKind::Overgenerated
                                                      : feedersim::CaseKind::Undergenerated;
  const feedersim::Scenario scenario =
      cfg.mean_load_mode
          ? feedersim::mean_load_scenario(model, kind, cfg.penetration, cfg.master_seed,
                                          cfg.scenario)
          : feedersim::sample_scenario(model, kind, cfg.penetration, cfg.master_seed,
                                       cfg.scenario);

  feedersim::ControlConfig control;
  control.scheme = feedersim::scheme_from_name(scheme_name);
  control.k = k;
  control.delta = cfg.delta;
  control.limit_scale = scale;

  const feedersim::AcState state = feedersim::solve_ac(model, scenario, control, cfg.solver);

  feedersim::ControlConfig none;
  const feedersim::AcState base = control.scheme == feedersim::Scheme::NoControl
                                      ? state
                                      : feedersim::solve_ac(model, scenario, none, cfg.solver);
  const feedersim::CaseMetrics cm = feedersim::case_metrics(state, base.loss_w);

  std::printf("# %s case, scheme=%s k=%g scale=%g seed=%llu%s\n", feedersim::case_name(kind),
              scheme_name.c_str(), k, scale, static_cast<unsigned long long>(scenario.seed),
              cfg.mean_load_mode ? " (mean-load)" : "");
  std::printf("# converged in %d iterations, max mismatch %.3e pu\n", state.iterations,
              state.max_mismatch);
  std::printf("bus,v_pu,angle_rad,q_g_pu\n");
  const int stride = verbose ? 1 : std::max(1, model.n_buses() / 25);
  for (int i = 0; i < model.n_buses(); i += stride)
    std::printf("%d,%.9f,%.9e,%.9e\n", i, state.v_mag[i], state.v_ang[i], state.q_g[i]);
  if ((model.n_buses() - 1) % stride != 0) {
    const int i = model.n_buses() - 1;
    std::printf("%d,%.9f,%.9e,%.9e\n", i, state.v_mag[i], state.v_ang[i], state.q_g[i]);
  }
  std::printf("# max_dev_above=%.6f pu  max_dev_below=%.6f pu  loss=%.1f W  loss_rel=%.4f\n",
              cm.max_dev_above, cm.max_dev_below, cm.loss_w, cm.loss_rel);
  return 0;
}

int cmd_sweep(const CommonArgs& common, std::uint64_t seed, bool seed_set, int realizations,
              bool mean_load, const std::string& out_dir) {
  feedersim::SweepConfig cfg = common.load();
  if (seed_set) cfg.master_seed = seed;
  if (realizations > 0) cfg.realizations = realizations;
  if (mean_load) cfg.mean_load_mode = true;
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  cfg.validate();

  std::filesystem::create_directories(cfg.out_dir);
  const feedersim::SweepResult result = feedersim::run_sweep(cfg);

  const std::string cases_path = cfg.out_dir + "/cases.csv";
  const std::string frontier_path = cfg.out_dir + "/frontier.csv";
  const std::string svg_path = cfg.out_dir + "/frontier.svg";
  feedersim::emit_csv(result, cases_path, frontier_path);
  feedersim::emit_frontier_svg(result.frontier, svg_path);

  std::printf("sweep: %zu case rows, %zu frontier points, %d failed solves\n", result.rows.size(),
              result.frontier.size(), result.failures);
  for (const feedersim::CaseRow& row : result.rows)
    if (!row.ok)
      std::fprintf(stderr, "FAILED %s k=%g scale=%g seed=%llu %s: %s\n", row.scheme.c_str(),
                   row.k, row.scale, static_cast<unsigned long long>(row.seed),
                   feedersim::case_name(row.kind), row.error.c_str());
  std::printf("wrote %s, %s, %s\n", cases_path.c_str(), frontier_path.c_str(), svg_path.c_str());
  return result.failures == 0 ? 0 : 1;
}

int cmd_validate(double tolerance) {
  const std::vector<feedersim::ValidationCheck> checks =
      feedersim::run_solver_validation(tolerance);
  int failed = 0;
  for (const feedersim::ValidationCheck& c : checks) {
    if (!c.error.empty()) {
      std::printf("FAIL %-42s error: %s\n", c.name.c_str(), c.error.c_str());
      ++failed;
    } else {
      std::printf("%s %-42s max |dV| = %.3e (tol %.1e)\n", c.pass ? "PASS" : "FAIL",
                  c.name.c_str(), c.max_err, c.tolerance);
      if (!c.pass) ++failed;
    }
  }
  std::printf("validate: %zu checks, %d failed\n", checks.size(), failed);
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"radial feeder volt/VAR control simulator"};
  app.require_subcommand(1);

  CommonArgs common;

  auto* run = app.add_subcommand("run", "solve a single scenario and print the voltage profile");
  std::string run_scheme = "no_control", run_case = "under";
  double run_k = 1.0, run_scale = 1.0;
  std::uint64_t run_seed = 0;
  bool run_mean = false, run_verbose = false;
  run->add_option("--config", common.config_path, "JSON config file");
  run->add_option("--scheme", run_scheme, "no_control|sigmoid_v|local_flow|hybrid");
  run->add_option("--k", run_k, "trade-off parameter K in [0,1]")->check(CLI::Range(0.0, 1.0));
  run->add_option("--scale", run_scale, "reactive limit scale in (0,1]");
  run->add_option("--case", run_case, "under|over")
      ->check(CLI::IsMember({"under", "over"}));
  auto* run_seed_opt = run->add_option("--seed", run_seed, "scenario seed");
  run->add_flag("--mean-load", run_mean, "deterministic mean-load scenario");
  run->add_flag("--verbose", run_verbose, "print every bus instead of a condensed profile");

  auto* sweep = app.add_subcommand("sweep", "run the full scheme/K/scale/realization study");
  std::uint64_t sweep_seed = 0;
  int sweep_realizations = 0;
  bool sweep_mean = false;
  std::string sweep_out;
  sweep->add_option("--config", common.config_path, "JSON config file");
  auto* sweep_seed_opt = sweep->add_option("--seed", sweep_seed, "master seed");
  sweep->add_option("--realizations", sweep_realizations, "number of realizations");
  sweep->add_flag("--mean-load", sweep_mean, "deterministic mean-load scenarios");
  sweep->add_option("--out-dir", sweep_out, "output directory for cases.csv/frontier.csv/svg");

  auto* validate = app.add_subcommand("validate", "cross-check solvers against the references");
  double val_tol = 1e-6;
  validate->add_option("--tolerance", val_tol, "max allowed |dV| between solvers (pu)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return cmd_run(common, run_scheme, run_k, run_scale, run_case, run_seed,
                     run_seed_opt->count() > 0, run_mean, run_verbose);
    if (sweep->parsed())
      return cmd_sweep(common, sweep_seed, sweep_seed_opt->count() > 0, sweep_realizations,
                       sweep_mean, sweep_out);
    if (validate->parsed()) return cmd_validate(val_tol);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
