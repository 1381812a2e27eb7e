#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "towermpc/io.hpp"
#include "towermpc/scenario.hpp"
#include "towermpc/verify.hpp"

using namespace towermpc;

namespace {

enum Exit { kOk = 0, kConfig = 1, kRuntime = 2, kVerify = 3 };

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require_file(const std::string& path) {
  if (!path.empty() && !std::filesystem::is_regular_file(path))
    throw ConfigError("grid file not found: " + path);
}

void export_bode(const std::filesystem::path& dir, std::size_t points) {
  const TowerParams tower = TowerParams::nominal();
  const auto omega = log_grid(1e-2, 1e1, points);
  std::vector<std::pair<double, FrequencyResponse>> demod;
  for (double wr : {0.0, 0.5, 1.0}) demod.emplace_back(wr, bode_demod_amplitude(tower, wr, omega));
  write_bode_csv(dir / "bode.csv", bode_nominal(tower, omega), demod);
}

void export_sweep(const std::filesystem::path& dir, std::size_t stride) {
  write_sweep_csv(dir / "sweep.csv", frequency_sweep(TowerParams::nominal()), stride);
}

int cmd_run(ScenarioConfig cfg, const std::string& case_name, bool every_step) {
  try {
    cfg.kind = parse_case(case_name);
    cfg.mpc.iterate_every_step = every_step;
    cfg.validate();
    require_file(cfg.grid_file);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (cfg.kind == CaseKind::bode) {
    export_bode(cfg.out_dir, 500);
    std::cout << "wrote " << (cfg.out_dir / "bode.csv").string() << '\n';
    return kOk;
  }
  if (cfg.kind == CaseKind::sweep) {
    export_sweep(cfg.out_dir, 10);
    std::cout << "wrote " << (cfg.out_dir / "sweep.csv").string() << '\n';
    return kOk;
  }
  const bool needs_grid = cfg.controller != "baseline";
  std::shared_ptr<const ModelGrid> grid;
  if (needs_grid) {
    try {
      grid = scenario_grid(cfg);
    } catch (const IoError& e) {
      throw ConfigError(e.what());
    }
  }
  const ScenarioOutcome outcome = run_scenario(cfg, grid);
  write_outcome(cfg, outcome);
  std::cout << summary_text(outcome);
  for (const auto& r : outcome.runs)
    if (r.result.aborted) {
      std::cerr << to_string(r.controller) << ": " << r.result.metadata.at("abort") << '\n';
      return kRuntime;
    }
  return kOk;
}

int cmd_verify(const VerifyOptions& opts) {
  require_file(opts.grid_file);
  if (!(opts.grid_spacing > 0.0)) throw ConfigError("grid spacing must be positive");
  const auto checks = run_verification(opts);
  bool ok = true;
  for (const auto& c : checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << "  value=" << c.value
              << "  bound=" << c.threshold << "  (" << c.detail << ")\n";
    ok = ok && c.passed;
  }
  return ok ? kOk : kVerify;
}

int cmd_export(const std::string& what, const ScenarioConfig& cfg, std::size_t points,
               std::size_t stride) {
  if (what == "grid") {
    const auto grid = scenario_grid(cfg);
    write_grid_csv(cfg.out_dir / "grid.csv", *grid);
    std::cout << "wrote " << grid->size() << " models to " << (cfg.out_dir / "grid.csv").string()
              << '\n';
  } else if (what == "bode") {
    export_bode(cfg.out_dir, points);
    std::cout << "wrote " << (cfg.out_dir / "bode.csv").string() << '\n';
  } else {
    export_sweep(cfg.out_dir, stride);
    std::cout << "wrote " << (cfg.out_dir / "sweep.csv").string() << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tower-resonance avoidance with qLPV model predictive control"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Config file ([run]/[verify]/[export] sections); flags win");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.fallthrough();

  ScenarioConfig cfg;
  std::string case_name = "case2";
  std::string out_dir = cfg.out_dir.string();
  bool every_step = false;

  auto* run = app.add_subcommand("run", "Closed-loop scenario (case1, case2, custom) or bode/sweep");
  run->add_option("--case", case_name, "case1|case2|sweep|bode|custom")->capture_default_str();
  run->add_option("--controller", cfg.controller, "baseline|qlpv-mpc|both")->capture_default_str();
  run->add_option("--Q", cfg.mpc.output_weight, "Output weight")->capture_default_str();
  run->add_option("--R", cfg.mpc.input_weight, "Input weight")->capture_default_str();
  run->add_option("--Np", cfg.mpc.horizon, "Prediction horizon [steps]")->capture_default_str();
  run->add_option("--jn", cfg.mpc.max_iterations, "Scheduling iterations at start")->capture_default_str();
  run->add_option("--epsilon", cfg.mpc.tolerance, "Scheduling convergence threshold")->capture_default_str();
  run->add_option("--torque-scale", cfg.mpc.torque_scale, "Decision torque unit [N m]")->capture_default_str();
  run->add_flag("--iterate-every-step", every_step, "Full scheduling iteration at every step");
  run->add_option("--seed", cfg.turbulent.seed, "Turbulence seed")->capture_default_str();
  run->add_option("--intensity", cfg.turbulent.intensity, "Turbulence intensity")->capture_default_str();
  run->add_option("--mean-wind", cfg.turbulent.mean, "Case 2 mean wind [m/s]")->capture_default_str();
  auto* duration = run->add_option("--duration", "Scenario length [s]");
  run->add_option("--custom-wind", cfg.custom_wind, "Constant wind for custom [m/s]")->capture_default_str();
  run->add_option("--grid-spacing", cfg.grid_spacing, "Model grid spacing [rad/s]")->capture_default_str();
  run->add_option("--grid", cfg.grid_file, "Load the model grid from CSV");
  run->add_option("--estimator-gain", cfg.loop.estimator.wind_gain, "Wind estimator gain")->capture_default_str();
  run->add_option("--estimator-smoothing", cfg.loop.estimator.smoothing, "Estimate low-pass time constant [s]")->capture_default_str();
  run->add_option("--out", out_dir, "Output directory")->capture_default_str();
  run->fallthrough();
  run->allow_config_extras(CLI::config_extras_mode::error);

  VerifyOptions vopts;
  auto* verify = app.add_subcommand("verify", "Fast verification battery");
  verify->add_option("--grid", vopts.grid_file, "Grid CSV under test");
  verify->add_option("--grid-spacing", vopts.grid_spacing, "Grid spacing under test [rad/s]")->capture_default_str();
  verify->add_option("--seed", vopts.seed, "Random seed")->capture_default_str();
  verify->fallthrough();
  verify->allow_config_extras(CLI::config_extras_mode::error);

  std::string what;
  std::size_t points = 500, stride = 10;
  std::string export_out = "out";
  auto* exp = app.add_subcommand("export", "Write grid, bode or sweep CSV");
  exp->add_option("what", what, "grid|bode|sweep")->required()->check(CLI::IsMember({"grid", "bode", "sweep"}));
  exp->add_option("--grid-spacing", cfg.grid_spacing, "Model grid spacing [rad/s]")->capture_default_str();
  exp->add_option("--points", points, "Bode grid points")->capture_default_str();
  exp->add_option("--stride", stride, "Sweep output decimation")->capture_default_str();
  exp->add_option("--out", export_out, "Output directory")->capture_default_str();
  exp->fallthrough();
  exp->allow_config_extras(CLI::config_extras_mode::error);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (*run) {
      cfg.out_dir = out_dir;
      if (duration->count()) {
        const double d = duration->as<double>();
        cfg.slope.duration = d;
        cfg.turbulent.duration = d;
        cfg.custom_duration = d;
      }
      return cmd_run(cfg, case_name, every_step);
    }
    if (*verify) return cmd_verify(vopts);
    cfg.out_dir = export_out;
    return cmd_export(what, cfg, points, stride);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const ArgumentError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
}
