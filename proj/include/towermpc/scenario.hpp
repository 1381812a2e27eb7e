#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "towermpc/analysis.hpp"
#include "towermpc/closed_loop.hpp"

namespace towermpc {

enum class CaseKind { case1, case2, sweep, bode, custom };

CaseKind parse_case(const std::string& s);        // throws ArgumentError
std::string to_string(CaseKind c);
std::vector<ControllerKind> parse_controllers(const std::string& s);  // baseline|qlpv-mpc|both
std::string to_string(ControllerKind c);

struct ScenarioConfig {
  CaseKind kind = CaseKind::case2;
  std::string controller = "both";
  MpcConfig mpc;
  LoopConfig loop;
  SlopeWind slope;
  TurbulentWind turbulent;
  double custom_wind = 6.5;       // constant wind for the custom case [m/s]
  double custom_duration = 600.0;  // [s]
  double grid_lo = 0.45;          // [rad/s]
  double grid_hi = 1.30;
  double grid_spacing = 0.002;
  std::string grid_file;          // load the grid instead of building it
  std::filesystem::path out_dir = "out";

  void validate() const;  // throws ArgumentError
  /// Flat key/value snapshot; the keys are the CLI option names.
  std::vector<std::pair<std::string, std::string>> snapshot() const;
};

PlantParams scenario_plant();
QlpvSetup scenario_setup();
WindProfile scenario_wind(const ScenarioConfig& cfg);
std::shared_ptr<const ModelGrid> scenario_grid(const ScenarioConfig& cfg);

struct RunMetrics {
  double duration = 0.0;          // [s]
  double energy_kwh = 0.0;
  double del = 0.0;               // displacement DEL, m = 4 [m]
  double spectrum_peak_db = 0.0;  // displacement PSD peak at f_n [dB re m²/Hz]
  double band_time = 0.0;         // time within ±0.25 RPM of ω_n [s]
  double max_crossing = 0.0;      // longest traversal of that band [s]
  std::size_t crossings = 0;
  double critical_bin_fraction = 0.0;  // share of samples in the rotor-speed bin holding ω_n
  double max_delta_tau = 0.0;     // [N m]
  double min_delta_tau = 0.0;
};

struct Comparison {
  double energy_loss_pct = 0.0;
  double del_reduction_pct = 0.0;
  double peak_reduction_db = 0.0;
  double band_time_reduction_pct = 0.0;
};

/// Signals are decimated to `analysis_ts` before spectral and fatigue analysis.
RunMetrics compute_metrics(const SimResult& r, const TowerParams& tower, double analysis_ts = 0.1);
Comparison compare(const RunMetrics& baseline, const RunMetrics& mpc);

Histogram rotor_speed_histogram(const SimResult& r);  // 0.05-RPM bins over [4, 10] RPM
Histogram amplitude_histogram(const SimResult& r);    // 40 bins over the observed range

struct ScenarioRun {
  ControllerKind controller;
  SimResult result;
  RunMetrics metrics;
};

struct ScenarioOutcome {
  std::vector<ScenarioRun> runs;
  std::optional<Comparison> comparison;
};

/// Closed-loop cases only; requested controllers run concurrently.
ScenarioOutcome run_scenario(const ScenarioConfig& cfg, std::shared_ptr<const ModelGrid> grid);

/// Writes SimResult CSVs, metadata sidecars, histograms, cycles and a summary into cfg.out_dir.
void write_outcome(const ScenarioConfig& cfg, const ScenarioOutcome& outcome);

std::string summary_text(const ScenarioOutcome& outcome);

}  // namespace towermpc
