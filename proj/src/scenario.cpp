#include "towermpc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "towermpc/io.hpp"

namespace towermpc {

CaseKind parse_case(const std::string& s) {
  if (s == "case1") return CaseKind::case1;
  if (s == "case2") return CaseKind::case2;
  if (s == "sweep") return CaseKind::sweep;
  if (s == "bode") return CaseKind::bode;
  if (s == "custom") return CaseKind::custom;
  throw ArgumentError("unknown case '" + s + "'");
}

std::string to_string(CaseKind c) {
  switch (c) {
    case CaseKind::case1: return "case1";
    case CaseKind::case2: return "case2";
    case CaseKind::sweep: return "sweep";
    case CaseKind::bode: return "bode";
    case CaseKind::custom: return "custom";
  }
  return "custom";
}

std::vector<ControllerKind> parse_controllers(const std::string& s) {
  if (s == "baseline") return {ControllerKind::baseline};
  if (s == "qlpv-mpc" || s == "mpc") return {ControllerKind::qlpv_mpc};
  if (s == "both") return {ControllerKind::baseline, ControllerKind::qlpv_mpc};
  throw ArgumentError("unknown controller '" + s + "'");
}

std::string to_string(ControllerKind c) {
  return c == ControllerKind::baseline ? "baseline" : "qlpv-mpc";
}

void ScenarioConfig::validate() const {
  parse_controllers(controller);
  mpc.validate();
  loop.substeps();
  if (std::abs(mpc.ts - loop.ts_mpc) > 1e-12)
    throw ArgumentError("MPC sample time must equal the loop controller step");
  if (!(grid_spacing > 0.0) || !(grid_hi > grid_lo) || !(grid_lo > 0.0))
    throw ArgumentError("invalid grid bounds");
  if (!(custom_wind > 0.0) || !(custom_duration > 0.0))
    throw ArgumentError("custom wind and duration must be positive");
  if (!(turbulent.intensity > 0.0 && turbulent.intensity <= 0.5))
    throw ArgumentError("turbulence intensity must lie in (0, 0.5]");
  if (!(slope.u1 > slope.u0 && slope.u0 > 0.0)) throw ArgumentError("slope wind needs U1 > U0 > 0");
}

std::vector<std::pair<std::string, std::string>> ScenarioConfig::snapshot() const {
  auto f = [](double v) { return format_double(v); };
  return {{"case", to_string(kind)},
          {"controller", controller},
          {"Q", f(mpc.output_weight)},
          {"R", f(mpc.input_weight)},
          {"Np", std::to_string(mpc.horizon)},
          {"jn", std::to_string(mpc.max_iterations)},
          {"epsilon", f(mpc.tolerance)},
          {"torque-scale", f(mpc.torque_scale)},
          {"seed", std::to_string(turbulent.seed)},
          {"intensity", f(turbulent.intensity)},
          {"mean-wind", f(turbulent.mean)},
          {"duration", f(kind == CaseKind::case1   ? slope.duration
                         : kind == CaseKind::custom ? custom_duration
                                                    : turbulent.duration)},
          {"custom-wind", f(custom_wind)},
          {"grid-spacing", f(grid_spacing)},
          {"estimator-gain", f(loop.estimator.wind_gain)},
          {"estimator-smoothing", f(loop.estimator.smoothing)},
          {"iterate-every-step", mpc.iterate_every_step ? "true" : "false"},
          {"out", out_dir.string()}};
}

PlantParams scenario_plant() { return {TowerParams::nominal(), TurbineParams::nominal()}; }

QlpvSetup scenario_setup() { return QlpvSetup::nominal(); }

WindProfile scenario_wind(const ScenarioConfig& cfg) {
  switch (cfg.kind) {
    case CaseKind::case1: return wind_slope(cfg.slope, cfg.loop.ts_plant);
    case CaseKind::case2: return wind_turbulent(cfg.turbulent, cfg.loop.ts_plant);
    case CaseKind::custom: return wind_constant(cfg.custom_wind, cfg.custom_duration, cfg.loop.ts_plant);
    default: throw ArgumentError("case " + to_string(cfg.kind) + " has no wind profile");
  }
}

std::shared_ptr<const ModelGrid> scenario_grid(const ScenarioConfig& cfg) {
  if (!cfg.grid_file.empty()) {
    auto g = std::make_shared<const ModelGrid>(read_grid_csv(cfg.grid_file));
    if (std::abs(g->ts() - cfg.mpc.ts) > 1e-12)
      throw ArgumentError("grid file sampling time differs from the MPC sample time");
    return g;
  }
  return std::make_shared<const ModelGrid>(
      build_default_grid(scenario_setup(), cfg.mpc.ts, cfg.grid_lo, cfg.grid_hi, cfg.grid_spacing));
}

Histogram rotor_speed_histogram(const SimResult& r) {
  std::vector<double> rpm(r.omega_r.size());
  std::transform(r.omega_r.begin(), r.omega_r.end(), rpm.begin(), rad_to_rpm);
  return histogram(rpm, uniform_edges(4.0, 10.0, 120));
}

Histogram amplitude_histogram(const SimResult& r) {
  if (r.a_y.empty()) return histogram({}, uniform_edges(0.0, 1.0, 40));
  const auto [lo, hi] = std::minmax_element(r.a_y.begin(), r.a_y.end());
  const double top = *hi > *lo ? *hi : *lo + 1e-12;
  return histogram(r.a_y, uniform_edges(*lo, top, 40));
}

RunMetrics compute_metrics(const SimResult& r, const TowerParams& tower, double analysis_ts) {
  RunMetrics m;
  if (r.size() < 2) return m;
  const double ts = r.ts();
  m.duration = ts * double(r.size());
  m.energy_kwh = energy_produced(r.power, ts);

  const auto factor = std::max<std::size_t>(1, std::size_t(std::llround(analysis_ts / ts)));
  const std::vector<double> xd = decimate(r.x, factor);
  m.del = damage_equivalent_load(rainflow(xd), 4.0, m.duration).value;
  const double fn = tower.natural_frequency() / (2.0 * std::numbers::pi);
  if (xd.size() >= 2048)
    m.spectrum_peak_db = spectrum_peak_db(power_spectrum(xd, ts * double(factor)), fn);
  else
    m.spectrum_peak_db = std::nan("");

  const double wn = tower.natural_frequency();
  const double hw = rpm_to_rad(0.25);
  m.band_time = time_in_band(r.omega_r, wn, hw, ts);
  const auto cross = crossing_durations(r.omega_r, wn - hw, wn + hw, ts);
  m.crossings = cross.size();
  m.max_crossing = cross.empty() ? 0.0 : *std::max_element(cross.begin(), cross.end());

  const Histogram h = rotor_speed_histogram(r);
  const double crit = rad_to_rpm(wn);
  if (crit >= h.edges.front() && crit <= h.edges.back())
    m.critical_bin_fraction = double(h.counts[h.bin_of(crit)]) / double(h.total());
  m.max_delta_tau = *std::max_element(r.delta_tau.begin(), r.delta_tau.end());
  m.min_delta_tau = *std::min_element(r.delta_tau.begin(), r.delta_tau.end());
  return m;
}

Comparison compare(const RunMetrics& b, const RunMetrics& m) {
  Comparison c;
  c.energy_loss_pct = 100.0 * (b.energy_kwh - m.energy_kwh) / b.energy_kwh;
  c.del_reduction_pct = 100.0 * (b.del - m.del) / b.del;
  c.peak_reduction_db = b.spectrum_peak_db - m.spectrum_peak_db;
  c.band_time_reduction_pct =
      b.band_time > 0.0 ? 100.0 * (b.band_time - m.band_time) / b.band_time : 0.0;
  return c;
}

ScenarioOutcome run_scenario(const ScenarioConfig& cfg, std::shared_ptr<const ModelGrid> grid) {
  cfg.validate();
  const auto kinds = parse_controllers(cfg.controller);
  const WindProfile wind = scenario_wind(cfg);
  const PlantParams plant = scenario_plant();

  ScenarioOutcome out;
  out.runs.resize(kinds.size());
  std::vector<std::exception_ptr> errors(kinds.size());
  const auto n = static_cast<std::ptrdiff_t>(kinds.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      LoopConfig loop = cfg.loop;
      loop.controller = kinds[i];
      std::unique_ptr<QlpvMpcController> ctrl;
      if (kinds[i] == ControllerKind::qlpv_mpc) {
        if (!grid) throw ArgumentError("qLPV-MPC requires a model grid");
        ctrl = std::make_unique<QlpvMpcController>(grid, cfg.mpc);
      }
      ScenarioRun& run = out.runs[i];
      run.controller = kinds[i];
      run.result = run_closed_loop(plant, loop, wind, ctrl.get());
      run.metrics = compute_metrics(run.result, plant.tower);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  if (kinds.size() == 2) out.comparison = compare(out.runs[0].metrics, out.runs[1].metrics);
  return out;
}

std::string summary_text(const ScenarioOutcome& outcome) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3);
  os << "controller,energy[kWh],DEL_x[m],peak[dB],band_time[s],max_crossing[s],crossings,"
        "critical_bin_fraction,dtau_min[N m],dtau_max[N m],aborted\n";
  for (const auto& run : outcome.runs) {
    const RunMetrics& m = run.metrics;
    os << to_string(run.controller) << ',' << m.energy_kwh << ',' << m.del << ','
       << m.spectrum_peak_db << ',' << m.band_time << ',' << m.max_crossing << ',' << m.crossings
       << ',' << m.critical_bin_fraction << ',' << m.min_delta_tau << ',' << m.max_delta_tau << ','
       << (run.result.aborted ? 1 : 0) << '\n';
  }
  if (outcome.comparison) {
    const Comparison& c = *outcome.comparison;
    os << "\nenergy_loss[%]," << c.energy_loss_pct << "\nDEL_reduction[%]," << c.del_reduction_pct
       << "\npeak_reduction[dB]," << c.peak_reduction_db << "\nband_time_reduction[%],"
       << c.band_time_reduction_pct << '\n';
  }
  return os.str();
}

void write_outcome(const ScenarioConfig& cfg, const ScenarioOutcome& outcome) {
  const std::string stem = to_string(cfg.kind);
  for (const auto& run : outcome.runs) {
    const std::string name = stem + "_" + to_string(run.controller);
    write_sim_csv(cfg.out_dir / (name + ".csv"), run.result);
    auto entries = cfg.snapshot();
    for (auto& [k, v] : entries)
      if (k == "controller") v = to_string(run.controller);
    std::map<std::string, std::string> comments = run.result.metadata;
    comments["version"] = TOWERMPC_VERSION;
    comments["aborted"] = run.result.aborted ? "yes" : "no";
    write_metadata(cfg.out_dir / (name + ".meta"), "run", entries, comments);
    write_histogram_csv(cfg.out_dir / (name + "_hist_rpm.csv"), rotor_speed_histogram(run.result));
    write_histogram_csv(cfg.out_dir / (name + "_hist_amp.csv"), amplitude_histogram(run.result));
    const auto factor = std::max<std::size_t>(1, std::size_t(std::llround(0.1 / run.result.ts())));
    write_cycles_csv(cfg.out_dir / (name + "_cycles.csv"), rainflow(decimate(run.result.x, factor)));
  }
  std::ofstream os(cfg.out_dir / (stem + "_summary.csv"));
  if (!os) throw IoError("cannot write summary");
  os << summary_text(outcome);
}

}  // namespace towermpc
