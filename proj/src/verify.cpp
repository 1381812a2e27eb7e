#include "towermpc/verify.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <sstream>
#include <Eigen/Eigenvalues>

#include "towermpc/analysis.hpp"
#include "towermpc/io.hpp"
#include "towermpc/plant.hpp"
#include "towermpc/prediction.hpp"

namespace towermpc {

namespace {

std::vector<std::complex<double>> sorted(std::vector<std::complex<double>> v) {
  std::sort(v.begin(), v.end(), [](auto a, auto b) {
    return a.imag() != b.imag() ? a.imag() < b.imag() : a.real() < b.real();
  });
  return v;
}

double speed_at(int i, int points) { return 1.2 * double(i) / double(points - 1); }

}  // namespace

double eigen_shift_error(const TowerParams& p, int points) {
  const NominalTowerSystem g = nominal_tower_system(p);
  const Eigen::Vector2cd lg = Eigen::EigenSolver<Mat2>(g.A).eigenvalues();
  double worst = 0.0;
  for (int i = 0; i < points; ++i) {
    const double w = speed_at(i, points);
    const Eigen::Vector4cd lh = Eigen::EigenSolver<Mat4>(demod_tower_system(p, w).A).eigenvalues();
    std::vector<std::complex<double>> expect, got(lh.data(), lh.data() + 4);
    for (int k = 0; k < 2; ++k)
      for (double sgn : {1.0, -1.0}) expect.push_back(lg[k] + std::complex<double>(0.0, sgn * w));
    const auto a = sorted(expect), b = sorted(got);
    for (std::size_t k = 0; k < 4; ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
  }
  return worst;
}

double dc_mapping_error(const TowerParams& p, int points) {
  double worst = 0.0;
  for (int i = 0; i < points; ++i) {
    const double w = speed_at(i, points);
    const double a = response_amplitude(demod_steady_state(p, w));
    const double g = std::abs(displacement_response(p, w));
    worst = std::max(worst, std::abs(a - g) / g);
  }
  return worst;
}

double prediction_oracle_error(const ModelGrid& grid, int draws, int horizon, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pdist(grid.p_min(), grid.p_max());
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double worst = 0.0;
  for (int d = 0; d < draws; ++d) {
    const double p_now = pdist(rng);
    SchedulingSequence sched;
    for (int i = 0; i < horizon; ++i) sched.points.push_back(pdist(rng));
    const LinearModel& m = grid.nearest(p_now);
    Vec5 x = m.x_off;
    for (int k = 0; k < 4; ++k) x[k] += 0.5 * unit(rng) * (std::abs(m.x_off[k]) + 0.1);
    x[4] += 0.02 * unit(rng);
    Eigen::VectorXd u(2 * horizon);
    for (int i = 0; i < horizon; ++i) {
      u[2 * i] = m.u_off[0] + unit(rng);
      u[2 * i + 1] = 2.0e4 * unit(rng);
    }
    const PredictionBundle b = build_prediction_bundle(grid, p_now, sched);
    const Eigen::VectorXd y = propagate_output(b, x, u);
    const Eigen::VectorXd ref = simulate_frozen_schedule(grid, p_now, sched, x, u);
    worst = std::max(worst, (y - ref).cwiseAbs().maxCoeff());
  }
  return worst;
}

double sweep_tracking_error(const TowerParams& p) {
  const SweepResult s = frequency_sweep(p, 1e-3, 1200.0, 0.01);
  double worst = 0.0;
  for (std::size_t i = 0; i < s.peak_t.size(); ++i) {
    if (s.peak_omega[i] < 0.2 || s.peak_omega[i] > 1.2) continue;
    worst = std::max(worst, std::abs(s.peak_a_y[i] - s.peak_x[i]) / s.peak_x[i]);
  }
  return worst;
}

double grid_refinement_error(const QlpvSetup& setup, const ModelGrid& coarse, std::uint64_t seed) {
  // Refined grid: midpoints inserted between every pair of neighbouring coarse models.
  std::vector<double> winds;
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    winds.push_back(setup.wind_at(coarse[i].p));
    if (i + 1 < coarse.size()) winds.push_back(setup.wind_at(0.5 * (coarse[i].p + coarse[i + 1].p)));
  }
  const ModelGrid fine = build_model_grid(setup, winds, coarse.ts());

  TurbulentWind tw;
  tw.seed = seed;
  tw.duration = 1000.0;
  const WindProfile w = wind_turbulent(tw, coarse.ts());
  const std::vector<double> zero(w.size(), 0.0);
  const Vec5 x0 = steady_state_operating_point(setup, w.U.front()).x_off;
  const auto a = simulate_qlpv(coarse, x0, w.U, zero);
  const auto b = simulate_qlpv(fine, x0, w.U, zero);
  std::vector<double> diff(a.outputs.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = a.outputs[i] - b.outputs[i];
  return rms(diff) / rms(b.outputs);
}

std::vector<CheckResult> run_verification(const VerifyOptions& opts) {
  const TowerParams tower = TowerParams::nominal();
  const QlpvSetup setup = QlpvSetup::nominal();
  std::vector<CheckResult> out;
  auto add = [&](std::string name, double value, double threshold, std::string detail) {
    out.push_back({std::move(name), value <= threshold, value, threshold, std::move(detail)});
  };

  add("eigen-shift", eigen_shift_error(tower), 1e-9, "max |λ(A_h) − (λ(A_g) ± jω_r)|");
  add("dc-mapping", dc_mapping_error(tower), 1e-9, "max relative |a_y − |G(jω_r)||");

  const ModelGrid grid = opts.grid_file.empty()
                             ? build_default_grid(setup, 1.0, 0.45, 1.30, opts.grid_spacing)
                             : read_grid_csv(opts.grid_file);
  add("prediction-oracle", prediction_oracle_error(grid, 100, 25, opts.seed), 1e-10,
      "max |bundle − stepwise| over 100 schedules, Np = 25");
  add("sweep", sweep_tracking_error(tower), 0.05, "max relative envelope mismatch, ω_r in [0.2, 1.2]");
  std::ostringstream d;
  d << "relative RMS change on halving spacing (" << grid.size() << " models)";
  add("grid-refinement", grid_refinement_error(setup, grid, opts.seed), 5e-3, d.str());
  return out;
}

}  // namespace towermpc
