#include "towermpc/qlpv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace towermpc {

OperatingLine OperatingLine::optimal_tsr(const TurbineParams& turbine) {
  return {turbine.optimal_tsr};
}

OperatingLine OperatingLine::torque_balance(const TurbineParams& turbine) {
  return {torque_balance_tsr(turbine)};
}

double QlpvSetup::rotor_speed_at(double wind) const {
  return line.tip_speed_ratio * wind / turbine.rotor_radius;
}

double QlpvSetup::wind_at(double rotor_speed) const {
  return rotor_speed * turbine.rotor_radius / line.tip_speed_ratio;
}

QlpvSetup QlpvSetup::nominal() {
  QlpvSetup s;
  s.line = OperatingLine::torque_balance(s.turbine);
  return s;
}

SteadyState steady_state_operating_point(const QlpvSetup& setup, double wind_bar) {
  if (!(wind_bar >= setup.wind_min && wind_bar <= setup.wind_max))
    throw RangeError("wind speed " + std::to_string(wind_bar) + " m/s outside the below-rated band");
  SteadyState ss;
  ss.rotor_speed = setup.rotor_speed_at(wind_bar);
  const Vec4 q = demod_steady_state(setup.tower, ss.rotor_speed);
  ss.x_off << q, ss.rotor_speed;
  ss.u_off << wind_bar, 0.0;
  ss.y_off = response_amplitude(q);
  return ss;
}

LinearModel build_linear_model(const QlpvSetup& setup, double wind_bar, double ts) {
  const SteadyState ss = steady_state_operating_point(setup, wind_bar);
  const TurbineParams& tp = setup.turbine;
  const double w = ss.rotor_speed;
  const Vec4 q = ss.x_off.head<4>();

  LinearModel m;
  m.gains = linearization_gains(tp, w, wind_bar);
  m.A.topLeftCorner<4, 4>() = demod_tower_system(setup.tower, w).A;
  // Sensitivity of the demodulated dynamics to the rotor-speed state.
  m.A.block<4, 1>(0, 4) << q[1], -q[0], q[3], -q[2];
  m.A(4, 4) = (m.gains.k_omega - tp.gearbox_ratio * m.gains.k_torque) / tp.rotor_inertia;
  m.B(4, 0) = m.gains.k_wind / tp.rotor_inertia;
  m.B(4, 1) = -tp.gearbox_ratio / tp.rotor_inertia;

  // Exact Jacobian of sqrt(q3² + q4²); no leading factor ½.
  const double a = ss.y_off;
  if (a > 0.0) {
    m.C(2) = q[2] / a;
    m.C(3) = q[3] / a;
  }

  auto [Ad, Bd] = discretize_rk4<kStates, kInputs>(m.A, m.B, ts);
  m.Ad = Ad;
  m.Bd = Bd;
  m.x_off = ss.x_off;
  m.u_off = ss.u_off;
  m.y_off = ss.y_off;
  m.p = w;
  m.ts = ts;
  return m;
}

ModelGrid::ModelGrid(std::vector<LinearModel> models, double spacing)
    : models_(std::move(models)), spacing_(spacing) {
  if (models_.empty()) throw ArgumentError("model grid must not be empty");
  if (!(spacing_ >= 0.0)) throw ArgumentError("grid spacing must be non-negative");
  for (std::size_t i = 1; i < models_.size(); ++i) {
    if (!(models_[i].p > models_[i - 1].p))
      throw ArgumentError("model grid must be strictly increasing in p");
    if (models_[i].ts != models_[0].ts)
      throw ArgumentError("all grid models must share one sampling time");
  }
}

std::size_t ModelGrid::nearest_index(double p) const {
  if (!(p >= p_min() - spacing_ && p <= p_max() + spacing_))
    throw RangeError("scheduling point " + std::to_string(p) + " outside grid [" +
                     std::to_string(p_min()) + ", " + std::to_string(p_max()) + "]");
  auto it = std::lower_bound(models_.begin(), models_.end(), p,
                             [](const LinearModel& m, double v) { return m.p < v; });
  if (it == models_.begin()) return 0;
  if (it == models_.end()) return models_.size() - 1;
  const std::size_t hi = static_cast<std::size_t>(it - models_.begin());
  const std::size_t lo = hi - 1;
  return (models_[hi].p - p < p - models_[lo].p) ? hi : lo;
}

double ModelGrid::clamp(double p) const { return std::clamp(p, p_min(), p_max()); }

ModelGrid build_model_grid(const QlpvSetup& setup, std::span<const double> wind_set, double ts) {
  if (wind_set.empty()) throw ArgumentError("wind-speed set must not be empty");
  for (std::size_t i = 1; i < wind_set.size(); ++i)
    if (!(wind_set[i] > wind_set[i - 1]))
      throw ArgumentError("wind-speed set must be strictly ascending");

  const auto n = static_cast<std::ptrdiff_t>(wind_set.size());
  std::vector<LinearModel> models(wind_set.size());
  // Exceptions must not escape an OpenMP region; validate the band up front.
  for (double u : wind_set) steady_state_operating_point(setup, u);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) models[i] = build_linear_model(setup, wind_set[i], ts);

  double spacing = std::numeric_limits<double>::infinity();
  if (models.size() > 1) {
    spacing = 0.0;
    for (std::size_t i = 1; i < models.size(); ++i)
      spacing = std::max(spacing, models[i].p - models[i - 1].p);
  }
  return ModelGrid(std::move(models), spacing);
}

ModelGrid build_default_grid(const QlpvSetup& setup, double ts, double p_lo, double p_hi,
                             double spacing) {
  if (!(spacing > 0.0) || !(p_hi >= p_lo)) throw ArgumentError("invalid grid bounds");
  const auto count = static_cast<std::size_t>(std::floor((p_hi - p_lo) / spacing + 1e-9)) + 1;
  std::vector<double> winds(count);
  for (std::size_t i = 0; i < count; ++i) winds[i] = setup.wind_at(p_lo + spacing * double(i));
  return build_model_grid(setup, winds, ts);
}

const LinearModel& nearest_model(const ModelGrid& grid, double p) { return grid.nearest(p); }

Vec5 affine_step(const LinearModel& m, const Vec5& x, const Vec2& u) {
  return m.Ad * (x - m.x_off) + m.Bd * (u - m.u_off) + m.x_off;
}

double affine_output(const LinearModel& m, const Vec5& x) {
  return m.C.dot(x - m.x_off) + m.y_off;
}

Vec5 affine_step(const ModelGrid& grid, const Vec5& x, const Vec2& u) {
  return affine_step(grid.nearest(x[4]), x, u);
}

double affine_output(const ModelGrid& grid, const Vec5& x) {
  return affine_output(grid.nearest(x[4]), x);
}

QlpvTrajectory simulate_qlpv(const ModelGrid& grid, const Vec5& x0, std::span<const double> wind,
                             std::span<const double> delta_tau) {
  if (wind.size() != delta_tau.size())
    throw ArgumentError("wind and torque sequences must have equal length");
  QlpvTrajectory traj;
  traj.states.reserve(wind.size() + 1);
  traj.outputs.reserve(wind.size() + 1);
  Vec5 x = x0;
  traj.states.push_back(x);
  traj.outputs.push_back(affine_output(grid, x));
  for (std::size_t k = 0; k < wind.size(); ++k) {
    x = affine_step(grid, x, Vec2(wind[k], delta_tau[k]));
    traj.states.push_back(x);
    traj.outputs.push_back(affine_output(grid, x));
  }
  return traj;
}

}  // namespace towermpc
