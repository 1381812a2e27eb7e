#pragma once

#include <cstdint>
#include <vector>

#include "towermpc/tower.hpp"
#include "towermpc/turbine.hpp"

namespace towermpc {

struct PlantParams {
  TowerParams tower;
  TurbineParams turbine;
};

struct PlantState {
  double omega_r = 0.0;  // [rad/s]
  double psi = 0.0;      // azimuth [rad], in [0, 2π)
  double x_dot = 0.0;    // tower-top side-side velocity [m/s]
  double x = 0.0;        // tower-top side-side displacement [m]
};

/// One RK4 step of the rotor, azimuth and tower under K-omega-squared torque plus Δτ_g.
/// Throws DomainError for U ≤ 0 or a non-positive step.
PlantState plant_step(const PlantParams& p, const PlantState& s, double wind, double delta_tau_g,
                      double ts);

/// Torque-balance equilibrium at wind speed U with the tower on its steady 1P orbit (ψ = 0).
PlantState plant_equilibrium(const PlantParams& p, double wind);

enum class WindKind { slope, turbulent, constant };

struct WindProfile {
  double ts = 0.01;        // [s]
  std::vector<double> U;   // [m/s], sample i at t = i·ts
  WindKind kind = WindKind::constant;

  std::size_t size() const { return U.size(); }
  double time(std::size_t i) const { return ts * static_cast<double>(i); }
  double duration() const { return ts * static_cast<double>(U.size()); }
};

struct SlopeWind {
  double u0 = 5.5;        // [m/s]
  double u1 = 8.0;        // [m/s]
  double hold = 50.0;     // initial hold [s]
  double rise = 250.0;    // ramp length [s]
  double duration = 400.0;
};

struct TurbulentWind {
  double mean = 6.5;          // [m/s]
  double intensity = 0.12;    // σ / mean
  double time_constant = 25.0;  // low-pass [s]
  std::uint64_t seed = 42;
  double duration = 2000.0;
  double floor = 1.0;         // [m/s]
};

WindProfile wind_slope(const SlopeWind& cfg, double ts = 0.01);
WindProfile wind_turbulent(const TurbulentWind& cfg, double ts = 0.01);
WindProfile wind_constant(double wind, double duration, double ts = 0.01);

struct EstimatorConfig {
  double wind_gain = 5.0;     // γ [(m/s)/(rad/s·s)]
  double speed_gain = 0.5;    // observer injection on the speed residual [1/s]
  double smoothing = 1.0;     // output low-pass time constant [s]; 0 disables
  double floor = 1.0;         // lower bound on the estimate [m/s]
};

/// Torque-balance rotor-effective wind-speed observer.
class WindSpeedEstimator {
 public:
  WindSpeedEstimator(TurbineParams turbine, EstimatorConfig cfg, double omega0, double wind0);

  /// Advance by ts with the applied HSS generator torque and the measured rotor speed.
  double step(double tau_g_applied, double omega_measured, double ts);

  double estimate() const { return smooth_; }
  double raw_estimate() const { return wind_; }
  double speed_estimate() const { return omega_; }

 private:
  TurbineParams turbine_;
  EstimatorConfig cfg_;
  double omega_;
  double wind_;
  double smooth_;
};

/// Demodulated tower states integrated alongside the plant, scheduled on measured rotor speed.
class DemodMonitor {
 public:
  DemodMonitor(TowerParams tower, double omega0);

  void step(double omega_r, double ts);
  const Vec4& state() const { return q_; }
  double amplitude() const { return response_amplitude(q_); }

 private:
  TowerParams tower_;
  Vec4 q_;
};

}  // namespace towermpc
