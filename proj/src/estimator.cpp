#include <algorithm>
#include <cmath>

#include "towermpc/plant.hpp"

namespace towermpc {

WindSpeedEstimator::WindSpeedEstimator(TurbineParams turbine, EstimatorConfig cfg, double omega0,
                                       double wind0)
    : turbine_(turbine), cfg_(cfg), omega_(omega0), wind_(wind0), smooth_(wind0) {
  if (cfg_.wind_gain < 0.0 || cfg_.speed_gain < 0.0 || cfg_.smoothing < 0.0)
    throw ArgumentError("estimator gains must be non-negative");
}

double WindSpeedEstimator::step(double tau_g_applied, double omega_measured, double ts) {
  const double e = omega_measured - omega_;
  const double tau_a = aerodynamic_torque(turbine_, wind_, omega_measured);
  omega_ += ts * ((tau_a - turbine_.gearbox_ratio * tau_g_applied) / turbine_.rotor_inertia +
                  cfg_.speed_gain * e);
  wind_ = std::max(cfg_.floor, wind_ + ts * cfg_.wind_gain * e);
  if (cfg_.smoothing > 0.0)
    smooth_ += (wind_ - smooth_) * (1.0 - std::exp(-ts / cfg_.smoothing));
  else
    smooth_ = wind_;
  return smooth_;
}

}  // namespace towermpc
