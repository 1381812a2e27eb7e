#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "towermpc/mpc.hpp"
#include "towermpc/plant.hpp"

namespace towermpc {

enum class ControllerKind { baseline, qlpv_mpc };

struct LoopConfig {
  double ts_plant = 0.01;  // [s]
  double ts_mpc = 1.0;     // [s]
  ControllerKind controller = ControllerKind::baseline;
  EstimatorConfig estimator;

  /// Plant steps per controller step; throws unless ts_mpc is an integer multiple of ts_plant.
  int substeps() const;
};

/// One row per plant step; controller quantities are zero-order held.
struct SimResult {
  std::vector<double> t;           // [s]
  std::vector<double> omega_r;     // [rad/s]
  std::vector<double> psi;         // [rad]
  std::vector<double> x_dot;       // [m/s]
  std::vector<double> x;           // [m]
  std::vector<double> wind;        // true rotor-effective wind [m/s]
  std::vector<double> wind_hat;    // estimate [m/s]
  std::vector<double> tau_g;       // K-omega-squared HSS torque [N m]
  std::vector<double> delta_tau;   // additional HSS torque [N m]
  std::vector<double> power;       // N(τ_g + Δτ_g)ω_r [W]
  std::vector<double> a_y;         // monitor amplitude [m]
  std::vector<int> mpc_iterations;
  std::vector<int> mpc_converged;
  std::vector<double> mpc_cost;
  std::vector<double> mpc_dtheta_norm;  // [N m]
  std::vector<double> mpc_sched_min;    // [rad/s]
  std::vector<double> mpc_sched_max;    // [rad/s]
  std::vector<int> mpc_clamped;

  std::map<std::string, std::string> metadata;
  bool aborted = false;

  std::size_t size() const { return t.size(); }
  double ts() const { return t.size() > 1 ? t[1] - t[0] : 0.0; }
  void reserve(std::size_t n);
};

/// `controller` may be null only for the baseline.
SimResult run_closed_loop(const PlantParams& plant, const LoopConfig& config,
                          const WindProfile& wind, QlpvMpcController* controller);

}  // namespace towermpc
