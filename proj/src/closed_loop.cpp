#include "towermpc/closed_loop.hpp"

#include <cmath>
#include <sstream>

namespace towermpc {

int LoopConfig::substeps() const {
  if (!(ts_plant > 0.0) || !(ts_mpc > 0.0)) throw ArgumentError("sample times must be positive");
  const double ratio = ts_mpc / ts_plant;
  const long n = std::lround(ratio);
  if (n < 1 || std::abs(ratio - double(n)) > 1e-9 * ratio)
    throw ArgumentError("ts_mpc must be an integer multiple of ts_plant");
  return static_cast<int>(n);
}

void SimResult::reserve(std::size_t n) {
  for (auto* v : {&t, &omega_r, &psi, &x_dot, &x, &wind, &wind_hat, &tau_g, &delta_tau, &power,
                  &a_y, &mpc_cost, &mpc_dtheta_norm, &mpc_sched_min, &mpc_sched_max})
    v->reserve(n);
  for (auto* v : {&mpc_iterations, &mpc_converged, &mpc_clamped}) v->reserve(n);
}

SimResult run_closed_loop(const PlantParams& plant, const LoopConfig& config,
                          const WindProfile& wind, QlpvMpcController* controller) {
  const int nsub = config.substeps();
  if (std::abs(wind.ts - config.ts_plant) > 1e-12)
    throw ArgumentError("wind profile must be sampled at the plant step");
  if (wind.U.empty()) throw ArgumentError("wind profile is empty");
  const bool use_mpc = config.controller == ControllerKind::qlpv_mpc;
  if (use_mpc && !controller) throw ArgumentError("qLPV-MPC run requires a controller");
  if (use_mpc) controller->reset();

  const TurbineParams& tp = plant.turbine;
  const double dt = config.ts_plant;
  PlantState s = plant_equilibrium(plant, wind.U.front());
  DemodMonitor monitor(plant.tower, s.omega_r);
  WindSpeedEstimator estimator(tp, config.estimator, s.omega_r, wind.U.front());

  SimResult r;
  r.reserve(wind.size());
  r.metadata["controller"] = use_mpc ? "qlpv-mpc" : "baseline";
  r.metadata["ts_plant"] = std::to_string(config.ts_plant);
  r.metadata["ts_mpc"] = std::to_string(config.ts_mpc);

  double dtau = 0.0;
  MpcDiagnostics diag;
  try {
    for (std::size_t i = 0; i < wind.size(); ++i) {
      if (use_mpc && i % static_cast<std::size_t>(nsub) == 0) {
        Vec5 xk;
        xk << monitor.state(), s.omega_r;
        const MpcStep out = controller->step(xk, estimator.estimate());
        dtau = out.delta_tau;
        diag = out.diagnostics;
      }
      const double tau_g = komega2_torque(tp, s.omega_r);
      r.t.push_back(wind.time(i));
      r.omega_r.push_back(s.omega_r);
      r.psi.push_back(s.psi);
      r.x_dot.push_back(s.x_dot);
      r.x.push_back(s.x);
      r.wind.push_back(wind.U[i]);
      r.wind_hat.push_back(estimator.estimate());
      r.tau_g.push_back(tau_g);
      r.delta_tau.push_back(dtau);
      r.power.push_back(tp.gearbox_ratio * (tau_g + dtau) * s.omega_r);
      r.a_y.push_back(monitor.amplitude());
      r.mpc_iterations.push_back(diag.iterations);
      r.mpc_converged.push_back(diag.converged ? 1 : 0);
      r.mpc_cost.push_back(diag.cost);
      r.mpc_dtheta_norm.push_back(diag.dtheta_norm);
      r.mpc_sched_min.push_back(diag.schedule_min);
      r.mpc_sched_max.push_back(diag.schedule_max);
      r.mpc_clamped.push_back(diag.clamped);

      const double omega_meas = s.omega_r;
      s = plant_step(plant, s, wind.U[i], dtau, dt);
      if (!(s.omega_r >= 0.0) || !std::isfinite(s.omega_r))
        throw DomainError("rotor speed left the admissible range");
      monitor.step(omega_meas, dt);
      estimator.step(komega2_torque(tp, s.omega_r) + dtau, s.omega_r, dt);
    }
  } catch (const std::exception& e) {
    r.aborted = true;
    std::ostringstream os;
    os << "aborted at t=" << (r.t.empty() ? 0.0 : r.t.back()) << ": " << e.what();
    r.metadata["abort"] = os.str();
  }
  return r;
}

}  // namespace towermpc
