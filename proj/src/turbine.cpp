#include "towermpc/turbine.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

namespace towermpc {

double TurbineParams::torque_constant() const {
  return 0.5 * air_density * std::numbers::pi * rotor_radius * rotor_radius * rotor_radius;
}

void TurbineParams::validate() const {
  if (!(rotor_inertia > 0.0)) throw DomainError("rotor inertia must be positive");
  if (!(gearbox_ratio >= 1.0)) throw DomainError("gearbox ratio must be >= 1");
  if (!(rotor_radius > 0.0)) throw DomainError("rotor radius must be positive");
  if (!(air_density > 0.0)) throw DomainError("air density must be positive");
  if (!(optimal_mode_gain > 0.0)) throw DomainError("optimal mode gain must be positive");
  if (!(optimal_tsr > 0.0)) throw DomainError("optimal tip-speed ratio must be positive");
}

namespace {

void require_positive_tsr(double tsr) {
  if (!(tsr > 0.0)) throw DomainError("tip-speed ratio must be positive, got " + std::to_string(tsr));
}

}  // namespace

double torque_coefficient(const TurbineParams& p, double tsr) {
  require_positive_tsr(tsr);
  const auto& th = p.ctau_fit;
  return std::exp(-th[0] / tsr) * (th[1] / tsr - th[2]) / tsr + th[3];
}

double torque_coefficient_gradient(const TurbineParams& p, double tsr) {
  require_positive_tsr(tsr);
  const auto& th = p.ctau_fit;
  const double e = std::exp(-th[0] / tsr);
  // C_τ - θ4 = e(λ)·g(λ), g = θ2/λ² - θ3/λ
  const double g = th[1] / (tsr * tsr) - th[2] / tsr;
  const double dg = -2.0 * th[1] / (tsr * tsr * tsr) + th[2] / (tsr * tsr);
  const double de = e * th[0] / (tsr * tsr);
  return de * g + e * dg;
}

double power_coefficient(const TurbineParams& p, double tsr) {
  return tsr * torque_coefficient(p, tsr);
}

double tip_speed_ratio(const TurbineParams& p, double wind_speed, double omega_r) {
  if (!(wind_speed > 0.0))
    throw DomainError("wind speed must be positive, got " + std::to_string(wind_speed));
  return omega_r * p.rotor_radius / wind_speed;
}

double aerodynamic_torque(const TurbineParams& p, double wind_speed, double omega_r) {
  const double tsr = tip_speed_ratio(p, wind_speed, omega_r);
  if (tsr <= 0.0) return p.torque_constant() * wind_speed * wind_speed * p.ctau_fit[3];
  return p.torque_constant() * wind_speed * wind_speed * torque_coefficient(p, tsr);
}

double komega2_torque(const TurbineParams& p, double omega_r) {
  return p.optimal_mode_gain * omega_r * omega_r / p.gearbox_ratio;
}

double optimal_mode_gain(const TurbineParams& p) {
  const double l = p.optimal_tsr;
  const double r5 = std::pow(p.rotor_radius, 5);
  return std::numbers::pi * p.air_density * r5 * power_coefficient(p, l) / (2.0 * l * l * l);
}

OperatingPoint linearization_gains(const TurbineParams& p, double omega_r_bar, double wind_bar) {
  const double tsr = tip_speed_ratio(p, wind_bar, omega_r_bar);
  const double cr = p.torque_constant();
  const double ct = tsr > 0.0 ? torque_coefficient(p, tsr) : p.ctau_fit[3];
  // ∂C_τ/∂λ has a removable singularity at λ = 0 (limit 0).
  const double dct = tsr > 0.0 ? torque_coefficient_gradient(p, tsr) : 0.0;
  OperatingPoint op;
  op.rotor_speed = omega_r_bar;
  op.wind_speed = wind_bar;
  op.pitch = p.fine_pitch;
  op.k_omega = cr * p.rotor_radius * wind_bar * dct;
  op.k_wind = 2.0 * cr * ct * wind_bar - cr * omega_r_bar * p.rotor_radius * dct;
  op.k_torque = 2.0 * p.optimal_mode_gain * omega_r_bar / p.gearbox_ratio;
  return op;
}

double rotor_acceleration(const TurbineParams& p, double tau_a, double tau_g, double delta_tau_g) {
  return (tau_a - p.gearbox_ratio * (tau_g + delta_tau_g)) / p.rotor_inertia;
}

double max_cp_tsr(const TurbineParams& p, double lo, double hi) {
  auto neg_cp = [&](double l) { return -power_coefficient(p, l); };
  return boost::math::tools::brent_find_minima(neg_cp, lo, hi, 50).first;
}

double torque_balance_tsr(const TurbineParams& p) {
  // c_r·U²·C_τ(λ) = K·ω² with ω = λU/R  ⇔  c_r·R²·C_τ(λ)/λ² = K
  const double cr = p.torque_constant();
  const double r2 = p.rotor_radius * p.rotor_radius;
  auto residual = [&](double l) {
    return cr * r2 * torque_coefficient(p, l) / (l * l) - p.optimal_mode_gain;
  };
  boost::uintmax_t max_iter = 200;
  auto tol = boost::math::tools::eps_tolerance<double>(52);
  double lo = 0.5 * p.optimal_tsr;
  double hi = 1.5 * p.optimal_tsr;
  if (residual(lo) * residual(hi) > 0.0)
    throw DomainError("no K-omega-squared equilibrium near the optimal tip-speed ratio");
  auto [a, b] = boost::math::tools::toms748_solve(residual, lo, hi, tol, max_iter);
  return 0.5 * (a + b);
}

}  // namespace towermpc
