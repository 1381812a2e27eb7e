#pragma once

#include <array>

#include "towermpc/types.hpp"

namespace towermpc {

/// Rotor, drivetrain and aerodynamic constants for below-rated operation
/// (pitch frozen at fine pitch). Speeds and aerodynamic torques are on the
/// low-speed shaft; generator torque is on the high-speed shaft.
struct TurbineParams {
  double rotor_inertia = 35.444e6;      // J_r [kg m^2]
  double gearbox_ratio = 97.0;          // N [-]
  double air_density = 1.225;           // [kg/m^3]
  double rotor_radius = 63.0;           // [m]
  double fine_pitch = 1.9e-3;           // [rad]
  double optimal_mode_gain = 2.1286e6;  // K, LSS [N m (rad/s)^-2]
  double optimal_tsr = 7.7;             // λ* [-]
  std::array<double, 4> ctau_fit{14.5924, 42.7653, 2.4604, 0.0036};

  static constexpr double kHubInertia = 115926.0;
  static constexpr double kBladeInertia = 11.776e6;

  /// J_hub + 3·J_blade.
  static double rotor_inertia_from(double hub, double blade) { return hub + 3.0 * blade; }

  double torque_constant() const;  // c_r = ½ρπR³
  void validate() const;

  static TurbineParams nominal() { return {}; }
};

/// Linearization gains at one steady operating point.
struct OperatingPoint {
  double rotor_speed = 0.0;  // ω̄_r [rad/s]
  double wind_speed = 0.0;   // Ū [m/s]
  double pitch = 0.0;        // β̄ [rad]
  double k_omega = 0.0;      // ∂τ_a/∂ω_r [N m s/rad]
  double k_wind = 0.0;       // ∂τ_a/∂U [N m s/m]
  double k_torque = 0.0;     // ∂τ_g/∂ω_r, HSS torque per LSS speed [N m s/rad]
};

double torque_coefficient(const TurbineParams& p, double tsr);
double torque_coefficient_gradient(const TurbineParams& p, double tsr);
double power_coefficient(const TurbineParams& p, double tsr);

double tip_speed_ratio(const TurbineParams& p, double wind_speed, double omega_r);

/// ½ρπR³U²C_τ(λ). Throws DomainError for U ≤ 0.
double aerodynamic_torque(const TurbineParams& p, double wind_speed, double omega_r);

/// K·ω_r²/N (HSS).
double komega2_torque(const TurbineParams& p, double omega_r);

/// πρR⁵C_p(λ*)/(2λ*³) from the torque-coefficient fit; a consistency check
/// against the tabulated gain, which is the one used by the control law.
double optimal_mode_gain(const TurbineParams& p);

OperatingPoint linearization_gains(const TurbineParams& p, double omega_r_bar, double wind_bar);

/// (τ_a − N(τ_g + Δτ_g)) / J_r.
double rotor_acceleration(const TurbineParams& p, double tau_a, double tau_g, double delta_tau_g);

/// Tip-speed ratio maximizing C_p = λ·C_τ(λ) on [lo, hi].
double max_cp_tsr(const TurbineParams& p, double lo = 4.0, double hi = 12.0);

/// Tip-speed ratio at which the K-omega-squared law balances the aerodynamic
/// torque (Δτ_g = 0 equilibrium). Independent of wind speed.
double torque_balance_tsr(const TurbineParams& p);

}  // namespace towermpc
