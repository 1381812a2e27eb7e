#include "towermpc/plant.hpp"

#include <cmath>
#include <numbers>

namespace towermpc {

namespace {

struct Deriv {
  double omega, psi, x_dot, x;
};

Deriv plant_rhs(const PlantParams& p, double omega, double psi, double x_dot, double x,
                double wind, double delta_tau) {
  const TurbineParams& t = p.turbine;
  const double tau_a = aerodynamic_torque(t, wind, omega);
  const double tau_g = komega2_torque(t, omega);
  const double wn = p.tower.natural_frequency();
  return {rotor_acceleration(t, tau_a, tau_g, delta_tau), omega,
          -p.tower.decay_rate() * x_dot - wn * wn * x + p.tower.excitation * std::cos(psi), x_dot};
}

}  // namespace

PlantState plant_step(const PlantParams& p, const PlantState& s, double wind, double delta_tau,
                      double ts) {
  if (!(wind > 0.0)) throw DomainError("wind speed must be positive");
  if (!(ts > 0.0)) throw DomainError("step must be positive");
  const double h = ts;
  const Deriv k1 = plant_rhs(p, s.omega_r, s.psi, s.x_dot, s.x, wind, delta_tau);
  const Deriv k2 = plant_rhs(p, s.omega_r + h / 2 * k1.omega, s.psi + h / 2 * k1.psi,
                             s.x_dot + h / 2 * k1.x_dot, s.x + h / 2 * k1.x, wind, delta_tau);
  const Deriv k3 = plant_rhs(p, s.omega_r + h / 2 * k2.omega, s.psi + h / 2 * k2.psi,
                             s.x_dot + h / 2 * k2.x_dot, s.x + h / 2 * k2.x, wind, delta_tau);
  const Deriv k4 = plant_rhs(p, s.omega_r + h * k3.omega, s.psi + h * k3.psi,
                             s.x_dot + h * k3.x_dot, s.x + h * k3.x, wind, delta_tau);
  PlantState n;
  n.omega_r = s.omega_r + h / 6 * (k1.omega + 2 * k2.omega + 2 * k3.omega + k4.omega);
  n.psi = s.psi + h / 6 * (k1.psi + 2 * k2.psi + 2 * k3.psi + k4.psi);
  n.x_dot = s.x_dot + h / 6 * (k1.x_dot + 2 * k2.x_dot + 2 * k3.x_dot + k4.x_dot);
  n.x = s.x + h / 6 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  n.psi = std::fmod(n.psi, two_pi);
  if (n.psi < 0.0) n.psi += two_pi;
  if (n.psi >= two_pi) n.psi = 0.0;
  return n;
}

PlantState plant_equilibrium(const PlantParams& p, double wind) {
  if (!(wind > 0.0)) throw DomainError("wind speed must be positive");
  const double lambda = torque_balance_tsr(p.turbine);
  PlantState s;
  s.omega_r = lambda * wind / p.turbine.rotor_radius;
  const Vec4 q = demod_steady_state(p.tower, s.omega_r);
  s.x_dot = q[0];
  s.x = q[2];
  return s;
}

DemodMonitor::DemodMonitor(TowerParams tower, double omega0)
    : tower_(tower), q_(demod_steady_state(tower, omega0)) {}

void DemodMonitor::step(double omega_r, double ts) {
  const DemodTowerSystem sys = demod_tower_system(tower_, omega_r);
  const Vec4 k1 = demod_derivative(sys, q_);
  const Vec4 k2 = demod_derivative(sys, q_ + ts / 2 * k1);
  const Vec4 k3 = demod_derivative(sys, q_ + ts / 2 * k2);
  const Vec4 k4 = demod_derivative(sys, q_ + ts * k3);
  q_ += ts / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
}

}  // namespace towermpc
