#include "towermpc/tower.hpp"

#include <cmath>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

namespace towermpc {

double TowerParams::natural_frequency() const { return std::sqrt(stiffness / mass); }

void TowerParams::validate() const {
  if (!(mass > 0.0)) throw DomainError("tower mass must be positive, got " + std::to_string(mass));
  if (!(stiffness > 0.0))
    throw DomainError("tower stiffness must be positive, got " + std::to_string(stiffness));
  if (!(damping >= 0.0)) throw DomainError("tower damping must be non-negative");
  if (!(excitation >= 0.0)) throw DomainError("excitation amplitude must be non-negative");
}

NominalTowerSystem nominal_tower_system(const TowerParams& p) {
  p.validate();
  const double wn = p.natural_frequency();
  NominalTowerSystem sys;
  sys.A << -p.damping / p.mass, -wn * wn,
           1.0, 0.0;
  sys.B << p.excitation, 0.0;
  sys.C.setIdentity();
  sys.natural_frequency = wn;
  return sys;
}

DemodTowerSystem demod_tower_system(const TowerParams& p, double omega_r) {
  p.validate();
  if (!(omega_r >= 0.0)) throw DomainError("rotor speed must be non-negative");
  const double a = p.damping / p.mass;
  const double wn2 = p.natural_frequency() * p.natural_frequency();
  const double w = omega_r;
  DemodTowerSystem sys;
  sys.A << -a,   w,   -wn2, 0.0,
           -w,   -a,  0.0,  -wn2,
           1.0,  0.0, 0.0,  w,
           0.0,  1.0, -w,   0.0;
  sys.B << p.excitation, 0.0, 0.0, 0.0;
  sys.C.setIdentity();
  sys.rotor_speed = omega_r;
  return sys;
}

DemodTowerSystem demod_tower_system_kronecker(const TowerParams& p, double omega_r) {
  if (!(omega_r >= 0.0)) throw DomainError("rotor speed must be non-negative");
  const NominalTowerSystem g = nominal_tower_system(p);
  Mat2 rotation;
  rotation << 0.0, omega_r,
              -omega_r, 0.0;
  const Mat2 eye = Mat2::Identity();
  const Eigen::Vector2d e1(1.0, 0.0);

  DemodTowerSystem sys;
  sys.A = Eigen::kroneckerProduct(g.A, eye) + Eigen::kroneckerProduct(eye, rotation);
  sys.B = Eigen::kroneckerProduct(g.B, e1);
  sys.C.setIdentity();
  sys.rotor_speed = omega_r;
  return sys;
}

double response_amplitude(const Vec4& q) { return std::hypot(q[2], q[3]); }

double response_phase(const Vec4& q) {
  if (q[2] == 0.0 && q[3] == 0.0) throw DomainError("phase of a zero phasor is undefined");
  return std::atan2(q[3], q[2]);
}

Vec4 demod_steady_state(const TowerParams& p, double omega_r) {
  const DemodTowerSystem sys = demod_tower_system(p, omega_r);
  Eigen::FullPivLU<Mat4> lu(sys.A);
  // Relative threshold: the undamped resonance produces an exactly rank-deficient A_h.
  lu.setThreshold(1e-13);
  if (!lu.isInvertible())
    throw SingularityError("demodulated tower matrix is singular at omega_r = " +
                           std::to_string(omega_r));
  return lu.solve(-sys.B);
}

std::complex<double> displacement_response(const TowerParams& p, double omega) {
  p.validate();
  const double wn = p.natural_frequency();
  const std::complex<double> den(wn * wn - omega * omega, omega * p.damping / p.mass);
  return p.excitation / den;
}

Vec4 demod_derivative(const DemodTowerSystem& sys, const Vec4& q) { return sys.A * q + sys.B; }

}  // namespace towermpc
