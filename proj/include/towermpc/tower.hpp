#pragma once

#include <complex>

#include "towermpc/types.hpp"

namespace towermpc {

/// First side-side tower mode: m·ẍ + ζ·ẋ + k·x driven by a once-per-revolution
/// force of amplitude a_u (acting per unit modal mass, as in the state-space form).
struct TowerParams {
  double mass = 1000.0;        // [kg]
  double damping = 100.0;      // [kg/s]
  double stiffness = 500.0;    // [kg/s^2]
  double excitation = 1.0;     // a_u [-]

  double natural_frequency() const;  // sqrt(k/m) [rad/s]
  double decay_rate() const { return damping / mass; }
  void validate() const;

  static TowerParams nominal() { return {}; }
};

/// (A_g, B_g, C_g) with states [velocity, displacement].
struct NominalTowerSystem {
  Mat2 A;
  Vec2 B;
  Mat2 C;
  double natural_frequency;
};

/// Demodulated tower model scheduled on the excitation (rotor) frequency.
/// States are the phasor components [Re X1, Im X1, Re X2, Im X2].
struct DemodTowerSystem {
  Mat4 A;
  Vec4 B;
  Mat4 C;
  double rotor_speed;
};

NominalTowerSystem nominal_tower_system(const TowerParams& p);

DemodTowerSystem demod_tower_system(const TowerParams& p, double omega_r);

/// Same system assembled as A_g⊗I + I⊗[[0,ω],[-ω,0]] and B_g⊗[1,0]ᵀ.
DemodTowerSystem demod_tower_system_kronecker(const TowerParams& p, double omega_r);

/// Instantaneous displacement amplitude sqrt(q3² + q4²).
double response_amplitude(const Vec4& q);

/// Instantaneous phase atan2(q4, q3) in (-π, π]. Throws DomainError for a zero phasor.
double response_phase(const Vec4& q);

/// Solves A_h q̄ = -B_h. Throws SingularityError when ζ = 0 and ω_r = ω_n.
Vec4 demod_steady_state(const TowerParams& p, double omega_r);

/// Displacement response of the nominal model to a_u·cos(ωt), as a complex gain.
std::complex<double> displacement_response(const TowerParams& p, double omega);

/// Derivative of the demodulated state for a given rotor speed.
Vec4 demod_derivative(const DemodTowerSystem& sys, const Vec4& q);

}  // namespace towermpc
