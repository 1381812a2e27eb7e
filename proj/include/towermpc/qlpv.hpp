#pragma once

#include <span>
#include <utility>
#include <vector>

#include "towermpc/tower.hpp"
#include "towermpc/turbine.hpp"
#include "towermpc/types.hpp"

namespace towermpc {

/// Tip-speed ratio along which the scheduling grid is linearized.
struct OperatingLine {
  double tip_speed_ratio = 7.7;

  /// λ = λ* (maximum power coefficient trajectory).
  static OperatingLine optimal_tsr(const TurbineParams& turbine);
  /// λ at which K-omega-squared balances the aerodynamic torque with Δτ_g = 0.
  static OperatingLine torque_balance(const TurbineParams& turbine);
};

/// Everything needed to linearize the augmented tower + rotor model.
struct QlpvSetup {
  TowerParams tower;
  TurbineParams turbine;
  OperatingLine line;
  double wind_min = 3.0;   // below-rated band [m/s]
  double wind_max = 11.4;

  double rotor_speed_at(double wind) const;
  double wind_at(double rotor_speed) const;

  static QlpvSetup nominal();  // torque-balance operating line
};

struct SteadyState {
  double rotor_speed = 0.0;
  Vec5 x_off = Vec5::Zero();  // q̄1..q̄4, ω̄_r
  Vec2 u_off = Vec2::Zero();  // Ū, Δτ̄_g = 0
  double y_off = 0.0;         // ă_y
};

/// One linearization of the augmented model together with its affine offsets.
struct LinearModel {
  Mat5 A = Mat5::Zero();
  Mat52 B = Mat52::Zero();
  RowVec5 C = RowVec5::Zero();
  Mat5 Ad = Mat5::Zero();
  Mat52 Bd = Mat52::Zero();
  Vec5 x_off = Vec5::Zero();
  Vec2 u_off = Vec2::Zero();
  double y_off = 0.0;
  double p = 0.0;   // scheduling coordinate (rotor speed) [rad/s]
  double ts = 0.0;  // discretization step [s]
  OperatingPoint gains;
};

SteadyState steady_state_operating_point(const QlpvSetup& setup, double wind_bar);

LinearModel build_linear_model(const QlpvSetup& setup, double wind_bar, double ts);

/// Fourth-order Taylor (RK4) discretization of ẋ = Ax + Bu with zero-order-held input.
template <int N, int M>
std::pair<Eigen::Matrix<double, N, N>, Eigen::Matrix<double, N, M>> discretize_rk4(
    const Eigen::Matrix<double, N, N>& A, const Eigen::Matrix<double, N, M>& B, double ts) {
  if (!(ts > 0.0)) throw DomainError("sampling time must be positive");
  using MatN = Eigen::Matrix<double, N, N>;
  const MatN I = MatN::Identity(A.rows(), A.cols());
  const MatN At = A * ts;
  const MatN At2 = At * At;
  const MatN At3 = At2 * At;
  const MatN At4 = At3 * At;
  MatN Ad = I + At + At2 / 2.0 + At3 / 6.0 + At4 / 24.0;
  MatN Phi = (I + At / 2.0 + At2 / 6.0 + At3 / 24.0) * ts;
  return {Ad, Phi * B};
}

/// Ordered set of linear models, strictly increasing in p, sharing one sampling time.
class ModelGrid {
 public:
  /// `spacing` bounds extrapolation: lookups beyond [p_min - spacing, p_max + spacing]
  /// are rejected. An infinite spacing accepts any p (single-model LTI use).
  ModelGrid(std::vector<LinearModel> models, double spacing);

  std::size_t size() const { return models_.size(); }
  const LinearModel& operator[](std::size_t i) const { return models_[i]; }
  const std::vector<LinearModel>& models() const { return models_; }
  double spacing() const { return spacing_; }
  double p_min() const { return models_.front().p; }
  double p_max() const { return models_.back().p; }
  double ts() const { return models_.front().ts; }

  /// Index of the model closest to p; ties go to the lower p.
  std::size_t nearest_index(double p) const;
  const LinearModel& nearest(double p) const { return models_[nearest_index(p)]; }

  double clamp(double p) const;
  bool contains(double p) const { return p >= p_min() && p <= p_max(); }

 private:
  std::vector<LinearModel> models_;
  double spacing_;
};

/// One model per wind speed (nonempty, ascending). Models are built in parallel.
ModelGrid build_model_grid(const QlpvSetup& setup, std::span<const double> wind_set, double ts);

/// Grid over rotor speeds [p_lo, p_hi] with the given spacing (default 0.45..1.30, 0.002 rad/s).
ModelGrid build_default_grid(const QlpvSetup& setup, double ts = 1.0, double p_lo = 0.45,
                             double p_hi = 1.30, double spacing = 0.002);

const LinearModel& nearest_model(const ModelGrid& grid, double p);

/// x⁺ = A_d(x − x̆) + B_d(u − ŭ) + x̆ for an explicitly chosen model.
Vec5 affine_step(const LinearModel& model, const Vec5& x, const Vec2& u);
/// y = C(x − x̆) + y̆ for an explicitly chosen model.
double affine_output(const LinearModel& model, const Vec5& x);

/// Self-scheduled versions: the model is the nearest to the rotor-speed state.
Vec5 affine_step(const ModelGrid& grid, const Vec5& x, const Vec2& u);
double affine_output(const ModelGrid& grid, const Vec5& x);

struct QlpvTrajectory {
  std::vector<Vec5> states;     // x_0 .. x_n
  std::vector<double> outputs;  // y_0 .. y_n
};

QlpvTrajectory simulate_qlpv(const ModelGrid& grid, const Vec5& x0, std::span<const double> wind,
                             std::span<const double> delta_tau);

namespace reference {

/// Serial grid construction.
ModelGrid build_model_grid(const QlpvSetup& setup, std::span<const double> wind_set, double ts);

}  // namespace reference

}  // namespace towermpc
