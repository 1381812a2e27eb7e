#pragma once

#include <limits>
#include <optional>
#include <memory>
#include <span>
#include <vector>

#include "towermpc/prediction.hpp"

namespace towermpc {

struct MpcConfig {
  int horizon = 25;             // Np
  double output_weight = 0.1;   // Q
  double input_weight = 25.0;   // R
  int max_iterations = 5;       // j_n
  double tolerance = 1e-3;      // ε on ‖Y^{j+1} − Y^j‖₂
  double ts = 1.0;              // [s]
  /// Torque unit of the decision variable [N m]; the weights act on Δτ_g / torque_scale.
  double torque_scale = 2.0e4;
  /// Run the full scheduling iteration at every step instead of only the first.
  bool iterate_every_step = false;

  void validate() const;
};

struct QpSolution {
  Eigen::VectorXd delta_tau;  // [N m], Np entries
  Eigen::VectorXd output;     // predicted a_y under delta_tau
  Eigen::VectorXd free_output;  // predicted a_y with delta_tau = 0
  double cost = 0.0;          // Q·YᵀY + R·zᵀz with z = delta_tau / torque_scale
  double gradient_norm = 0.0;
  double gradient_norm_at_zero = 0.0;
  double condition = 1.0;     // of the Hessian
  bool ill_conditioned = false;
};

/// Cost in scaled decision units for an arbitrary torque sequence.
double qp_cost(const PredictionBundle& bundle, const Vec5& x_k, double wind_estimate,
               const Eigen::VectorXd& delta_tau, const MpcConfig& config);

/// Closed-form minimizer of the unconstrained quadratic cost.
QpSolution solve_qp(const PredictionBundle& bundle, const Vec5& x_k, double wind_estimate,
                    const MpcConfig& config);

/// f(x): rotor-speed coordinate clamped to the grid band; `clamped` counts clamps.
double scheduling_point(const ModelGrid& grid, const Vec5& x, int* clamped = nullptr);

/// Self-scheduled qLPV rollout x_{k+1} .. x_{k+Np} under a held wind and torque sequence.
std::vector<Vec5> predict_states(const ModelGrid& grid, const Vec5& x_k, double wind_estimate,
                                 const Eigen::VectorXd& delta_tau, int* clamped = nullptr);

struct SchedulingResult {
  QpSolution qp;
  SchedulingSequence schedule;      // schedule used for the returned solution
  std::vector<Vec5> predicted;      // 𝒳 under the returned solution
  int iterations = 0;
  bool converged = false;
  std::vector<double> output_changes;  // ‖Y^j − Y^{j−1}‖₂, Y^0 the free response
  int clamped = 0;
};

SchedulingResult iterate_scheduling(const ModelGrid& grid, const Vec5& x_k, double wind_estimate,
                                    const SchedulingSequence& initial, const MpcConfig& config,
                                    int max_iterations);

/// Shift-and-hold of the predicted rotor speeds: (a, b, c) -> (b, c, c).
SchedulingSequence warm_start_shift(std::span<const Vec5> predicted, const ModelGrid& grid,
                                    int* clamped = nullptr);

struct MpcDiagnostics {
  int iterations = 0;
  bool converged = false;
  double cost = 0.0;
  double dtheta_norm = 0.0;  // ‖ΔΘ‖₂ [N m]
  double schedule_min = 0.0;
  double schedule_max = 0.0;
  int clamped = 0;
  double condition = 1.0;
  bool ill_conditioned = false;
};

struct MpcStep {
  double delta_tau = 0.0;  // first sample of ΔΘ [N m]
  MpcDiagnostics diagnostics;
};

/// Single-threaded controller state: the warm-start schedule between steps.
class QlpvMpcController {
 public:
  QlpvMpcController(std::shared_ptr<const ModelGrid> grid, MpcConfig config);

  MpcStep step(const Vec5& x_k, double wind_estimate);
  void reset() { warm_.reset(); }

  const MpcConfig& config() const { return config_; }
  const ModelGrid& grid() const { return *grid_; }
  const std::optional<SchedulingSequence>& warm_start() const { return warm_; }
  const SchedulingResult& last() const { return last_; }

 private:
  std::shared_ptr<const ModelGrid> grid_;
  MpcConfig config_;
  std::optional<SchedulingSequence> warm_;
  SchedulingResult last_;
};

}  // namespace towermpc
