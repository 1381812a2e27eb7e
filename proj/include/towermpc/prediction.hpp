#pragma once

#include <span>
#include <vector>

#include "towermpc/qlpv.hpp"

namespace towermpc {

/// Look-ahead scheduling points p_{k+1} .. p_{k+Np}. The current point p_k is
/// always taken from the measured state.
struct SchedulingSequence {
  std::vector<double> points;

  int horizon() const { return static_cast<int>(points.size()); }
  static SchedulingSequence constant(double p, int horizon);
};

/// Stacked forward-propagation matrices of the affine qLPV model over a horizon.
/// Inputs are interleaved per step: column 2i is the wind speed, 2i+1 the
/// additional generator torque at step k+i.
struct PredictionBundle {
  int horizon = 0;
  Eigen::MatrixXd H;        // Np x 5
  Eigen::MatrixXd S;        // Np x 2Np, block lower-triangular
  Eigen::MatrixXd L;        // Np x 5Np, block lower-triangular
  Eigen::MatrixXd D;        // Np x 2Np, zero (no feedthrough)
  Eigen::VectorXd Y_off;    // y̆(p_{k+1}) .. y̆(p_{k+Np})
  Eigen::VectorXd dX_off;   // x̆(p_{k+i}) − x̆(p_{k+i+1}), i = 0..Np−1
  Eigen::VectorXd U_off;    // ŭ(p_{k+i}), i = 0..Np−1
  Vec5 x_off_now = Vec5::Zero();  // x̆(p_k)

  Eigen::MatrixXd decision_sensitivity() const;  // torque columns of S
  Eigen::MatrixXd wind_sensitivity() const;      // wind columns of S
};

/// Block rows are assembled independently, in parallel.
PredictionBundle build_prediction_bundle(const ModelGrid& grid, double p_now,
                                         const SchedulingSequence& schedule);

/// Y = H(x_k − x̆(p_k)) + S·ΔU + Y̆ + L·ΔX̆ for absolute inputs u (2Np, interleaved).
Eigen::VectorXd propagate_output(const PredictionBundle& bundle, const Vec5& x_k,
                                 const Eigen::VectorXd& inputs);

/// Wind held at `wind_estimate` over the horizon, torque sequence `delta_tau` [N m].
Eigen::VectorXd propagate_output(const PredictionBundle& bundle, const Vec5& x_k,
                                 double wind_estimate, const Eigen::VectorXd& delta_tau);

/// Step-by-step affine simulation along a frozen schedule; reference for propagate_output.
Eigen::VectorXd simulate_frozen_schedule(const ModelGrid& grid, double p_now,
                                         const SchedulingSequence& schedule, const Vec5& x_k,
                                         const Eigen::VectorXd& inputs);

namespace reference {

/// Serial construction through explicit state-transition products.
PredictionBundle build_prediction_bundle(const ModelGrid& grid, double p_now,
                                         const SchedulingSequence& schedule);

}  // namespace reference

}  // namespace towermpc
