#include "towermpc/prediction.hpp"

#include <vector>

namespace towermpc {

SchedulingSequence SchedulingSequence::constant(double p, int horizon) {
  if (horizon < 1) throw ArgumentError("horizon must be at least 1");
  return {std::vector<double>(static_cast<std::size_t>(horizon), p)};
}

Eigen::MatrixXd PredictionBundle::decision_sensitivity() const {
  Eigen::MatrixXd out(S.rows(), horizon);
  for (int j = 0; j < horizon; ++j) out.col(j) = S.col(2 * j + 1);
  return out;
}

Eigen::MatrixXd PredictionBundle::wind_sensitivity() const {
  Eigen::MatrixXd out(S.rows(), horizon);
  for (int j = 0; j < horizon; ++j) out.col(j) = S.col(2 * j);
  return out;
}

namespace {

// Models along the horizon: index 0 is p_k, index i is p_{k+i}.
std::vector<const LinearModel*> schedule_models(const ModelGrid& grid, double p_now,
                                                const SchedulingSequence& schedule) {
  if (schedule.horizon() < 1) throw ArgumentError("schedule must cover at least one step");
  std::vector<const LinearModel*> models;
  models.reserve(schedule.points.size() + 1);
  models.push_back(&grid.nearest(p_now));
  for (double p : schedule.points) models.push_back(&grid.nearest(p));
  return models;
}

void fill_offsets(PredictionBundle& b, const std::vector<const LinearModel*>& models) {
  const int np = b.horizon;
  b.x_off_now = models[0]->x_off;
  for (int i = 0; i < np; ++i) {
    b.Y_off[i] = models[i + 1]->y_off;
    b.dX_off.segment<kStates>(kStates * i) = models[i]->x_off - models[i + 1]->x_off;
    b.U_off.segment<kInputs>(kInputs * i) = models[i]->u_off;
  }
}

PredictionBundle allocate(int np) {
  PredictionBundle b;
  b.horizon = np;
  b.H = Eigen::MatrixXd::Zero(np, kStates);
  b.S = Eigen::MatrixXd::Zero(np, kInputs * np);
  b.L = Eigen::MatrixXd::Zero(np, kStates * np);
  b.D = Eigen::MatrixXd::Zero(np, kInputs * np);
  b.Y_off = Eigen::VectorXd::Zero(np);
  b.dX_off = Eigen::VectorXd::Zero(kStates * np);
  b.U_off = Eigen::VectorXd::Zero(kInputs * np);
  return b;
}

}  // namespace

PredictionBundle build_prediction_bundle(const ModelGrid& grid, double p_now,
                                         const SchedulingSequence& schedule) {
  const auto models = schedule_models(grid, p_now, schedule);
  const int np = schedule.horizon();
  PredictionBundle b = allocate(np);
  fill_offsets(b, models);

  // Row i (output y_{k+i+1}) is C(p_{k+i+1}) A(p_{k+i}) ... walked backwards.
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < np; ++i) {
    RowVec5 r = models[i + 1]->C;
    for (int j = i; j >= 0; --j) {
      b.L.block<1, kStates>(i, kStates * j) = r;
      b.S.block<1, kInputs>(i, kInputs * j) = r * models[j]->Bd;
      r = r * models[j]->Ad;
    }
    b.H.row(i) = r;
  }
  return b;
}

Eigen::VectorXd propagate_output(const PredictionBundle& b, const Vec5& x_k,
                                 const Eigen::VectorXd& inputs) {
  if (inputs.size() != kInputs * b.horizon)
    throw ArgumentError("input sequence length does not match the horizon");
  const Eigen::VectorXd dU = inputs - b.U_off;
  // D multiplies ΔU_{k+1}; it is identically zero for this plant.
  return b.H * (x_k - b.x_off_now) + b.S * dU + b.Y_off + b.L * b.dX_off;
}

Eigen::VectorXd propagate_output(const PredictionBundle& b, const Vec5& x_k, double wind_estimate,
                                 const Eigen::VectorXd& delta_tau) {
  if (delta_tau.size() != b.horizon)
    throw ArgumentError("torque sequence length does not match the horizon");
  Eigen::VectorXd u(kInputs * b.horizon);
  for (int i = 0; i < b.horizon; ++i) {
    u[2 * i] = wind_estimate;
    u[2 * i + 1] = delta_tau[i];
  }
  return propagate_output(b, x_k, u);
}

Eigen::VectorXd simulate_frozen_schedule(const ModelGrid& grid, double p_now,
                                         const SchedulingSequence& schedule, const Vec5& x_k,
                                         const Eigen::VectorXd& inputs) {
  const auto models = schedule_models(grid, p_now, schedule);
  const int np = schedule.horizon();
  if (inputs.size() != kInputs * np)
    throw ArgumentError("input sequence length does not match the horizon");
  Eigen::VectorXd y(np);
  Vec5 x = x_k;
  for (int i = 0; i < np; ++i) {
    x = affine_step(*models[i], x, inputs.segment<kInputs>(kInputs * i));
    y[i] = affine_output(*models[i + 1], x);
  }
  return y;
}

}  // namespace towermpc
