#include "towermpc/mpc.hpp"

#include <algorithm>
#include <cmath>
#include <Eigen/Eigenvalues>

namespace towermpc {

void MpcConfig::validate() const {
  if (horizon < 1) throw ArgumentError("Np must be at least 1");
  if (!(output_weight >= 0.0)) throw ArgumentError("Q must be non-negative");
  if (!(input_weight > 0.0)) throw ArgumentError("R must be positive");
  if (max_iterations < 1) throw ArgumentError("j_n must be at least 1");
  if (!(tolerance > 0.0)) throw ArgumentError("epsilon must be positive");
  if (!(ts > 0.0)) throw ArgumentError("MPC sample time must be positive");
  if (!(torque_scale > 0.0)) throw ArgumentError("torque scale must be positive");
}

double qp_cost(const PredictionBundle& bundle, const Vec5& x_k, double wind_estimate,
               const Eigen::VectorXd& delta_tau, const MpcConfig& config) {
  const Eigen::VectorXd y = propagate_output(bundle, x_k, wind_estimate, delta_tau);
  const Eigen::VectorXd z = delta_tau / config.torque_scale;
  return config.output_weight * y.squaredNorm() + config.input_weight * z.squaredNorm();
}

QpSolution solve_qp(const PredictionBundle& bundle, const Vec5& x_k, double wind_estimate,
                    const MpcConfig& config) {
  config.validate();
  const int np = bundle.horizon;
  const double q = config.output_weight;
  const double r = config.input_weight;

  const Eigen::MatrixXd Sz = bundle.decision_sensitivity() * config.torque_scale;
  QpSolution sol;
  sol.free_output = propagate_output(bundle, x_k, wind_estimate, Eigen::VectorXd::Zero(np));

  Eigen::MatrixXd hessian = q * Sz.transpose() * Sz;
  hessian.diagonal().array() += r;
  const Eigen::VectorXd rhs = -q * Sz.transpose() * sol.free_output;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hessian, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  sol.condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  sol.ill_conditioned = sol.condition > 1e12;

  const Eigen::VectorXd z = hessian.ldlt().solve(rhs);
  sol.delta_tau = z * config.torque_scale;
  sol.output = sol.free_output + Sz * z;
  sol.cost = q * sol.output.squaredNorm() + r * z.squaredNorm();
  sol.gradient_norm = (2.0 * q * Sz.transpose() * sol.output + 2.0 * r * z).norm();
  sol.gradient_norm_at_zero = (2.0 * q * Sz.transpose() * sol.free_output).norm();
  return sol;
}

double scheduling_point(const ModelGrid& grid, const Vec5& x, int* clamped) {
  const double p = x[4];
  const double c = grid.clamp(p);
  if (clamped && c != p) ++*clamped;
  return c;
}

std::vector<Vec5> predict_states(const ModelGrid& grid, const Vec5& x_k, double wind_estimate,
                                 const Eigen::VectorXd& delta_tau, int* clamped) {
  std::vector<Vec5> out;
  out.reserve(static_cast<std::size_t>(delta_tau.size()));
  Vec5 x = x_k;
  for (Eigen::Index i = 0; i < delta_tau.size(); ++i) {
    const LinearModel& m = grid.nearest(scheduling_point(grid, x, clamped));
    x = affine_step(m, x, Vec2(wind_estimate, delta_tau[i]));
    out.push_back(x);
  }
  return out;
}

SchedulingSequence warm_start_shift(std::span<const Vec5> predicted, const ModelGrid& grid,
                                    int* clamped) {
  if (predicted.empty()) throw ArgumentError("predicted state evolution is empty");
  SchedulingSequence s;
  s.points.reserve(predicted.size());
  for (std::size_t i = 1; i < predicted.size(); ++i)
    s.points.push_back(scheduling_point(grid, predicted[i], clamped));
  s.points.push_back(scheduling_point(grid, predicted.back(), clamped));
  return s;
}

SchedulingResult iterate_scheduling(const ModelGrid& grid, const Vec5& x_k, double wind_estimate,
                                    const SchedulingSequence& initial, const MpcConfig& config,
                                    int max_iterations) {
  config.validate();
  if (max_iterations < 1) throw ArgumentError("at least one iteration is required");
  if (initial.horizon() != config.horizon)
    throw ArgumentError("schedule length does not match the horizon");

  SchedulingResult res;
  const double p_now = scheduling_point(grid, x_k, &res.clamped);
  SchedulingSequence schedule = initial;
  for (double& p : schedule.points) {
    const double c = grid.clamp(p);
    if (c != p) ++res.clamped;
    p = c;
  }

  Eigen::VectorXd previous;
  for (int j = 1; j <= max_iterations; ++j) {
    const PredictionBundle bundle = build_prediction_bundle(grid, p_now, schedule);
    QpSolution qp = solve_qp(bundle, x_k, wind_estimate, config);
    if (j == 1) previous = qp.free_output;
    const double change = (qp.output - previous).norm();
    res.output_changes.push_back(change);
    res.predicted = predict_states(grid, x_k, wind_estimate, qp.delta_tau, &res.clamped);
    previous = qp.output;
    res.qp = std::move(qp);
    res.schedule = schedule;
    res.iterations = j;
    if (change < config.tolerance) {
      res.converged = true;
      break;
    }
    for (int i = 0; i < config.horizon; ++i)
      schedule.points[i] = scheduling_point(grid, res.predicted[i], &res.clamped);
  }
  return res;
}

QlpvMpcController::QlpvMpcController(std::shared_ptr<const ModelGrid> grid, MpcConfig config)
    : grid_(std::move(grid)), config_(config) {
  if (!grid_) throw ArgumentError("controller requires a model grid");
  config_.validate();
  if (std::abs(grid_->ts() - config_.ts) > 1e-12)
    throw ArgumentError("grid sampling time differs from the MPC sample time");
}

MpcStep QlpvMpcController::step(const Vec5& x_k, double wind_estimate) {
  const bool cold = !warm_.has_value();
  const SchedulingSequence initial =
      cold ? SchedulingSequence::constant(scheduling_point(*grid_, x_k), config_.horizon) : *warm_;
  const int iterations = (cold || config_.iterate_every_step) ? config_.max_iterations : 1;
  last_ = iterate_scheduling(*grid_, x_k, wind_estimate, initial, config_, iterations);
  warm_ = warm_start_shift(last_.predicted, *grid_);

  MpcStep out;
  out.delta_tau = last_.qp.delta_tau[0];
  auto& d = out.diagnostics;
  d.iterations = last_.iterations;
  d.converged = last_.converged;
  d.cost = last_.qp.cost;
  d.dtheta_norm = last_.qp.delta_tau.norm();
  const auto [lo, hi] = std::minmax_element(last_.schedule.points.begin(), last_.schedule.points.end());
  d.schedule_min = *lo;
  d.schedule_max = *hi;
  d.clamped = last_.clamped;
  d.condition = last_.qp.condition;
  d.ill_conditioned = last_.qp.ill_conditioned;
  return out;
}

}  // namespace towermpc
