#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "doctest.h"
#include "towermpc/prediction.hpp"

using namespace towermpc;
using doctest::Approx;

namespace {

const QlpvSetup S = QlpvSetup::nominal();

const ModelGrid& grid() {
  static const ModelGrid g = build_default_grid(S);
  return g;
}

// Plain loop over the model sequence, written out without the library helpers.
Eigen::VectorXd rollout(const ModelGrid& g, double p_now, const std::vector<double>& sched,
                        const Vec5& x0, const Eigen::VectorXd& u) {
  const int np = static_cast<int>(sched.size());
  Eigen::VectorXd y(np);
  Vec5 x = x0;
  const LinearModel* m = &g.nearest(p_now);
  for (int i = 0; i < np; ++i) {
    const LinearModel* next = &g.nearest(sched[i]);
    const Vec2 ui(u[2 * i], u[2 * i + 1]);
    x = m->Ad * (x - m->x_off) + m->Bd * (ui - m->u_off) + m->x_off;
    y[i] = next->C * (x - next->x_off) + next->y_off;
    m = next;
  }
  return y;
}

double max_rel(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

}  // namespace

TEST_CASE("horizon of one") {
  const double p0 = 0.8, p1 = 0.84;
  const PredictionBundle b = build_prediction_bundle(grid(), p0, SchedulingSequence{{p1}});
  const LinearModel& m0 = grid().nearest(p0);
  const LinearModel& m1 = grid().nearest(p1);
  CHECK(b.horizon == 1);
  CHECK((b.H - m1.C * m0.Ad).norm() < 1e-14);
  CHECK((b.S - m1.C * m0.Bd).norm() < 1e-14 * m1.C.norm() * m0.Bd.norm());
  CHECK((b.L - m1.C).norm() == 0.0);
  CHECK(b.D.isZero());
  CHECK(b.Y_off[0] == m1.y_off);
  CHECK((b.dX_off - (m0.x_off - m1.x_off)).norm() == 0.0);
}

TEST_CASE("constant schedule reduces to the time-invariant case") {
  const double p = 1.0;
  const int np = 12;
  const PredictionBundle b = build_prediction_bundle(grid(), p, SchedulingSequence::constant(p, np));
  const LinearModel& m = grid().nearest(p);
  Mat5 Ai = Mat5::Identity();
  for (int i = 0; i < np; ++i) {
    Ai = m.Ad * Ai;
    CHECK((b.H.row(i) - m.C * Ai).norm() < 1e-12 * (m.C * Ai).norm() + 1e-15);
    // Toeplitz structure.
    for (int j = 0; j < i; ++j) {
      const double a = b.S(i, 2 * j + 1), c = b.S(i - j, 1);
      CHECK(a == Approx(c).epsilon(1e-12));
    }
  }
  CHECK(b.dX_off.isZero());
  CHECK(b.Y_off.isConstant(m.y_off));
}

TEST_CASE("block lower-triangular structure") {
  std::vector<double> sched;
  for (int i = 0; i < 20; ++i) sched.push_back(0.7 + 0.01 * i);
  const PredictionBundle b = build_prediction_bundle(grid(), 0.69, SchedulingSequence{sched});
  for (int i = 0; i < b.horizon; ++i)
    for (int j = i + 1; j < b.horizon; ++j) {
      CHECK(b.S.block<1, kInputs>(i, kInputs * j).isZero());
      CHECK(b.L.block<1, kStates>(i, kStates * j).isZero());
    }
  CHECK(b.decision_sensitivity().cols() == b.horizon);
  CHECK(b.wind_sensitivity()(3, 2) == b.S(3, 4));
  CHECK(b.decision_sensitivity()(3, 2) == b.S(3, 5));
}

TEST_CASE("stacked prediction equals the step-by-step rollout") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> p_dist(0.46, 1.29), w_dist(-0.03, 0.03),
      u_dist(4.0, 10.0), t_dist(-4e4, 4e4), q_dist(-1.0, 1.0);
  std::uniform_int_distribution<int> n_dist(1, 30);
  double worst = 0.0, worst_sim = 0.0;
  for (int draw = 0; draw < 100; ++draw) {
    const int np = n_dist(rng);
    const double p_now = p_dist(rng);
    std::vector<double> sched(np);
    double p = p_now;
    for (auto& s : sched) s = p = std::clamp(p + w_dist(rng), 0.45, 1.30);
    Vec5 x = grid().nearest(p_now).x_off;
    for (int k = 0; k < 4; ++k) x[k] += q_dist(rng);
    x[4] = p_now;
    Eigen::VectorXd u(2 * np);
    for (int i = 0; i < np; ++i) {
      u[2 * i] = u_dist(rng);
      u[2 * i + 1] = t_dist(rng);
    }
    const PredictionBundle b = build_prediction_bundle(grid(), p_now, SchedulingSequence{sched});
    const Eigen::VectorXd ref = rollout(grid(), p_now, sched, x, u);
    worst = std::max(worst, max_rel(propagate_output(b, x, u), ref));
    worst_sim = std::max(
        worst_sim, max_rel(simulate_frozen_schedule(grid(), p_now, SchedulingSequence{sched}, x, u), ref));
  }
  CHECK(worst < 1e-10);
  CHECK(worst_sim < 1e-12);
}

TEST_CASE("wind-and-torque overload interleaves inputs") {
  const int np = 8;
  const PredictionBundle b = build_prediction_bundle(grid(), 0.9, SchedulingSequence::constant(0.92, np));
  Eigen::VectorXd dt = Eigen::VectorXd::LinSpaced(np, -1e3, 2e3);
  Eigen::VectorXd u(2 * np);
  for (int i = 0; i < np; ++i) u.segment<2>(2 * i) << 6.7, dt[i];
  const Vec5 x = grid().nearest(0.9).x_off;
  CHECK((propagate_output(b, x, 6.7, dt) - propagate_output(b, x, u)).norm() == 0.0);
}

TEST_CASE("equilibrium is predicted as constant output") {
  const double p = 0.75;
  const LinearModel& m = grid().nearest(p);
  const int np = 25;
  const PredictionBundle b = build_prediction_bundle(grid(), p, SchedulingSequence::constant(p, np));
  const Eigen::VectorXd y = propagate_output(b, m.x_off, m.u_off[0], Eigen::VectorXd::Zero(np));
  CHECK((y.array() - m.y_off).abs().maxCoeff() < 1e-10);
}

TEST_CASE("parallel and serial bundles agree") {
  std::vector<double> sched;
  for (int i = 0; i < 60; ++i) sched.push_back(0.9 + 0.2 * std::sin(0.1 * i));
  const PredictionBundle a = build_prediction_bundle(grid(), 0.88, SchedulingSequence{sched});
  const PredictionBundle r = reference::build_prediction_bundle(grid(), 0.88, SchedulingSequence{sched});
  auto close = [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    return (x - y).norm() <= 1e-12 * std::max(1.0, y.norm());
  };
  CHECK(close(a.H, r.H));
  CHECK(close(a.S, r.S));
  CHECK(close(a.L, r.L));
  CHECK(a.Y_off == r.Y_off);
  CHECK(a.dX_off == r.dX_off);
  CHECK(a.U_off == r.U_off);
}

TEST_CASE("dimension errors") {
  CHECK_THROWS_AS(SchedulingSequence::constant(0.8, 0), ArgumentError);
  CHECK_THROWS_AS(build_prediction_bundle(grid(), 0.8, SchedulingSequence{}), ArgumentError);
  const PredictionBundle b = build_prediction_bundle(grid(), 0.8, SchedulingSequence::constant(0.8, 4));
  CHECK_THROWS_AS(propagate_output(b, Vec5::Zero(), Eigen::VectorXd::Zero(6)), ArgumentError);
  CHECK_THROWS_AS(propagate_output(b, Vec5::Zero(), 6.0, Eigen::VectorXd::Zero(5)), ArgumentError);
  CHECK_THROWS_AS(build_prediction_bundle(grid(), 0.8, SchedulingSequence::constant(3.0, 4)), RangeError);
}
