#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "towermpc/closed_loop.hpp"
#include "towermpc/mpc.hpp"

using namespace towermpc;
using doctest::Approx;

namespace {

const QlpvSetup S = QlpvSetup::nominal();

std::shared_ptr<const ModelGrid> grid() {
  static const auto g = std::make_shared<const ModelGrid>(build_default_grid(S));
  return g;
}

// Off-equilibrium start just below resonance.
Vec5 perturbed_state(double p) {
  Vec5 x = grid()->nearest(p).x_off;
  x[2] *= 1.3;
  x[3] -= 0.2;
  return x;
}

}  // namespace

TEST_CASE("configuration validation") {
  MpcConfig c;
  CHECK_NOTHROW(c.validate());
  auto bad = [](auto mutate) {
    MpcConfig m;
    mutate(m);
    return m;
  };
  CHECK_THROWS_AS(bad([](MpcConfig& m) { m.horizon = 0; }).validate(), ArgumentError);
  CHECK_THROWS_AS(bad([](MpcConfig& m) { m.input_weight = 0.0; }).validate(), ArgumentError);
  CHECK_THROWS_AS(bad([](MpcConfig& m) { m.output_weight = -1.0; }).validate(), ArgumentError);
  CHECK_THROWS_AS(bad([](MpcConfig& m) { m.max_iterations = 0; }).validate(), ArgumentError);
  CHECK_THROWS_AS(bad([](MpcConfig& m) { m.tolerance = 0.0; }).validate(), ArgumentError);
  CHECK_THROWS_AS(bad([](MpcConfig& m) { m.torque_scale = 0.0; }).validate(), ArgumentError);
  CHECK_THROWS_AS(QlpvMpcController(nullptr, c), ArgumentError);
  MpcConfig slow;
  slow.ts = 0.5;
  CHECK_THROWS_AS(QlpvMpcController(grid(), slow), ArgumentError);
}

TEST_CASE("pure input penalty gives zero torque") {
  MpcConfig c;
  c.output_weight = 0.0;
  const Vec5 x = perturbed_state(0.68);
  const auto b = build_prediction_bundle(*grid(), x[4], SchedulingSequence::constant(x[4], c.horizon));
  const QpSolution s = solve_qp(b, x, 6.0, c);
  CHECK(s.delta_tau.isZero());
  CHECK(s.cost == 0.0);
}

TEST_CASE("one-step problem matches the scalar closed form") {
  MpcConfig c;
  c.horizon = 1;
  const Vec5 x = perturbed_state(0.66);
  const auto b = build_prediction_bundle(*grid(), x[4], SchedulingSequence{{0.67}});
  const double y0 = propagate_output(b, x, 5.9, Eigen::VectorXd::Zero(1))[0];
  const double s = b.S(0, 1) * c.torque_scale;
  const double z = -c.output_weight * s * y0 / (c.output_weight * s * s + c.input_weight);
  const QpSolution sol = solve_qp(b, x, 5.9, c);
  CHECK(sol.delta_tau[0] == Approx(z * c.torque_scale).epsilon(1e-12));
}

TEST_CASE("analytic solution is optimal") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n01;
  for (double p : {0.55, 0.68, 0.74, 0.9}) {
    for (double scale : {1.0, 2.0e4}) {
      MpcConfig c;
      c.torque_scale = scale;
      const Vec5 x = perturbed_state(p);
      std::vector<double> pts(c.horizon);
      for (int i = 0; i < c.horizon; ++i) pts[i] = p + 0.002 * i;
      const auto b = build_prediction_bundle(*grid(), x[4], SchedulingSequence{pts});
      const double u = S.wind_at(p) + 0.3;
      const QpSolution sol = solve_qp(b, x, u, c);
      CHECK(sol.gradient_norm < 1e-8 * (1.0 + sol.gradient_norm_at_zero));
      CHECK(qp_cost(b, x, u, sol.delta_tau, c) == Approx(sol.cost).epsilon(1e-10));
      CHECK((propagate_output(b, x, u, sol.delta_tau) - sol.output).norm() < 1e-10);
      for (int k = 0; k < 50; ++k) {
        Eigen::VectorXd d(c.horizon);
        for (auto& v : d) v = n01(rng) * 0.05 * scale;
        CHECK(qp_cost(b, x, u, sol.delta_tau + d, c) >= sol.cost);
      }
      CHECK_FALSE(sol.ill_conditioned);
    }
  }
}

TEST_CASE("Hessian is symmetric positive definite") {
  MpcConfig c;
  for (double p = 0.46; p < 1.3; p += 0.07) {
    const auto b = build_prediction_bundle(*grid(), p, SchedulingSequence::constant(p + 0.01, c.horizon));
    const Eigen::MatrixXd Sz = b.decision_sensitivity() * c.torque_scale;
    Eigen::MatrixXd h = c.output_weight * Sz.transpose() * Sz;
    h.diagonal().array() += c.input_weight;
    CHECK((h - h.transpose()).norm() < 1e-12 * h.norm());
    CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h).eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("output cost is non-increasing in the weight ratio") {
  const Vec5 x = perturbed_state(0.69);
  const auto b = build_prediction_bundle(*grid(), x[4], SchedulingSequence::constant(x[4], 25));
  double prev_y = std::numeric_limits<double>::infinity();
  double prev_z = 0.0;
  for (double q : {0.0, 0.01, 0.05, 0.1, 0.5, 1.0, 5.0, 50.0}) {
    MpcConfig c;
    c.output_weight = q;
    const QpSolution s = solve_qp(b, x, 6.2, c);
    const double yy = s.output.squaredNorm();
    const double zz = (s.delta_tau / c.torque_scale).squaredNorm();
    CHECK(yy <= prev_y * (1 + 1e-12));
    CHECK(zz >= prev_z * (1 - 1e-12));
    prev_y = yy;
    prev_z = zz;
  }
}

TEST_CASE("scheduling iteration") {
  const Vec5 x = perturbed_state(0.69);
  const double u = S.wind_at(0.69) + 0.5;
  MpcConfig c;

  SUBCASE("degenerate tolerance stops after one solve") {
    c.tolerance = std::numeric_limits<double>::infinity();
    const auto init = SchedulingSequence::constant(x[4], c.horizon);
    const SchedulingResult r = iterate_scheduling(*grid(), x, u, init, c, 5);
    CHECK(r.iterations == 1);
    CHECK(r.converged);
    const QpSolution direct = solve_qp(build_prediction_bundle(*grid(), x[4], init), x, u, c);
    CHECK((r.qp.delta_tau - direct.delta_tau).norm() == 0.0);
  }
  SUBCASE("single-model grid converges in two iterations") {
    std::vector<double> one{S.wind_at(0.69)};
    const ModelGrid lti = build_model_grid(S, one, 1.0);
    const SchedulingResult r =
        iterate_scheduling(lti, x, u, SchedulingSequence::constant(x[4], c.horizon), c, 5);
    CHECK(r.iterations == 2);
    CHECK(r.converged);
    CHECK(r.output_changes[1] == 0.0);
  }
  SUBCASE("schedule follows the predicted state evolution") {
    c.tolerance = 1e-300;
    const SchedulingResult r =
        iterate_scheduling(*grid(), x, u, SchedulingSequence::constant(x[4], c.horizon), c, 3);
    CHECK(r.iterations == 3);
    CHECK_FALSE(r.converged);
    CHECK(r.output_changes.size() == 3);
    CHECK(r.predicted.size() == static_cast<std::size_t>(c.horizon));
  }
  SUBCASE("length mismatch") {
    CHECK_THROWS_AS(iterate_scheduling(*grid(), x, u, SchedulingSequence::constant(x[4], 3), c, 5),
                    ArgumentError);
  }
  SUBCASE("out-of-band schedule is clamped and counted") {
    const SchedulingResult r =
        iterate_scheduling(*grid(), x, u, SchedulingSequence::constant(1.5, c.horizon), c, 1);
    CHECK(r.clamped >= c.horizon);
    CHECK(r.schedule.points.front() == grid()->p_max());
  }
}

TEST_CASE("warm start shift-and-hold") {
  std::vector<Vec5> pred(3, Vec5::Zero());
  pred[0][4] = 0.70;
  pred[1][4] = 0.71;
  pred[2][4] = 0.72;
  CHECK(warm_start_shift(pred, *grid()).points == std::vector<double>{0.71, 0.72, 0.72});
  std::vector<Vec5> flat(4, Vec5::Zero());
  for (auto& v : flat) v[4] = 0.9;
  CHECK(warm_start_shift(flat, *grid()).points == std::vector<double>(4, 0.9));
  pred[2][4] = 2.0;
  int clamped = 0;
  CHECK(warm_start_shift(pred, *grid(), &clamped).points.back() == grid()->p_max());
  CHECK(clamped == 2);
  CHECK_THROWS_AS(warm_start_shift(std::vector<Vec5>{}, *grid()), ArgumentError);
}

TEST_CASE("controller at equilibrium") {
  SUBCASE("literal torque units: nothing to correct") {
    MpcConfig c;
    c.torque_scale = 1.0;
    for (double p : {0.5, 0.65, 0.69, 0.72, 0.8, 1.0, 1.25}) {
      QlpvMpcController ctl(grid(), c);
      const LinearModel& m = grid()->nearest(p);
      CHECK(std::abs(ctl.step(m.x_off, m.u_off[0]).delta_tau) < 1.0);
    }
  }
  SUBCASE("scaled units: torque pushes the rotor away from resonance") {
    const double wn = S.tower.natural_frequency();
    for (double p : {0.5, 0.65, 0.69, 0.72, 0.8, 1.0, 1.25}) {
      QlpvMpcController ctl(grid(), MpcConfig{});
      const LinearModel& m = grid()->nearest(p);
      const double dt = ctl.step(m.x_off, m.u_off[0]).delta_tau;
      CHECK((p < wn ? dt > 0.0 : dt < 0.0));
    }
  }
}

TEST_CASE("rising wind just below resonance is met with extra torque") {
  QlpvMpcController ctl(grid(), MpcConfig{});
  const LinearModel& m = grid()->nearest(0.69);
  const MpcStep s = ctl.step(m.x_off, m.u_off[0] + 0.4);
  CHECK(s.delta_tau > 0.0);
  CHECK(s.diagnostics.iterations >= 1);
  CHECK(ctl.warm_start().has_value());
  CHECK(ctl.warm_start()->horizon() == 25);
  ctl.reset();
  CHECK_FALSE(ctl.warm_start().has_value());
}

TEST_CASE("predicted states start from the measured state") {
  const Vec5 x = perturbed_state(0.8);
  Eigen::VectorXd tau = Eigen::VectorXd::Constant(5, 500.0);
  const auto xs = predict_states(*grid(), x, 6.0, tau);
  REQUIRE(xs.size() == 5);
  CHECK((xs[0] - affine_step(grid()->nearest(x[4]), x, Vec2(6.0, 500.0))).norm() < 1e-14);
}

// Mirrors the closed loop to expose the controller state at every MPC instant.
struct Case2Walk {
  PlantParams plant{S.tower, S.turbine};
  WindProfile wind = wind_turbulent(TurbulentWind{});
  LoopConfig loop;

  template <class Visit>
  void run(QlpvMpcController& ctl, Visit visit) {
    PlantState s = plant_equilibrium(plant, wind.U.front());
    DemodMonitor mon(plant.tower, s.omega_r);
    WindSpeedEstimator est(plant.turbine, loop.estimator, s.omega_r, wind.U.front());
    const int nsub = loop.substeps();
    double dt = 0.0;
    for (std::size_t i = 0; i < wind.size(); ++i) {
      if (i % static_cast<std::size_t>(nsub) == 0) {
        Vec5 x;
        x << mon.state(), s.omega_r;
        visit(x, est.estimate());
        dt = ctl.step(x, est.estimate()).delta_tau;
      }
      const double om = s.omega_r;
      s = plant_step(plant, s, wind.U[i], dt, loop.ts_plant);
      mon.step(om, loop.ts_plant);
      est.step(komega2_torque(plant.turbine, s.omega_r) + dt, s.omega_r, loop.ts_plant);
    }
  }
};

TEST_CASE("iteration contracts from most turbulent-case cold starts") {
  Case2Walk walk;
  QlpvMpcController ctl(grid(), MpcConfig{});
  MpcConfig cold;
  cold.tolerance = 1e-300;
  int total = 0, ok = 0;
  walk.run(ctl, [&](const Vec5& x, double u) {
    const SchedulingResult r = iterate_scheduling(
        *grid(), x, u, SchedulingSequence::constant(grid()->clamp(x[4]), cold.horizon), cold, 5);
    bool mono = true;
    for (std::size_t j = 1; j < r.output_changes.size(); ++j)
      mono = mono && r.output_changes[j] <= r.output_changes[j - 1] * (1 + 1e-9) + 1e-12;
    ++total;
    ok += mono;
  });
  const double frac = double(ok) / total;
  std::printf("contraction: %d of %d cold starts (%.2f%%), %d violations\n", ok, total,
              100 * frac, total - ok);
  CHECK(frac >= 0.95);
}

TEST_CASE("warm-started single solves track the five-iteration solution") {
  Case2Walk walk;
  const MpcConfig cfg;
  QlpvMpcController ctl(grid(), cfg);
  double s1 = 0.0, s5 = 0.0;
  walk.run(ctl, [&](const Vec5& x, double u) {
    // Both solutions start from the same state and warm schedule.
    QlpvMpcController probe = ctl;
    const double d1 = probe.step(x, u).delta_tau;
    double d5 = d1;
    if (ctl.warm_start())
      d5 = iterate_scheduling(*grid(), x, u, *ctl.warm_start(), cfg, cfg.max_iterations).qp.delta_tau[0];
    s1 += d1 * d1;
    s5 += d5 * d5;
  });
  const double rel = std::abs(std::sqrt(s1) - std::sqrt(s5)) / std::sqrt(s5);
  std::printf("warm-start torque RMS deviation: %.3f%%\n", 100 * rel);
  CHECK(rel < 0.01);
}
