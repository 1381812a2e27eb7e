#include <cmath>
#include <numbers>

#include "towermpc/analysis.hpp"

namespace towermpc {

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) throw ArgumentError("invalid logarithmic grid");
  std::vector<double> g(n);
  const double a = std::log10(lo), b = std::log10(hi);
  for (std::size_t i = 0; i < n; ++i) g[i] = std::pow(10.0, a + (b - a) * double(i) / double(n - 1));
  g.back() = hi;
  return g;
}

std::complex<double> frequency_response(const Eigen::MatrixXd& A, const Eigen::VectorXd& B,
                                        const Eigen::RowVectorXd& C, double omega) {
  using namespace std::complex_literals;
  const Eigen::Index n = A.rows();
  Eigen::MatrixXcd M = (1i * omega) * Eigen::MatrixXcd::Identity(n, n) - A.cast<std::complex<double>>();
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(M);
  lu.setThreshold(1e-13);
  if (!lu.isInvertible()) throw SingularityError("pole on the imaginary axis");
  const Eigen::VectorXcd x = lu.solve(B.cast<std::complex<double>>());
  return (C.cast<std::complex<double>>() * x)(0);
}

namespace {

void check_grid(std::span<const double> omega) {
  for (std::size_t i = 0; i < omega.size(); ++i) {
    if (!(omega[i] > 0.0)) throw ArgumentError("frequencies must be positive");
    if (i > 0 && !(omega[i] > omega[i - 1])) throw ArgumentError("frequencies must increase");
  }
}

FrequencyResponse allocate(std::span<const double> omega) {
  check_grid(omega);
  FrequencyResponse r;
  r.omega.assign(omega.begin(), omega.end());
  r.magnitude.resize(omega.size());
  r.magnitude_db.resize(omega.size());
  r.phase.resize(omega.size());
  return r;
}

struct Point {
  double mag, phase;
};

Point nominal_point(const NominalTowerSystem& sys, double w) {
  const auto h = frequency_response(sys.A, sys.B, Eigen::RowVector2d(0.0, 1.0), w);
  return {std::abs(h), std::arg(h)};
}

Point demod_point(const DemodTowerSystem& sys, double w) {
  Eigen::RowVector4d c3(0, 0, 1, 0), c4(0, 0, 0, 1);
  const auto h3 = frequency_response(sys.A, sys.B, c3, w);
  const auto h4 = frequency_response(sys.A, sys.B, c4, w);
  return {std::hypot(std::abs(h3), std::abs(h4)), std::arg(h3)};
}

void store(FrequencyResponse& r, std::size_t i, Point p) {
  r.magnitude[i] = p.mag;
  r.magnitude_db[i] = 20.0 * std::log10(p.mag);
  r.phase[i] = p.phase;
}

}  // namespace

// Exceptions cannot cross the parallel region, so singular points are recorded and rethrown.
FrequencyResponse bode_nominal(const TowerParams& p, std::span<const double> omega) {
  FrequencyResponse r = allocate(omega);
  const NominalTowerSystem sys = nominal_tower_system(p);
  const auto n = static_cast<std::ptrdiff_t>(omega.size());
  int failed = 0;
#pragma omp parallel for reduction(+ : failed)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      store(r, std::size_t(i), nominal_point(sys, omega[i]));
    } catch (const SingularityError&) {
      ++failed;
    }
  }
  if (failed) throw SingularityError("pole on the imaginary axis");
  return r;
}

FrequencyResponse bode_demod_amplitude(const TowerParams& p, double omega_r,
                                       std::span<const double> omega) {
  FrequencyResponse r = allocate(omega);
  const DemodTowerSystem sys = demod_tower_system(p, omega_r);
  const auto n = static_cast<std::ptrdiff_t>(omega.size());
  int failed = 0;
#pragma omp parallel for reduction(+ : failed)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      store(r, std::size_t(i), demod_point(sys, omega[i]));
    } catch (const SingularityError&) {
      ++failed;
    }
  }
  if (failed) throw SingularityError("pole on the imaginary axis");
  return r;
}

std::vector<std::size_t> local_maxima(std::span<const double> v) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i + 1 < v.size(); ++i)
    if (v[i] > v[i - 1] && v[i] > v[i + 1]) out.push_back(i);
  return out;
}

SweepResult frequency_sweep(const TowerParams& p, double rate, double duration, double ts) {
  p.validate();
  if (rate < 0.0) throw ArgumentError("sweep rate must be non-negative");
  if (!(duration > 0.0) || !(ts > 0.0)) throw ArgumentError("invalid sweep timing");
  const auto n = static_cast<std::size_t>(std::llround(duration / ts));
  const double wn2 = p.natural_frequency() * p.natural_frequency();
  const double c = p.decay_rate();
  auto omega_at = [&](double t) { return rate * t; };
  auto psi_at = [&](double t) { return 0.5 * rate * t * t; };
  auto rhs = [&](double t, const Eigen::Vector2d& s) {
    return Eigen::Vector2d(-c * s[0] - wn2 * s[1] + p.excitation * std::cos(psi_at(t)), s[0]);
  };
  auto demod_rhs = [&](double t, const Vec4& q) {
    return demod_derivative(demod_tower_system(p, omega_at(t)), q);
  };

  SweepResult r;
  r.t.resize(n + 1);
  r.omega_r.resize(n + 1);
  r.x.resize(n + 1);
  r.a_y.resize(n + 1);
  Eigen::Vector2d s = Eigen::Vector2d::Zero();
  Vec4 q = Vec4::Zero();
  for (std::size_t i = 0;; ++i) {
    const double t = ts * double(i);
    r.t[i] = t;
    r.omega_r[i] = omega_at(t);
    r.x[i] = s[1];
    r.a_y[i] = response_amplitude(q);
    if (i == n) break;
    const Eigen::Vector2d k1 = rhs(t, s), k2 = rhs(t + ts / 2, s + ts / 2 * k1),
                          k3 = rhs(t + ts / 2, s + ts / 2 * k2), k4 = rhs(t + ts, s + ts * k3);
    s += ts / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    const Vec4 m1 = demod_rhs(t, q), m2 = demod_rhs(t + ts / 2, q + ts / 2 * m1),
               m3 = demod_rhs(t + ts / 2, q + ts / 2 * m2), m4 = demod_rhs(t + ts, q + ts * m3);
    q += ts / 6 * (m1 + 2 * m2 + 2 * m3 + m4);
  }
  for (std::size_t i = 1; i + 1 < r.x.size(); ++i) {
    if (r.x[i] > 0.0 && r.x[i] > r.x[i - 1] && r.x[i] >= r.x[i + 1]) {
      r.peak_t.push_back(r.t[i]);
      r.peak_x.push_back(r.x[i]);
      r.peak_a_y.push_back(r.a_y[i]);
      r.peak_omega.push_back(r.omega_r[i]);
    }
  }
  return r;
}

}  // namespace towermpc
