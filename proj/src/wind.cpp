#include <algorithm>
#include <cmath>
#include <random>

#include "towermpc/plant.hpp"

namespace towermpc {

namespace {

std::size_t sample_count(double duration, double ts) {
  if (!(ts > 0.0)) throw ArgumentError("wind sample time must be positive");
  if (!(duration > 0.0)) throw ArgumentError("wind duration must be positive");
  return static_cast<std::size_t>(std::llround(duration / ts));
}

}  // namespace

WindProfile wind_slope(const SlopeWind& c, double ts) {
  if (!(c.u0 > 0.0) || !(c.u1 > c.u0)) throw ArgumentError("slope wind requires U1 > U0 > 0");
  if (c.hold < 0.0 || c.rise < 0.0) throw ArgumentError("hold and rise must be non-negative");
  WindProfile w;
  w.ts = ts;
  w.kind = WindKind::slope;
  w.U.resize(sample_count(c.duration, ts));
  for (std::size_t i = 0; i < w.U.size(); ++i) {
    const double t = w.time(i);
    if (t < c.hold)
      w.U[i] = c.u0;
    else if (t >= c.hold + c.rise)
      w.U[i] = c.u1;
    else
      w.U[i] = c.u0 + (c.u1 - c.u0) * (t - c.hold) / c.rise;
  }
  return w;
}

WindProfile wind_turbulent(const TurbulentWind& c, double ts) {
  if (!(c.mean > 0.0)) throw ArgumentError("mean wind speed must be positive");
  if (!(c.intensity > 0.0 && c.intensity <= 0.5))
    throw ArgumentError("turbulence intensity must lie in (0, 0.5]");
  if (!(c.time_constant > 0.0)) throw ArgumentError("time constant must be positive");
  WindProfile w;
  w.ts = ts;
  w.kind = WindKind::turbulent;
  const std::size_t n = sample_count(c.duration, ts);
  if (n < 2) throw ArgumentError("turbulent wind needs at least two samples");

  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double a = std::exp(-ts / c.time_constant);
  const double b = std::sqrt(1.0 - a * a);
  std::vector<double> s(n);
  double state = 0.0;
  for (double& v : s) {
    state = a * state + b * normal(rng);
    v = state;
  }
  double mean = 0.0;
  for (double v : s) mean += v;
  mean /= double(n);
  double var = 0.0;
  for (double v : s) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / double(n));

  const double sigma = c.intensity * c.mean;
  w.U.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    w.U[i] = std::max(c.floor, c.mean + sigma * (s[i] - mean) / sd);
  return w;
}

WindProfile wind_constant(double wind, double duration, double ts) {
  if (!(wind > 0.0)) throw ArgumentError("wind speed must be positive");
  WindProfile w;
  w.ts = ts;
  w.kind = WindKind::constant;
  w.U.assign(sample_count(duration, ts), wind);
  return w;
}

}  // namespace towermpc
