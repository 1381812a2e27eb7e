#include <algorithm>
#include <cmath>

#include "towermpc/analysis.hpp"

namespace towermpc {

double energy_produced(std::span<const double> power, double ts) {
  if (!(ts > 0.0)) throw ArgumentError("sample time must be positive");
  if (power.size() < 2) return 0.0;
  double joules = 0.0;
  for (std::size_t i = 1; i < power.size(); ++i) joules += 0.5 * (power[i] + power[i - 1]) * ts;
  return joules / 3.6e6;
}

std::size_t Histogram::total() const {
  std::size_t n = underflow + overflow;
  for (auto c : counts) n += c;
  return n;
}

std::size_t Histogram::bin_of(double v) const {
  if (v < edges.front() || v > edges.back()) throw RangeError("value outside histogram range");
  if (v == edges.back()) return counts.size() - 1;
  const auto it = std::upper_bound(edges.begin(), edges.end(), v);
  return static_cast<std::size_t>(it - edges.begin()) - 1;
}

Histogram histogram(std::span<const double> signal, std::span<const double> edges) {
  if (edges.size() < 2) throw ArgumentError("histogram needs at least two edges");
  for (std::size_t i = 1; i < edges.size(); ++i)
    if (!(edges[i] > edges[i - 1])) throw ArgumentError("histogram edges must ascend");
  Histogram h;
  h.edges.assign(edges.begin(), edges.end());
  h.counts.assign(edges.size() - 1, 0);
  for (double v : signal) {
    if (v < edges.front())
      ++h.underflow;
    else if (v > edges.back())
      ++h.overflow;
    else
      ++h.counts[h.bin_of(v)];
  }
  return h;
}

std::vector<double> uniform_edges(double lo, double hi, std::size_t bins) {
  if (!(hi > lo) || bins == 0) throw ArgumentError("invalid histogram range");
  std::vector<double> e(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) e[i] = lo + (hi - lo) * double(i) / double(bins);
  e.back() = hi;
  return e;
}

double time_in_band(std::span<const double> signal, double center, double half_width, double ts) {
  std::size_t n = 0;
  for (double v : signal)
    if (std::abs(v - center) <= half_width) ++n;
  return ts * double(n);
}

std::vector<double> crossing_durations(std::span<const double> signal, double lo, double hi,
                                       double ts) {
  if (!(hi > lo)) throw ArgumentError("band must have positive width");
  std::vector<double> out;
  int side = 0;  // −1 below, +1 above, 0 unknown
  std::size_t exit_index = 0;
  for (std::size_t i = 0; i < signal.size(); ++i) {
    const double v = signal[i];
    if (v < lo) {
      if (side == 1) out.push_back(ts * double(i - exit_index));
      side = -1;
      exit_index = i;
    } else if (v > hi) {
      if (side == -1) out.push_back(ts * double(i - exit_index));
      side = 1;
      exit_index = i;
    }
  }
  return out;
}

double rms(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s / double(v.size()));
}

}  // namespace towermpc
