#include <cmath>

#include "towermpc/analysis.hpp"

namespace towermpc {

std::vector<double> turning_points(std::span<const double> signal) {
  std::vector<double> tp;
  for (double v : signal) {
    if (!tp.empty() && v == tp.back()) continue;
    if (tp.size() >= 2 && (tp.back() - tp[tp.size() - 2]) * (v - tp.back()) > 0.0)
      tp.back() = v;  // still moving the same way
    else
      tp.push_back(v);
  }
  return tp;
}

CycleSet rainflow(std::span<const double> signal) {
  CycleSet cycles;
  std::vector<double> stack;
  for (double v : turning_points(signal)) {
    stack.push_back(v);
    while (stack.size() >= 4) {
      const std::size_t n = stack.size();
      const double s1 = stack[n - 4], s2 = stack[n - 3], s3 = stack[n - 2], s4 = stack[n - 1];
      const double inner = std::abs(s3 - s2);
      if (inner > std::abs(s2 - s1) || inner > std::abs(s4 - s3)) break;
      cycles.push_back({inner, 0.5 * (s2 + s3), 1.0});
      stack.erase(stack.end() - 3, stack.end() - 1);
    }
  }
  for (std::size_t i = 0; i + 1 < stack.size(); ++i)
    cycles.push_back({std::abs(stack[i + 1] - stack[i]), 0.5 * (stack[i + 1] + stack[i]), 0.5});
  return cycles;
}

DelResult damage_equivalent_load(const CycleSet& cycles, double m, double duration) {
  if (!(duration > 0.0)) throw ArgumentError("duration must be positive");
  if (!(m > 0.0)) throw ArgumentError("Woehler exponent must be positive");
  double damage = 0.0;
  for (const Cycle& c : cycles) damage += c.count * std::pow(c.range, m);
  DelResult r;
  r.woehler_m = m;
  r.n_eq = duration;
  r.value = std::pow(damage / r.n_eq, 1.0 / m);
  return r;
}

}  // namespace towermpc
