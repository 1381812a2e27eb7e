#include <algorithm>
#include <limits>

#include "towermpc/qlpv.hpp"

namespace towermpc::reference {

ModelGrid build_model_grid(const QlpvSetup& setup, std::span<const double> wind_set, double ts) {
  if (wind_set.empty()) throw ArgumentError("wind-speed set must not be empty");
  std::vector<LinearModel> models;
  models.reserve(wind_set.size());
  double spacing = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < wind_set.size(); ++i) {
    if (i > 0 && !(wind_set[i] > wind_set[i - 1]))
      throw ArgumentError("wind-speed set must be strictly ascending");
    models.push_back(build_linear_model(setup, wind_set[i], ts));
    if (i == 1) spacing = 0.0;
    if (i > 0) spacing = std::max(spacing, models[i].p - models[i - 1].p);
  }
  return ModelGrid(std::move(models), spacing);
}

}  // namespace towermpc::reference
