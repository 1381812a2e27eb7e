#pragma once

#include <string>
#include <vector>

#include "towermpc/qlpv.hpp"

namespace towermpc {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;      // measured error or statistic
  double threshold = 0.0;  // pass bound
  std::string detail;
};

struct VerifyOptions {
  double grid_spacing = 0.002;  // [rad/s] spacing under test
  std::string grid_file;        // when set, the grid under test is loaded from this CSV
  std::uint64_t seed = 42;
};

/// Maximum over 50 rotor speeds in [0, 1.2] of the eigenvalue-shift mismatch.
double eigen_shift_error(const TowerParams& p, int points = 50);
/// Maximum relative mismatch between steady demodulated amplitude and |G(jω_r)|.
double dc_mapping_error(const TowerParams& p, int points = 50);
/// Maximum absolute mismatch between bundle propagation and stepwise simulation.
double prediction_oracle_error(const ModelGrid& grid, int draws, int horizon, std::uint64_t seed);
/// Maximum relative mismatch between the demodulated amplitude and per-cycle peaks of
/// the nominal response for ω_r ∈ [0.2, 1.2] during the standard sweep.
double sweep_tracking_error(const TowerParams& p);

/// Relative RMS change of the 1000-s self-scheduled amplitude trajectory when the grid
/// spacing is halved; `coarse` is the grid under test.
double grid_refinement_error(const QlpvSetup& setup, const ModelGrid& coarse, std::uint64_t seed);

std::vector<CheckResult> run_verification(const VerifyOptions& opts);

}  // namespace towermpc
