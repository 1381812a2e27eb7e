#include <cmath>

#include "towermpc/analysis.hpp"

namespace towermpc::reference {

namespace {

std::complex<double> solve_channel(const Eigen::MatrixXd& A, const Eigen::VectorXd& B, int row,
                                   double w) {
  Eigen::RowVectorXd c = Eigen::RowVectorXd::Zero(A.rows());
  c[row] = 1.0;
  return frequency_response(A, B, c, w);
}

FrequencyResponse empty_like(std::span<const double> omega) {
  FrequencyResponse r;
  r.omega.assign(omega.begin(), omega.end());
  return r;
}

}  // namespace

FrequencyResponse bode_nominal(const TowerParams& p, std::span<const double> omega) {
  const NominalTowerSystem sys = nominal_tower_system(p);
  FrequencyResponse r = empty_like(omega);
  for (double w : omega) {
    const auto h = solve_channel(sys.A, sys.B, 1, w);
    r.magnitude.push_back(std::abs(h));
    r.magnitude_db.push_back(20.0 * std::log10(std::abs(h)));
    r.phase.push_back(std::arg(h));
  }
  return r;
}

FrequencyResponse bode_demod_amplitude(const TowerParams& p, double omega_r,
                                       std::span<const double> omega) {
  const DemodTowerSystem sys = demod_tower_system(p, omega_r);
  FrequencyResponse r = empty_like(omega);
  for (double w : omega) {
    const auto h3 = solve_channel(sys.A, sys.B, 2, w);
    const auto h4 = solve_channel(sys.A, sys.B, 3, w);
    const double mag = std::sqrt(std::norm(h3) + std::norm(h4));
    r.magnitude.push_back(mag);
    r.magnitude_db.push_back(20.0 * std::log10(mag));
    r.phase.push_back(std::arg(h3));
  }
  return r;
}

}  // namespace towermpc::reference
