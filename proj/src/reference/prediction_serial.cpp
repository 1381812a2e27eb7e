#include "towermpc/prediction.hpp"

#include <vector>

namespace towermpc::reference {

PredictionBundle build_prediction_bundle(const ModelGrid& grid, double p_now,
                                         const SchedulingSequence& schedule) {
  const int np = schedule.horizon();
  if (np < 1) throw ArgumentError("schedule must cover at least one step");
  std::vector<const LinearModel*> models{&grid.nearest(p_now)};
  for (double p : schedule.points) models.push_back(&grid.nearest(p));

  PredictionBundle b;
  b.horizon = np;
  b.H = Eigen::MatrixXd::Zero(np, kStates);
  b.S = Eigen::MatrixXd::Zero(np, kInputs * np);
  b.L = Eigen::MatrixXd::Zero(np, kStates * np);
  b.D = Eigen::MatrixXd::Zero(np, kInputs * np);
  b.Y_off.resize(np);
  b.dX_off.resize(kStates * np);
  b.U_off.resize(kInputs * np);
  b.x_off_now = models[0]->x_off;

  // transition[j] = A(p_{k+i}) ... A(p_{k+j+1}) after processing row i > j.
  std::vector<Mat5> transition(static_cast<std::size_t>(np), Mat5::Identity());
  Mat5 from_start = Mat5::Identity();
  for (int i = 0; i < np; ++i) {
    const LinearModel& step = *models[i];
    const LinearModel& out = *models[i + 1];
    from_start = step.Ad * from_start;
    for (int j = 0; j < i; ++j) transition[j] = step.Ad * transition[j];
    for (int j = 0; j <= i; ++j) {
      // Effect of inputs at step j on the state at step i+1.
      const Mat5 tail = (j == i) ? Mat5::Identity() : Mat5(transition[j]);
      b.S.block<1, kInputs>(i, kInputs * j) = out.C * tail * models[j]->Bd;
      b.L.block<1, kStates>(i, kStates * j) = out.C * tail;
    }
    b.H.row(i) = out.C * from_start;
    b.Y_off[i] = out.y_off;
    b.dX_off.segment<kStates>(kStates * i) = step.x_off - out.x_off;
    b.U_off.segment<kInputs>(kInputs * i) = step.u_off;
  }
  return b;
}

}  // namespace towermpc::reference
