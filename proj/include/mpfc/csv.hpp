#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mpfc/mpfc_loop.hpp"
#include "mpfc/optimizer.hpp"

namespace mpfc {

// Emitted file schemas, exact to the column:
//   trajectory.csv: t, y_1..y_m, u_1..u_m, phi, norm_y, step_index
//   steps.csv:      i, t_i, c_star, T_star, J_H, stage_increment, opt_evals, accepted_from
//   landscape.csv:  c, T, J, feasible
// All floats are written with 17 significant digits so that parsing them
// back reproduces the exact doubles.

void write_trajectory_csv(std::ostream& os, const ClosedLoopRecord& record, int dim);
void write_steps_csv(std::ostream& os, const ClosedLoopRecord& record);
void write_landscape_csv(std::ostream& os, const std::vector<Evaluation>& log);

/// trajectory.csv parsed back into audit-ready arrays.
struct TrajectoryFile {
  int dim = 0;
  std::vector<double> t;
  std::vector<Eigen::VectorXd> y;
  std::vector<Eigen::VectorXd> u;
  std::vector<double> phi;
  std::vector<double> norm_y;
  std::vector<int> step_index;
};

/// steps.csv parsed back.
struct StepsFile {
  std::vector<int> index;
  std::vector<double> t_i;
  std::vector<double> c_star;
  std::vector<double> T_star;
  std::vector<double> J;
  std::vector<double> increment;
  std::vector<int> opt_evals;
  std::vector<std::string> accepted_from;

  std::vector<StepCostView> cost_views() const;
};

struct LandscapeFile {
  std::vector<double> c, T, J;
  std::vector<bool> feasible;
};

/// Readers throw SchemaError naming the offending column or row on any
/// mismatch with the emitted schema.
TrajectoryFile read_trajectory_csv(const std::string& path);
StepsFile read_steps_csv(const std::string& path);
LandscapeFile read_landscape_csv(const std::string& path);

} // namespace mpfc
