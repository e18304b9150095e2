#pragma once

#include "mpfc/integrator.hpp"
#include "mpfc/stage_cost.hpp"

namespace mpfc {

/// Everything a horizon-cost evaluation needs besides the decision pair.
/// The referenced model and stage cost must outlive the evaluation.
struct PredictionDeps {
  const SystemModel& model;
  GainSpec gains;
  const StageCost& stage;
  IntegratorConfig integrator;
};

struct PredictionResult {
  double total = 0.0;     // J = integral + c
  double integral = 0.0;  // integrated stage cost over [0, H]
  Trajectory trajectory;  // sampled prediction (empty for the degenerate T <= 0 case)
  double effective_T = 0.0;
  bool equilibrium_reached = false;
};

/// The horizon cost J(yhat, c, T): funnel-controlled flight to the origin
/// over [0, T] followed by a free zero-input tail, plus the penalty c.
///
/// For T <= 0 the degenerate convention J = c applies (equilibrium reached
/// between sampling instants). The zero tail is not integrated: once the
/// state is snapped to zero the stage cost vanishes identically.
///
/// Requires the entry condition |yhat| < c T when T > 0; the caller is
/// responsible for full feasibility against the outer funnel.
PredictionResult evaluate_cost(const Eigen::VectorXd& yhat, FunnelParams p,
                               const PredictionDeps& deps, double horizon,
                               const std::vector<double>& extra_nodes = {});

} // namespace mpfc
