#include "mpfc/prediction.hpp"

#include <cmath>

namespace mpfc {

PredictionResult evaluate_cost(const Eigen::VectorXd& yhat, FunnelParams p,
                               const PredictionDeps& deps, double horizon,
                               const std::vector<double>& extra_nodes) {
  if (!(horizon > 0.0)) throw std::invalid_argument("evaluate_cost: horizon must be positive");
  if (!(p.c > 0.0)) throw std::invalid_argument("evaluate_cost: c must be positive");

  PredictionResult res;
  if (p.T <= 0.0) {
    // Unified-notation convention: the funnel already closed, J = c.
    res.total = p.c;
    res.integral = 0.0;
    res.effective_T = 0.0;
    res.equilibrium_reached = true;
    res.trajectory.termination = Termination::equilibrium;
    return res;
  }

  if (!(yhat.norm() < p.c * p.T)) throw FunnelViolation(0.0, yhat.norm(), p.c * p.T);

  FunnelPhaseSpec spec;
  spec.until = horizon;
  spec.extra_nodes = extra_nodes;
  res.trajectory = integrate_funnel_phase(deps.model, p, deps.gains, deps.stage, yhat,
                                          deps.integrator, spec);
  res.integral = res.trajectory.cost.empty() ? 0.0 : res.trajectory.cost.back();
  res.total = res.integral + p.c;
  res.effective_T = std::min(p.T, horizon);
  res.equilibrium_reached = res.trajectory.termination == Termination::equilibrium;
  return res;
}

} // namespace mpfc
