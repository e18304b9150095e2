#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

#include "mpfc/errors.hpp"
#include "mpfc/funnel.hpp"
#include "mpfc/stage_cost.hpp"
#include "mpfc/system.hpp"

namespace mpfc {

struct IntegratorConfig {
  double abs_tol = 1e-9;
  double rel_tol = 1e-6;
  /// Spatial accuracy delta of the funnel phase: integration stops at
  /// t_max = T - delta/c, where containment bounds the state norm by delta.
  double spatial_accuracy = 1e-9;
  double initial_step = 1e-3;
  double min_step = 1e-13;
  long max_steps = 10'000'000;
  /// Spacing of the dense-output sample grid.
  double output_dt = 1e-2;
};

enum class Termination { reached_end, hit_t_max, equilibrium, error };

const char* termination_name(Termination t);

/// Sampled record of one integration: nodes, states, and (for funnel
/// phases) controls and running cost. `u` and `cost` are empty for raw
/// integrations.
struct Trajectory {
  std::vector<double> t;
  std::vector<Eigen::VectorXd> y;
  std::vector<Eigen::VectorXd> u;
  std::vector<double> cost;
  Termination termination = Termination::reached_end;

  std::size_t size() const { return t.size(); }
};

/// Adaptive Dormand-Prince 4(5) integration of dx = rhs(t, x) over [a, b]
/// with 4th-order dense output at the requested nodes (all must lie in
/// [a, b]; they are sorted and deduplicated internally).
///
/// A FunnelViolation or EvalError thrown by the rhs at a trial stage is
/// treated as a failed step and retried with half the step size; only when
/// the step size floor is reached does the error propagate. Throws
/// IntegrationError on step underflow or when max_steps is exhausted.
Trajectory integrate(const OdeRhs& rhs, const Eigen::VectorXd& x0, double a, double b,
                     const IntegratorConfig& cfg, std::span<const double> nodes);

struct FunnelPhaseSpec {
  /// End of the requested interval. Negative means "integrate exactly to
  /// t_max = T - delta/c". If `until` exceeds t_max the trajectory is
  /// extended past t_max by the snap convention y = 0, u = 0.
  double until = -1.0;
  /// Additional sample times merged into the uniform output grid.
  std::vector<double> extra_nodes;
  /// Whether to sample exactly at t_max. The boundary there is only delta
  /// wide, so callers checking zero-slack containment on a grid leave this
  /// off.
  bool include_t_max_node = true;
};

/// Integrates the closed loop of `model` under the funnel law of (p, g)
/// from y0, carrying the running cost as an augmented state.
///
/// Requires the funnel entry condition |y0| < c T. Containment guarantees
/// |y(t_max)| < phi(t_max) = delta, which justifies snapping the state to
/// zero wherever the trajectory extends past t_max.
Trajectory integrate_funnel_phase(const SystemModel& model, FunnelParams p, GainSpec g,
                                  const StageCost& stage, const Eigen::VectorXd& y0,
                                  const IntegratorConfig& cfg, const FunnelPhaseSpec& spec = {});

} // namespace mpfc
