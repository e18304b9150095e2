#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mpfc/feasibility.hpp"
#include "mpfc/optimizer.hpp"
#include "mpfc/prediction.hpp"

namespace mpfc {

/// Full configuration of one receding-horizon run. The horizon is n h with
/// n >= 2; the loop samples the plant at t_i = i h until t_end.
struct MpfcConfig {
  MpfcConfig(SystemModel plant_, StageCost stage_, Eigen::VectorXd y0_)
      : plant(std::move(plant_)), stage(std::move(stage_)), y0(std::move(y0_)) {}

  SystemModel plant;
  StageCost stage;
  Eigen::VectorXd y0;

  /// Prediction model used inside the optimizer; the plant itself when
  /// unset. A mismatch hook, nominal by default.
  std::optional<SystemModel> prediction;

  double h = 0.25;
  int n = 20; // horizon H = n h
  double t_end = 1.0;
  double equilibrium_threshold = 1e-8;
  int nodes_per_interval = 200;

  /// Measurement-noise hook: stddev of additive Gaussian noise on the
  /// sampled output. Zero keeps the nominal noiseless handoff.
  double measurement_noise = 0.0;
  std::uint64_t noise_seed = 0;

  GainSpec gains;
  OuterFunnel outer = OuterFunnel::infinite();
  IntegratorConfig integrator;
  OptimizerConfig optimizer;

  double horizon() const { return n * h; }
};

struct StepRecord {
  int index = 0;
  double t_i = 0.0;
  Eigen::VectorXd yhat;
  FunnelParams params;
  double J = 0.0;               // horizon cost of the accepted parameters
  double stage_increment = 0.0; // integrated stage cost over [t_i, t_{i+1}]
  int opt_evaluations = 0;
  AcceptedFrom accepted_from = AcceptedFrom::search;
  bool terminal_mode = false;
  // Audit flags; never silently dropped.
  bool feasibility_ok = true; // warm/fresh candidate feasible before the search
  bool containment_ok = true; // node containment over this interval
  bool descent_ok = true;     // filled post-run
};

struct ClosedLoopRecord {
  std::vector<StepRecord> steps;

  // Stitched closed-loop trajectory at the output nodes.
  std::vector<double> t;
  std::vector<Eigen::VectorXd> y;
  std::vector<Eigen::VectorXd> u;
  std::vector<double> phi; // active boundary value, 0 once the funnel closed
  std::vector<int> step_index;

  double total_cost = 0.0; // sum of stage increments
  std::string termination = "reached-t-end";
};

/// Algorithm: at each t_i measure the output, optimize (c, T) warm-started
/// from the shifted candidate, apply the funnel law continuously to the
/// plant until t_{i+1}, and record everything. Containment and candidate
/// feasibility are audited while running; descent flags are filled at the
/// end of the run.
ClosedLoopRecord run_mpfc(const MpfcConfig& cfg);

// ---- audits ---------------------------------------------------------------

struct AuditIssue {
  long index = 0; // step index or node index
  double t = 0.0;
  std::string detail;
};

struct AuditReport {
  std::string name;
  bool pass = true;
  long checks = 0;
  std::vector<AuditIssue> issues;
};

/// Per-step cost data the descent/bounds audits need; mirrors what
/// steps.csv stores, so file-based re-audits use the same code path.
struct StepCostView {
  double J = 0.0;
  double increment = 0.0;
  double c = 0.0;
};

/// Rearranged per-step descent inequality
/// increment_i <= J_i - J_{i+1} within 1e-6 (1 + |J_i|), plus the telescoped
/// bound: every partial sum of increments <= J_0 + 1e-6.
AuditReport audit_descent(std::span<const StepCostView> steps);

/// Parameter boundedness: c_i <= J_{i-1} + 1e-9 for i >= 1 and
/// max_i c_i <= J_0 + 1e-9.
AuditReport audit_bounds(std::span<const StepCostView> steps);

/// Strict containment at every output node: |y| < phi wherever phi > 0 and
/// |y| <= psi wherever psi is finite. Zero tolerance slack.
AuditReport audit_containment(std::span<const double> t, std::span<const double> norm_y,
                              std::span<const double> phi, const OuterFunnel& psi);

AuditReport audit_descent(const ClosedLoopRecord& record);
AuditReport audit_bounds(const ClosedLoopRecord& record);
AuditReport audit_containment(const ClosedLoopRecord& record, const OuterFunnel& psi);

std::vector<StepCostView> step_cost_views(const ClosedLoopRecord& record);

} // namespace mpfc
