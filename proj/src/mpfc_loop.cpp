#include "mpfc/mpfc_loop.hpp"

#include <cmath>
#include <random>

#include "mpfc/log.hpp"

namespace mpfc {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void validate(const MpfcConfig& cfg) {
  std::vector<std::string> issues;
  if (!(cfg.h > 0.0)) issues.push_back("step size h must be positive");
  if (cfg.n < 2) issues.push_back("horizon multiplier n must be >= 2");
  if (!(cfg.t_end > 0.0)) issues.push_back("t_end must be positive");
  if (cfg.y0.size() != cfg.plant.dim()) issues.push_back("y0 dimension does not match the plant");
  if (cfg.prediction && cfg.prediction->dim() != cfg.plant.dim())
    issues.push_back("prediction model dimension does not match the plant");
  if (cfg.stage.dim() != cfg.plant.dim())
    issues.push_back("stage cost dimension does not match the plant");
  if (cfg.nodes_per_interval < 1) issues.push_back("nodes_per_interval must be >= 1");
  if (!issues.empty()) throw ConfigError(std::move(issues));
}

} // namespace

ClosedLoopRecord run_mpfc(const MpfcConfig& cfg) {
  validate(cfg);

  const double h = cfg.h;
  const double H = cfg.horizon();
  const SystemModel& plant = cfg.plant;
  const SystemModel& prediction_model = cfg.prediction ? *cfg.prediction : cfg.plant;

  const double psi0 = cfg.outer.value(0.0);
  if (!(cfg.y0.norm() < psi0))
    throw std::domain_error("run_mpfc: |y(0)| = " + fmt(cfg.y0.norm()) +
                            " must be below psi(0) = " + fmt(psi0));

  // Coarser output grid for the optimizer's cost evaluations; the accepted
  // cost value does not depend on the sampling.
  IntegratorConfig icfg_pred = cfg.integrator;
  icfg_pred.output_dt = std::max(cfg.integrator.output_dt, H / 32.0);
  PredictionDeps deps{prediction_model, cfg.gains, cfg.stage, icfg_pred};

  IntegratorConfig icfg_plant = cfg.integrator;
  icfg_plant.output_dt = h / cfg.nodes_per_interval;

  std::mt19937_64 noise_rng(cfg.noise_seed);
  std::normal_distribution<double> noise(0.0, 1.0);

  const int n_steps = static_cast<int>(std::ceil(cfg.t_end / h - 1e-9));

  ClosedLoopRecord rec;
  Eigen::VectorXd y = cfg.y0;
  std::optional<FunnelParams> prev;

  for (int i = 0; i < n_steps; ++i) {
    const double t_i = i * h;
    Eigen::VectorXd yhat = y;
    if (cfg.measurement_noise > 0.0)
      for (Eigen::Index k = 0; k < yhat.size(); ++k)
        yhat[k] += cfg.measurement_noise * noise(noise_rng);

    FeasibilityContext ctx{t_i, H, cfg.outer};
    StepRecord step;
    step.index = i;
    step.t_i = t_i;
    step.yhat = yhat;

    const double norm_yhat = yhat.norm();
    if (norm_yhat <= cfg.equilibrium_threshold) {
      // Terminal mode: the state is at the equilibrium up to the snap
      // accuracy. Re-seed with a fresh small candidate; no search needed
      // since J = c + O(|yhat|^2) there.
      step.terminal_mode = true;
      double base_c = prev ? prev->c : make_candidate(ctx, yhat).c;
      FunnelParams fresh{std::max(cfg.optimizer.c_min, 0.5 * base_c), H};
      step.feasibility_ok = static_cast<bool>(is_feasible(fresh, ctx, yhat));
      if (!step.feasibility_ok) fresh = make_candidate(ctx, yhat);
      step.params = fresh;
      step.J = evaluate_cost(yhat, fresh, deps, H).total;
      step.opt_evaluations = 1;
      step.accepted_from = AcceptedFrom::fresh_candidate;
    } else {
      std::optional<FunnelParams> warm;
      WarmKind kind = WarmKind::none;
      if (prev) {
        if (auto shifted = shift_candidate(*prev, h)) {
          warm = shifted;
          kind = WarmKind::shifted;
        } else {
          // Funnel expired inside the previous interval but the state is
          // not yet under the threshold: fresh re-seed.
          FunnelParams fresh{std::max(cfg.optimizer.c_min, 0.5 * prev->c), H};
          if (is_feasible(fresh, ctx, yhat)) {
            warm = fresh;
            kind = WarmKind::fresh;
          }
        }
        step.feasibility_ok = warm && is_feasible(*warm, ctx, yhat).ok;
        if (!step.feasibility_ok)
          log::warn("step %d: warm candidate infeasible at t=%.6g", i, t_i);
        if (warm && !is_feasible(*warm, ctx, yhat)) warm.reset();
      }
      OptimizerOutcome outcome = search(ctx, yhat, warm, kind, deps, cfg.optimizer);
      step.params = outcome.best;
      step.J = outcome.best_J;
      step.opt_evaluations = outcome.evaluations;
      step.accepted_from = outcome.accepted_from;
    }

    // Apply the funnel law to the plant over [t_i, t_i + h]. The handoff
    // below uses the exact terminal state; measuring is noiseless here.
    FunnelPhaseSpec spec;
    spec.until = h;
    spec.include_t_max_node = false;
    Trajectory traj =
        integrate_funnel_phase(plant, step.params, cfg.gains, cfg.stage, y, icfg_plant, spec);

    step.stage_increment = traj.cost.back();
    rec.total_cost += step.stage_increment;

    // Stitch, skipping the duplicate first node of later intervals.
    for (std::size_t k = (i == 0 ? 0 : 1); k < traj.size(); ++k) {
      double tau = traj.t[k];
      double phi = tau < step.params.T ? step.params.c * (step.params.T - tau) : 0.0;
      double norm_y = traj.y[k].norm();
      if (phi > 0.0 && !(norm_y < phi)) step.containment_ok = false;
      if (!cfg.outer.is_infinite() && !(norm_y <= cfg.outer.value(t_i + tau)))
        step.containment_ok = false;
      rec.t.push_back(t_i + tau);
      rec.y.push_back(traj.y[k]);
      rec.u.push_back(traj.u[k]);
      rec.phi.push_back(phi);
      rec.step_index.push_back(i);
    }

    y = traj.y.back();
    prev = step.params;
    rec.steps.push_back(std::move(step));
  }

  // Fill descent flags from the same audit the reports use.
  auto views = step_cost_views(rec);
  AuditReport descent = audit_descent(views);
  for (const AuditIssue& issue : descent.issues)
    if (issue.index >= 0 && issue.index < static_cast<long>(rec.steps.size()))
      rec.steps[static_cast<std::size_t>(issue.index)].descent_ok = false;

  rec.termination = "reached-t-end";
  return rec;
}

// ---- audits ---------------------------------------------------------------

std::vector<StepCostView> step_cost_views(const ClosedLoopRecord& record) {
  std::vector<StepCostView> views;
  views.reserve(record.steps.size());
  for (const StepRecord& s : record.steps)
    views.push_back({s.J, s.stage_increment, s.params.c});
  return views;
}

AuditReport audit_descent(std::span<const StepCostView> steps) {
  AuditReport report;
  report.name = "descent";
  for (std::size_t i = 0; i + 1 < steps.size(); ++i) {
    ++report.checks;
    double lhs = steps[i].increment;
    double rhs = steps[i].J - steps[i + 1].J;
    double tol = 1e-6 * (1.0 + std::abs(steps[i].J));
    if (lhs > rhs + tol) {
      report.pass = false;
      report.issues.push_back({static_cast<long>(i), 0.0,
                               "increment " + fmt(lhs) + " exceeds cost drop " + fmt(rhs) +
                                   " at step " + std::to_string(i)});
    }
  }
  if (!steps.empty()) {
    double bound = steps[0].J + 1e-6;
    double partial = 0.0;
    for (std::size_t i = 0; i < steps.size(); ++i) {
      ++report.checks;
      partial += steps[i].increment;
      if (partial > bound) {
        report.pass = false;
        report.issues.push_back({static_cast<long>(i), 0.0,
                                 "partial cost sum " + fmt(partial) + " exceeds J_0 bound " +
                                     fmt(bound) + " at step " + std::to_string(i)});
      }
    }
  }
  return report;
}

AuditReport audit_bounds(std::span<const StepCostView> steps) {
  AuditReport report;
  report.name = "bounds";
  if (steps.empty()) return report;
  double max_c = 0.0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    max_c = std::max(max_c, steps[i].c);
    if (i == 0) continue;
    ++report.checks;
    if (steps[i].c > steps[i - 1].J + 1e-9) {
      report.pass = false;
      report.issues.push_back({static_cast<long>(i), 0.0,
                               "c = " + fmt(steps[i].c) + " exceeds previous cost " +
                                   fmt(steps[i - 1].J) + " at step " + std::to_string(i)});
    }
  }
  ++report.checks;
  if (max_c > steps[0].J + 1e-9) {
    report.pass = false;
    report.issues.push_back(
        {0, 0.0, "max c = " + fmt(max_c) + " exceeds initial cost " + fmt(steps[0].J)});
  }
  return report;
}

AuditReport audit_containment(std::span<const double> t, std::span<const double> norm_y,
                              std::span<const double> phi, const OuterFunnel& psi) {
  AuditReport report;
  report.name = "containment";
  for (std::size_t k = 0; k < t.size(); ++k) {
    ++report.checks;
    if (phi[k] > 0.0 && !(norm_y[k] < phi[k])) {
      report.pass = false;
      report.issues.push_back({static_cast<long>(k), t[k],
                               "|y| = " + fmt(norm_y[k]) + " not strictly below phi = " +
                                   fmt(phi[k]) + " at t = " + fmt(t[k])});
    }
    if (!psi.is_infinite() && !(norm_y[k] <= psi.value(t[k]))) {
      report.pass = false;
      report.issues.push_back({static_cast<long>(k), t[k],
                               "|y| = " + fmt(norm_y[k]) + " above psi = " + fmt(psi.value(t[k])) +
                                   " at t = " + fmt(t[k])});
    }
  }
  return report;
}

AuditReport audit_descent(const ClosedLoopRecord& record) {
  auto views = step_cost_views(record);
  return audit_descent(std::span<const StepCostView>(views));
}

AuditReport audit_bounds(const ClosedLoopRecord& record) {
  auto views = step_cost_views(record);
  return audit_bounds(std::span<const StepCostView>(views));
}

AuditReport audit_containment(const ClosedLoopRecord& record, const OuterFunnel& psi) {
  std::vector<double> norms;
  norms.reserve(record.y.size());
  for (const auto& v : record.y) norms.push_back(v.norm());
  return audit_containment(record.t, norms, record.phi, psi);
}

} // namespace mpfc
