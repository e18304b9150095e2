#include "mpfc/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mpfc/log.hpp"

namespace mpfc {

namespace fs = std::filesystem;

namespace {

void append_report(std::ostream& os, const AuditReport& report) {
  os << report.name << ": " << (report.pass ? "PASS" : "FAIL") << " (checks=" << report.checks;
  if (!report.pass) os << ", violations=" << report.issues.size();
  os << ")\n";
  for (const AuditIssue& issue : report.issues) os << "  - " << issue.detail << "\n";
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
  if (!out.good()) throw std::runtime_error("write failed for '" + path.string() + "'");
}

} // namespace

std::string format_audit_reports(const AuditReport& containment, const AuditReport& descent,
                                 const AuditReport& bounds) {
  std::ostringstream os;
  append_report(os, containment);
  append_report(os, descent);
  append_report(os, bounds);
  bool all = containment.pass && descent.pass && bounds.pass;
  os << "overall: " << (all ? "PASS" : "FAIL") << "\n";
  return os.str();
}

int cmd_simulate(const RunConfig& cfg) {
  try {
    fs::create_directories(cfg.out_dir);

    auto t0 = std::chrono::steady_clock::now();
    ClosedLoopRecord record = run_mpfc(cfg.loop);
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    log::info("simulate '%s': %zu steps in %.2fs, J_cl = %.9g", cfg.label.c_str(),
              record.steps.size(), seconds, record.total_cost);

    AuditReport containment = audit_containment(record, cfg.loop.outer);
    AuditReport descent = audit_descent(record);
    AuditReport bounds = audit_bounds(record);
    std::string report = format_audit_reports(containment, descent, bounds);

    bool want_csv = cfg.formats != OutputFormats::report;
    bool want_report = cfg.formats != OutputFormats::csv;
    if (want_csv) {
      std::ostringstream traj, steps;
      write_trajectory_csv(traj, record, cfg.loop.plant.dim());
      write_steps_csv(steps, record);
      write_file(fs::path(cfg.out_dir) / "trajectory.csv", traj.str());
      write_file(fs::path(cfg.out_dir) / "steps.csv", steps.str());
    }
    if (want_report) write_file(fs::path(cfg.out_dir) / "audit.txt", report);

    std::fputs(report.c_str(), stdout);
    return containment.pass && descent.pass && bounds.pass ? kExitOk : kExitAuditFailed;
  } catch (const std::exception& e) {
    log::error("simulate: %s", e.what());
    return kExitError;
  }
}

int cmd_oracle(const RunConfig& cfg, std::optional<GridSpec> grid_override,
               const std::optional<std::string>& check, const std::string& out_dir) {
  try {
    const MpfcConfig& loop = cfg.loop;
    GridSpec grid = grid_override.value_or(loop.optimizer.grid);
    FeasibilityContext ctx{0.0, loop.horizon(), loop.outer};
    IntegratorConfig icfg = loop.integrator;
    icfg.output_dt = std::max(icfg.output_dt, loop.horizon() / 32.0);
    const SystemModel& model = loop.prediction ? *loop.prediction : loop.plant;
    PredictionDeps deps{model, loop.gains, loop.stage, icfg};

    OptimizerOutcome outcome = grid_oracle(ctx, loop.y0, deps, grid);
    bool any_feasible = std::isfinite(outcome.best_J);
    if (!any_feasible)
      log::warn("oracle: no feasible lattice point (largest c*T below |y0| = %.6g?)",
                loop.y0.norm());

    if (check) {
      LandscapeFile golden = read_landscape_csv(*check);
      if (golden.c.size() != outcome.log.size()) {
        log::error("oracle check: golden file has %zu rows, run produced %zu", golden.c.size(),
                   outcome.log.size());
        return kExitAuditFailed;
      }
      long mismatches = 0;
      for (std::size_t k = 0; k < golden.c.size(); ++k) {
        const Evaluation& e = outcome.log[k];
        bool same_point = std::abs(golden.c[k] - e.params.c) <= 1e-12 * golden.c[k] &&
                          std::abs(golden.T[k] - e.params.T) <= 1e-12 * std::abs(golden.T[k]);
        bool same_feasible = golden.feasible[k] == e.feasible;
        bool same_J = (!golden.feasible[k] && !e.feasible) ||
                      std::abs(golden.J[k] - e.J) <= 1e-6 * (1.0 + std::abs(golden.J[k]));
        if (!(same_point && same_feasible && same_J)) {
          ++mismatches;
          if (mismatches <= 5)
            log::error("oracle check: row %zu differs (c=%.9g T=%.9g J=%.12g vs golden J=%.12g)",
                       k, e.params.c, e.params.T, e.J, golden.J[k]);
        }
      }
      if (mismatches) {
        std::printf("oracle check: FAIL (%ld of %zu rows differ)\n", mismatches, golden.c.size());
        return kExitAuditFailed;
      }
      std::printf("oracle check: PASS (%zu rows within 1e-6 relative)\n", golden.c.size());
      return kExitOk;
    }

    fs::create_directories(out_dir);
    std::ostringstream os;
    write_landscape_csv(os, outcome.log);
    write_file(fs::path(out_dir) / "landscape.csv", os.str());
    if (any_feasible)
      std::printf("oracle: %zu rows, best J = %.12g at (c = %.9g, T = %.9g)\n",
                  outcome.log.size(), outcome.best_J, outcome.best.c, outcome.best.T);
    else
      std::printf("oracle: %zu rows, no feasible lattice point\n", outcome.log.size());
    return kExitOk;
  } catch (const std::exception& e) {
    log::error("oracle: %s", e.what());
    return kExitError;
  }
}

int cmd_audit(const std::string& trajectory_path, const std::string& steps_path,
              const std::optional<RunConfig>& config, const std::string& out_dir) {
  try {
    TrajectoryFile traj = read_trajectory_csv(trajectory_path);
    StepsFile steps = read_steps_csv(steps_path);

    OuterFunnel psi = config ? config->loop.outer : OuterFunnel::infinite();
    AuditReport containment = audit_containment(traj.t, traj.norm_y, traj.phi, psi);
    auto views = steps.cost_views();
    AuditReport descent = audit_descent(views);
    AuditReport bounds = audit_bounds(views);

    std::string report = format_audit_reports(containment, descent, bounds);
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "audit.txt", report);
    std::fputs(report.c_str(), stdout);
    return containment.pass && descent.pass && bounds.pass ? kExitOk : kExitAuditFailed;
  } catch (const std::exception& e) {
    log::error("audit: %s", e.what());
    return kExitError;
  }
}

} // namespace mpfc
