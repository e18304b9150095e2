// Acceptance suite: the project-level checks, one criterion per function,
// each printing a single PASS/FAIL line (plus detail lines on failure).
// Run all with no arguments or a single one with --criterion N.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "mpfc/commands.hpp"
#include "support/oracles.hpp"

using namespace mpfc;

namespace {

struct Checker {
  int failures = 0;
  std::vector<std::string> details;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      ++failures;
      details.push_back(what);
    }
  }
};

std::string config_file(const char* name) {
  return std::string(MPFC_CONFIG_DIR) + "/" + name;
}

const RunConfig& scenario(const char* name) {
  static std::map<std::string, RunConfig> cache;
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, load_config(config_file(name))).first;
  return it->second;
}

const ClosedLoopRecord& run_of(const char* name) {
  static std::map<std::string, ClosedLoopRecord> cache;
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, run_mpfc(scenario(name).loop)).first;
  return it->second;
}

const char* const kScenarios[] = {"paper-example.toml", "scalar-neg-u.toml", "affine-psi.toml"};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// 1. Demo scenario end to end: 12 steps emitted, all audits pass, well
// under the runtime cap.
void criterion_1(Checker& c) {
  namespace fs = std::filesystem;
  fs::path out = fs::temp_directory_path() / "mpfc-acceptance" / "demo";
  fs::remove_all(out);

  RunConfig cfg = load_config_text(paper_example_toml());
  cfg.out_dir = out.string();

  auto t0 = std::chrono::steady_clock::now();
  int status = cmd_simulate(cfg);
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  c.require(status == kExitOk, "demo run exited with status " + std::to_string(status) +
                                   " (an audit failed or the run aborted)");
  c.require(seconds < 300.0, "runtime " + fmt(seconds) + "s exceeds 300s");
  if (status == kExitOk) {
    StepsFile steps = read_steps_csv((out / "steps.csv").string());
    c.require(steps.index.size() == 12,
              "expected 12 steps, got " + std::to_string(steps.index.size()));
  }
}

// 2. The funnel entry c_i T_i decreases strictly across all 12 steps.
void criterion_2(Checker& c) {
  const ClosedLoopRecord& rec = run_of("paper-example.toml");
  for (std::size_t i = 1; i < rec.steps.size(); ++i) {
    double prev = rec.steps[i - 1].params.c * rec.steps[i - 1].params.T;
    double cur = rec.steps[i].params.c * rec.steps[i].params.T;
    c.require(cur < prev, "c*T did not decrease at step " + std::to_string(i) + " (" + fmt(prev) +
                              " -> " + fmt(cur) + ")");
  }
}

// 3. Strict containment with zero slack at every output node, every scenario.
void criterion_3(Checker& c) {
  for (const char* name : kScenarios) {
    const ClosedLoopRecord& rec = run_of(name);
    AuditReport report = audit_containment(rec, scenario(name).loop.outer);
    c.require(report.pass, std::string(name) + ": " +
                               (report.issues.empty() ? "containment failed"
                                                      : report.issues.front().detail));
  }
}

// 4. Per-step descent inequality, bounded partial sums, bounded c.
void criterion_4(Checker& c) {
  for (const char* name : kScenarios) {
    const ClosedLoopRecord& rec = run_of(name);
    AuditReport descent = audit_descent(rec);
    AuditReport bounds = audit_bounds(rec);
    c.require(descent.pass, std::string(name) + ": " +
                                (descent.issues.empty() ? "descent failed"
                                                        : descent.issues.front().detail));
    c.require(bounds.pass, std::string(name) + ": " +
                               (bounds.issues.empty() ? "bounds failed"
                                                      : bounds.issues.front().detail));
  }
}

// 5. Convergence proxy: |y(t_end)| <= 1e-2 |y(0)| on every scenario (Q is
// positive definite in all three).
void criterion_5(Checker& c) {
  for (const char* name : kScenarios) {
    const RunConfig& cfg = scenario(name);
    const ClosedLoopRecord& rec = run_of(name);
    double ratio = rec.y.back().norm() / cfg.loop.y0.norm();
    c.require(cfg.loop.stage.q_positive_definite(), std::string(name) + ": Q not PD");
    c.require(ratio <= 1e-2, std::string(name) + ": |y(t_end)|/|y0| = " + fmt(ratio) +
                                 " exceeds 1e-2");
  }
}

// 6. Constructive candidates: 1000 random starts always feasible; shifted
// candidates stay feasible after one applied interval (100 simulated steps).
void criterion_6(Checker& c) {
  std::mt19937 rng(0xACCE55);
  std::uniform_real_distribution<double> td(0.0, 10.0), Hd(0.5, 10.0), frac(0.0, 0.999);
  std::uniform_int_distribution<int> kind(0, 2);
  auto random_outer = [&]() {
    std::uniform_real_distribution<double> ad(0.5, 8.0), bd(0.0, 1.0), rd(0.0, 1.0);
    switch (kind(rng)) {
      case 0: return OuterFunnel::infinite();
      case 1: return OuterFunnel::affine(ad(rng), bd(rng));
      default: return OuterFunnel::exponential(ad(rng), bd(rng), rd(rng));
    }
  };

  int done = 0, fail = 0;
  while (done < 1000) {
    FeasibilityContext ctx{td(rng), Hd(rng), random_outer()};
    double psi0 = ctx.outer.value(ctx.t_hat);
    if (!(psi0 > 0.0)) continue;
    double norm = frac(rng) * (std::isinf(psi0) ? 10.0 : psi0);
    FunnelParams p = make_candidate_norm(ctx, norm);
    if (!is_feasible_norm(p, ctx, norm).ok) ++fail;
    ++done;
  }
  c.require(fail == 0, std::to_string(fail) + " of 1000 constructive candidates infeasible");

  // one-step shift feasibility on simulated trajectories
  SystemModel model = builtin_model("scalar-neg-u");
  StageCost stage(Eigen::MatrixXd::Identity(1, 1), 0.1 * Eigen::MatrixXd::Identity(1, 1));
  IntegratorConfig icfg;
  icfg.output_dt = 0.05;
  const double h = 0.25, H = 2.5;
  std::uniform_real_distribution<double> cd(0.4, 3.0), Td(0.3, H), yd(-0.95, 0.95);

  int steps = 0, shift_fail = 0;
  while (steps < 100) {
    FeasibilityContext ctx{td(rng), H, random_outer()};
    FunnelParams p{cd(rng), Td(rng)};
    if (p.T <= h) continue;
    Eigen::VectorXd y0(1);
    y0 << yd(rng) * p.c * p.T;
    if (!is_feasible(p, ctx, y0).ok) continue;

    FunnelPhaseSpec spec;
    spec.until = h;
    Trajectory traj = integrate_funnel_phase(model, p, GainSpec{}, stage, y0, icfg, spec);
    Eigen::VectorXd y_h = traj.y.back();
    FeasibilityContext next{ctx.t_hat + h, H, ctx.outer};
    if (!is_feasible(FunnelParams{p.c, p.T - h}, next, y_h).ok) ++shift_fail;
    ++steps;
  }
  c.require(shift_fail == 0,
            std::to_string(shift_fail) + " of 100 shifted candidates infeasible after one step");
}

// 7. Integrator accuracy: analytic decay to 1e-8, funnel-phase terminal norm
// within delta + tolerance on every scenario, self-convergence under halving.
void criterion_7(Checker& c) {
  IntegratorConfig tight;
  tight.abs_tol = 1e-12;
  tight.rel_tol = 1e-10;
  OdeRhs decay = [](double, const Eigen::VectorXd& x, Eigen::VectorXd& dx) { dx = -x; };
  Eigen::VectorXd one(1);
  one << 1.0;
  Trajectory traj = integrate(decay, one, 0.0, 1.0, tight, std::vector<double>{1.0});
  double err = std::abs(traj.y[0][0] - std::exp(-1.0));
  c.require(err <= 1e-8, "analytic decay error " + fmt(err) + " exceeds 1e-8");

  for (const char* name : kScenarios) {
    const MpfcConfig& loop = scenario(name).loop;
    FeasibilityContext ctx{0.0, loop.horizon(), loop.outer};
    FunnelParams p = make_candidate(ctx, loop.y0);
    Trajectory phase = integrate_funnel_phase(loop.plant, p, loop.gains, loop.stage, loop.y0,
                                              loop.integrator);
    double terminal = phase.y.back().norm();
    double bound = loop.integrator.spatial_accuracy + loop.integrator.abs_tol;
    c.require(terminal <= bound, std::string(name) + ": terminal norm " + fmt(terminal) +
                                     " exceeds " + fmt(bound));
  }

  const MpfcConfig& scalar = scenario("scalar-neg-u.toml").loop;
  FunnelParams p{1.0, 1.0};
  Eigen::VectorXd y0 = scalar.y0;
  IntegratorConfig coarse = scalar.integrator;
  IntegratorConfig fine = coarse;
  fine.abs_tol *= 0.5;
  fine.rel_tol *= 0.5;
  Trajectory a = integrate_funnel_phase(scalar.plant, p, scalar.gains, scalar.stage, y0, coarse);
  Trajectory b = integrate_funnel_phase(scalar.plant, p, scalar.gains, scalar.stage, y0, fine);
  double diff = (a.y.back() - b.y.back()).norm();
  c.require(diff < 10.0 * coarse.abs_tol,
            "self-convergence: terminal difference " + fmt(diff) + " exceeds 10x abs_tol");
}

// 8. Search within 5% of the 50x50 lattice on both benchmarks; determinism.
void criterion_8(Checker& c) {
  {
    SystemModel model = builtin_model("scalar-neg-u");
    StageCost stage(Eigen::MatrixXd::Identity(1, 1), 0.1 * Eigen::MatrixXd::Identity(1, 1));
    IntegratorConfig icfg;
    icfg.output_dt = 0.125;
    PredictionDeps deps{model, GainSpec{}, stage, icfg};
    FeasibilityContext ctx{0.0, 2.0, OuterFunnel::infinite()};
    Eigen::VectorXd yhat(1);
    yhat << 0.5;

    GridSpec grid{0.3, 10.0, 50, 0.05, 2.0, 50};
    OptimizerOutcome oracle = grid_oracle(ctx, yhat, deps, grid);
    OptimizerOutcome found = search(ctx, yhat, std::nullopt, WarmKind::none, deps,
                                    OptimizerConfig{});
    c.require(found.best_J <= oracle.best_J * 1.05,
              "scalar: search J " + fmt(found.best_J) + " worse than 1.05x grid J " +
                  fmt(oracle.best_J));
  }
  {
    const MpfcConfig& loop = scenario("paper-example.toml").loop;
    IntegratorConfig icfg = loop.integrator;
    icfg.output_dt = loop.horizon() / 32.0;
    PredictionDeps deps{loop.plant, loop.gains, loop.stage, icfg};
    FeasibilityContext ctx{0.0, loop.horizon(), loop.outer};

    GridSpec grid = loop.optimizer.grid;
    grid.c_count = 50;
    grid.T_count = 50;
    OptimizerOutcome oracle = grid_oracle(ctx, loop.y0, deps, grid);
    OptimizerOutcome found =
        search(ctx, loop.y0, std::nullopt, WarmKind::none, deps, loop.optimizer);
    c.require(found.best_J <= oracle.best_J * 1.05,
              "2-d step 0: search J " + fmt(found.best_J) + " worse than 1.05x grid J " +
                  fmt(oracle.best_J));

    OptimizerOutcome again =
        search(ctx, loop.y0, std::nullopt, WarmKind::none, deps, loop.optimizer);
    c.require(found.best.c == again.best.c && found.best.T == again.best.T &&
                  found.best_J == again.best_J && found.evaluations == again.evaluations,
              "repeated seeded search differed");
  }
}

// 9. Extending the horizon by one step never changes the cost.
void criterion_9(Checker& c) {
  SystemModel model = builtin_model("scalar-neg-u");
  StageCost stage(Eigen::MatrixXd::Identity(1, 1), 0.1 * Eigen::MatrixXd::Identity(1, 1));
  IntegratorConfig icfg;
  icfg.output_dt = 0.125;
  PredictionDeps deps{model, GainSpec{}, stage, icfg};
  const double H = 2.0, h = 0.25;

  std::mt19937 rng(9);
  std::uniform_real_distribution<double> cd(0.3, 4.0), Td(0.1, H - h), yd(-0.9, 0.9);
  int worst_count = 0;
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    FunnelParams p{cd(rng), Td(rng)};
    Eigen::VectorXd yhat(1);
    yhat << yd(rng) * p.c * p.T;
    double J_short = evaluate_cost(yhat, p, deps, H - h).total;
    double J_long = evaluate_cost(yhat, p, deps, H).total;
    double diff = std::abs(J_short - J_long) / (1.0 + std::abs(J_long));
    worst = std::max(worst, diff);
    if (diff > 1e-10) ++worst_count;
  }
  c.require(worst_count == 0, std::to_string(worst_count) +
                                  " of 100 probes changed cost under extension (worst " +
                                  fmt(worst) + ")");
}

struct Criterion {
  int number;
  const char* summary;
  void (*fn)(Checker&);
};

const Criterion kCriteria[] = {
    {1, "12-step demo run completes with all audits passing", criterion_1},
    {2, "funnel entry c*T strictly decreasing over the demo run", criterion_2},
    {3, "zero-slack containment at every node on all scenarios", criterion_3},
    {4, "per-step descent and boundedness inequalities", criterion_4},
    {5, "|y(t_end)| <= 1e-2 |y0| on all PD-Q scenarios", criterion_5},
    {6, "constructive and shifted candidates always feasible", criterion_6},
    {7, "integrator accuracy, terminal norm, self-convergence", criterion_7},
    {8, "search within 5% of the 50x50 lattice; deterministic", criterion_8},
    {9, "horizon extension is cost-neutral", criterion_9},
};

} // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[i + 1]);

  int failed = 0;
  for (const Criterion& criterion : kCriteria) {
    if (only != 0 && criterion.number != only) continue;
    Checker checker;
    try {
      criterion.fn(checker);
    } catch (const std::exception& e) {
      checker.require(false, std::string("exception: ") + e.what());
    }
    bool pass = checker.failures == 0;
    std::printf("criterion %d: %s - %s\n", criterion.number, pass ? "PASS" : "FAIL",
                criterion.summary);
    for (const std::string& d : checker.details) std::printf("  ! %s\n", d.c_str());
    if (!pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
