#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mpfc/feasibility.hpp"
#include "mpfc/prediction.hpp"

namespace mpfc {

enum class SearchMethod { nelder_mead, grid };

struct GridSpec {
  double c_lo = 0.1, c_hi = 10.0; // log-spaced
  int c_count = 50;
  double T_lo = 0.0, T_hi = 0.0; // linear; 0 means derive from the horizon
  int T_count = 50;
};

struct OptimizerConfig {
  SearchMethod method = SearchMethod::nelder_mead;
  int max_evals = 200;
  double simplex_spread = 0.2;   // relative initial simplex size
  double j_tol = 1e-6;           // relative convergence tolerance on J
  double c_min = 1e-6, c_max = 1e4;
  GridSpec grid;
  std::uint64_t seed = 0;
};

/// How the optimizer was seeded from the previous step.
enum class WarmKind { none, shifted, fresh };

/// Where the accepted parameters came from.
enum class AcceptedFrom { search, shifted_candidate, fresh_candidate };

const char* accepted_from_name(AcceptedFrom a);
AcceptedFrom accepted_from_from_name(const std::string& name);

struct Evaluation {
  FunnelParams params;
  double J = 0.0; // +infinity for rejected (infeasible) probes
  bool feasible = false;
};

struct OptimizerOutcome {
  FunnelParams best;
  double best_J = 0.0; // the computed upper approximation of the optimal value
  int evaluations = 0; // ODE cost evaluations performed
  AcceptedFrom accepted_from = AcceptedFrom::search;
  std::vector<Evaluation> log;
};

/// Derivative-free search over (c, T) minimizing the horizon cost.
///
/// The warm candidate (the previous step's shifted parameters, or the fresh
/// equilibrium re-seed) is evaluated first and the returned parameters never
/// cost more than it: the outcome is the argmin over every feasible
/// evaluation, with ties broken toward the warm candidate. Infeasible probe
/// points are rejected at J = +infinity without touching the ODE.
OptimizerOutcome search(const FeasibilityContext& ctx, const Eigen::VectorXd& yhat,
                        std::optional<FunnelParams> warm, WarmKind warm_kind,
                        const PredictionDeps& deps, const OptimizerConfig& cfg);

/// Exhaustive lattice reference: c log-spaced, T linear. Every feasible
/// lattice point is evaluated and logged; `best_J` is +infinity and the log
/// still filled when no lattice point is feasible.
OptimizerOutcome grid_oracle(const FeasibilityContext& ctx, const Eigen::VectorXd& yhat,
                             const PredictionDeps& deps, const GridSpec& grid);

} // namespace mpfc
