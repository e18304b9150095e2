#include "mpfc/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mpfc/log.hpp"

namespace mpfc {

const char* accepted_from_name(AcceptedFrom a) {
  switch (a) {
    case AcceptedFrom::search: return "search";
    case AcceptedFrom::shifted_candidate: return "shifted-candidate";
    case AcceptedFrom::fresh_candidate: return "fresh-candidate";
  }
  return "search";
}

AcceptedFrom accepted_from_from_name(const std::string& name) {
  if (name == "shifted-candidate") return AcceptedFrom::shifted_candidate;
  if (name == "fresh-candidate") return AcceptedFrom::fresh_candidate;
  if (name == "search") return AcceptedFrom::search;
  throw std::invalid_argument("unknown accepted-from value '" + name + "'");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Objective {
  const FeasibilityContext& ctx;
  const Eigen::VectorXd& yhat;
  const PredictionDeps& deps;
  std::vector<Evaluation>* log;
  int ode_evals = 0;

  double operator()(FunnelParams p) {
    if (!is_feasible(p, ctx, yhat)) {
      log->push_back({p, kInf, false});
      return kInf;
    }
    ++ode_evals;
    double J = evaluate_cost(yhat, p, deps, ctx.horizon).total;
    log->push_back({p, J, true});
    return J;
  }
};

// splitmix64; deterministic simplex jitter.
std::uint64_t mix(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double unit_jitter(std::uint64_t& state) {
  return (mix(state) >> 11) * 0x1.0p-53; // [0, 1)
}

struct Point {
  double x = 0.0; // log c
  double y = 0.0; // T
  double J = kInf;
};

} // namespace

OptimizerOutcome search(const FeasibilityContext& ctx, const Eigen::VectorXd& yhat,
                        std::optional<FunnelParams> warm, WarmKind warm_kind,
                        const PredictionDeps& deps, const OptimizerConfig& cfg) {
  OptimizerOutcome out;
  Objective obj{ctx, yhat, deps, &out.log};

  const double H = ctx.horizon;
  auto clamp_params = [&](double log_c, double T) {
    double c = std::exp(std::clamp(log_c, std::log(cfg.c_min), std::log(cfg.c_max)));
    return FunnelParams{c, std::clamp(T, 1e-9 * H, H)};
  };

  // Seeds: the warm candidate (shifted or fresh), then the constructive one.
  double warm_J = kInf;
  if (warm) warm_J = obj(*warm);

  FunnelParams fresh = make_candidate(ctx, yhat);
  double fresh_J = obj(fresh);

  FunnelParams best = warm && warm_J <= fresh_J ? *warm : fresh;
  double best_J = std::min(warm_J, fresh_J);

  if (cfg.method == SearchMethod::grid) {
    OptimizerOutcome lattice = grid_oracle(ctx, yhat, deps, cfg.grid);
    obj.ode_evals += lattice.evaluations;
    for (auto& e : lattice.log) out.log.push_back(e);
    if (lattice.best_J < best_J) {
      best = lattice.best;
      best_J = lattice.best_J;
    }
  } else {
    // Nelder-Mead over (log c, T), seeded at the better of the two seeds.
    FunnelParams seed = best;
    std::uint64_t rng = cfg.seed * 0x9e3779b97f4a7c15ULL + 1;
    auto spread = [&](double base) {
      return cfg.simplex_spread * base * (1.0 + 0.1 * (unit_jitter(rng) - 0.5));
    };

    Point simplex[3];
    simplex[0] = {std::log(seed.c), seed.T, best_J};
    simplex[1] = {simplex[0].x + spread(1.0 + std::abs(simplex[0].x)), simplex[0].y, kInf};
    simplex[2] = {simplex[0].x, std::min(H, simplex[0].y + spread(std::max(simplex[0].y, 0.1 * H))),
                  kInf};
    if (simplex[2].y == simplex[0].y) simplex[2].y = std::max(1e-9 * H, simplex[0].y * 0.8);

    auto eval_point = [&](Point& pt) {
      FunnelParams p = clamp_params(pt.x, pt.y);
      pt.x = std::log(p.c);
      pt.y = p.T;
      pt.J = obj(p);
      if (pt.J < best_J) {
        best_J = pt.J;
        best = p;
      }
    };
    eval_point(simplex[1]);
    eval_point(simplex[2]);

    while (obj.ode_evals < cfg.max_evals) {
      std::sort(std::begin(simplex), std::end(simplex),
                [](const Point& a, const Point& b) { return a.J < b.J; });
      const Point& lo = simplex[0];
      Point& hi = simplex[2];

      if (std::isfinite(lo.J) && std::isfinite(hi.J) &&
          hi.J - lo.J <= cfg.j_tol * (1.0 + std::abs(lo.J)))
        break;

      double cx = 0.5 * (simplex[0].x + simplex[1].x);
      double cy = 0.5 * (simplex[0].y + simplex[1].y);

      Point refl{cx + (cx - hi.x), cy + (cy - hi.y), kInf};
      eval_point(refl);

      if (refl.J < lo.J) {
        Point expand{cx + 2.0 * (cx - hi.x), cy + 2.0 * (cy - hi.y), kInf};
        if (obj.ode_evals < cfg.max_evals) eval_point(expand);
        hi = expand.J < refl.J ? expand : refl;
        continue;
      }
      if (refl.J < simplex[1].J) {
        hi = refl;
        continue;
      }
      Point contract{cx + 0.5 * (hi.x - cx), cy + 0.5 * (hi.y - cy), kInf};
      if (obj.ode_evals < cfg.max_evals) eval_point(contract);
      if (contract.J < hi.J) {
        hi = contract;
        continue;
      }
      // Shrink toward the best vertex.
      for (int i = 1; i < 3; ++i) {
        simplex[i].x = simplex[0].x + 0.5 * (simplex[i].x - simplex[0].x);
        simplex[i].y = simplex[0].y + 0.5 * (simplex[i].y - simplex[0].y);
        if (obj.ode_evals < cfg.max_evals) eval_point(simplex[i]);
      }
    }
  }

  // Tie-break toward the warm candidate: moving off it requires strict
  // improvement. This keeps the acceptance inequality structural.
  if (warm && warm_J <= best_J) {
    best = *warm;
    best_J = warm_J;
  }

  out.best = best;
  out.best_J = best_J;
  out.evaluations = obj.ode_evals;

  if (!std::isfinite(best_J))
    throw std::logic_error("optimizer: no feasible point found despite a valid start");
  if (!is_feasible(best, ctx, yhat))
    throw std::logic_error("optimizer: accepted parameters failed the feasibility re-check");

  if (warm && best.c == warm->c && best.T == warm->T)
    out.accepted_from = warm_kind == WarmKind::fresh ? AcceptedFrom::fresh_candidate
                                                     : AcceptedFrom::shifted_candidate;
  else if (best.c == fresh.c && best.T == fresh.T)
    out.accepted_from = AcceptedFrom::fresh_candidate;
  else
    out.accepted_from = AcceptedFrom::search;

  log::debug("search: J=%.6g at (c=%.6g, T=%.6g) from %s after %d evals", out.best_J, best.c,
             best.T, accepted_from_name(out.accepted_from), out.evaluations);
  return out;
}

OptimizerOutcome grid_oracle(const FeasibilityContext& ctx, const Eigen::VectorXd& yhat,
                             const PredictionDeps& deps, const GridSpec& grid) {
  if (grid.c_count < 1 || grid.T_count < 1)
    throw std::invalid_argument("grid_oracle: counts must be >= 1");
  if (!(grid.c_lo > 0.0) || grid.c_hi < grid.c_lo)
    throw std::invalid_argument("grid_oracle: c range must be positive and ordered");

  double T_lo = grid.T_lo > 0.0 ? grid.T_lo : ctx.horizon / grid.T_count;
  double T_hi = grid.T_hi > 0.0 ? grid.T_hi : ctx.horizon;

  OptimizerOutcome out;
  out.best_J = kInf;
  Objective obj{ctx, yhat, deps, &out.log};

  for (int i = 0; i < grid.c_count; ++i) {
    double fc = grid.c_count == 1 ? 0.0 : static_cast<double>(i) / (grid.c_count - 1);
    double c = grid.c_lo * std::pow(grid.c_hi / grid.c_lo, fc);
    for (int j = 0; j < grid.T_count; ++j) {
      double fT = grid.T_count == 1 ? 0.0 : static_cast<double>(j) / (grid.T_count - 1);
      double T = T_lo + fT * (T_hi - T_lo);
      double J = obj({c, T});
      if (J < out.best_J) {
        out.best_J = J;
        out.best = {c, T};
      }
    }
  }
  out.evaluations = obj.ode_evals;
  out.accepted_from = AcceptedFrom::search;
  if (!std::isfinite(out.best_J))
    log::warn("grid_oracle: no feasible lattice point (entry condition c*T > |yhat| never met)");
  return out;
}

} // namespace mpfc
