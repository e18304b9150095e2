#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "mpfc/funnel.hpp"

namespace mpfc {

/// User performance envelope |y(t)| <= psi(t). A closed family with
/// closed-form values, derivatives and derivative suprema, so feasibility
/// can be decided exactly rather than by sampling.
class OuterFunnel {
public:
  enum class Kind { infinite, affine, exponential };

  static OuterFunnel infinite() { return OuterFunnel(Kind::infinite, 0, 0, 0); }

  /// psi(t) = a - b t with a > 0, b >= 0. Positivity over the simulation
  /// window is the config loader's responsibility.
  static OuterFunnel affine(double a, double b);

  /// psi(t) = a e^{-b t} + r with a > 0, b >= 0, r >= 0.
  static OuterFunnel exponential(double a, double b, double r);

  Kind kind() const { return kind_; }
  bool is_infinite() const { return kind_ == Kind::infinite; }

  double a() const { return a_; }
  double b() const { return b_; }
  double r() const { return r_; }

  /// psi(t); infinity for the unconstrained variant.
  double value(double t) const;

  /// dpsi/dt; throws std::domain_error on the infinite variant.
  double derivative(double t) const;

private:
  OuterFunnel(Kind kind, double a, double b, double r) : kind_(kind), a_(a), b_(b), r_(r) {}

  Kind kind_;
  double a_, b_, r_;
};

/// Exact sup of |dpsi/dt| over [a, b]; throws std::domain_error on the
/// infinite variant.
double sup_outer_derivative(const OuterFunnel& psi, double a, double b);

/// Where the feasible set lives: current absolute time, horizon length and
/// the outer funnel.
struct FeasibilityContext {
  double t_hat = 0.0;
  double horizon = 0.0;
  OuterFunnel outer = OuterFunnel::infinite();
};

enum class InfeasibleReason { none, positivity, horizon, entry, slope };

const char* infeasible_reason_name(InfeasibleReason r);

struct Feasibility {
  bool ok = false;
  InfeasibleReason reason = InfeasibleReason::none;

  explicit operator bool() const { return ok; }
};

/// Membership test for the feasible parameter set: c > 0, 0 < T <= H,
/// |yhat| < c T (strict), and c (T - tau) <= psi(t_hat + tau) for all
/// tau in [0, T). The containment clause is decided in closed form per
/// outer-funnel variant.
Feasibility is_feasible(FunnelParams p, const FeasibilityContext& ctx, const Eigen::VectorXd& yhat);

/// Norm-only variant used by file-based tooling.
Feasibility is_feasible_norm(FunnelParams p, const FeasibilityContext& ctx, double norm_yhat);

/// Constructive always-feasible candidate: ((|yhat|+1)/H, H) when psi is
/// infinite, otherwise the tangency-safe pair built from psi(t_hat) and
/// sup |dpsi|. Requires |yhat| < psi(t_hat); throws std::domain_error
/// otherwise.
FunnelParams make_candidate(const FeasibilityContext& ctx, const Eigen::VectorXd& yhat);
FunnelParams make_candidate_norm(const FeasibilityContext& ctx, double norm_yhat);

/// The receding-horizon shift (c, T) -> (c, T - h). Empty when T <= h,
/// meaning the predicted state reaches the equilibrium within one step and
/// the caller should re-seed with a fresh small candidate.
std::optional<FunnelParams> shift_candidate(FunnelParams p, double h);

} // namespace mpfc
