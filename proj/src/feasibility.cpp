#include "mpfc/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mpfc {

OuterFunnel OuterFunnel::affine(double a, double b) {
  if (!(a > 0.0)) throw std::invalid_argument("affine outer funnel requires a > 0");
  if (b < 0.0) throw std::invalid_argument("affine outer funnel requires b >= 0");
  return OuterFunnel(Kind::affine, a, b, 0.0);
}

OuterFunnel OuterFunnel::exponential(double a, double b, double r) {
  if (!(a > 0.0)) throw std::invalid_argument("exponential outer funnel requires a > 0");
  if (b < 0.0 || r < 0.0) throw std::invalid_argument("exponential outer funnel requires b, r >= 0");
  return OuterFunnel(Kind::exponential, a, b, r);
}

double OuterFunnel::value(double t) const {
  switch (kind_) {
    case Kind::infinite: return std::numeric_limits<double>::infinity();
    case Kind::affine: return a_ - b_ * t;
    case Kind::exponential: return a_ * std::exp(-b_ * t) + r_;
  }
  return std::numeric_limits<double>::infinity();
}

double OuterFunnel::derivative(double t) const {
  switch (kind_) {
    case Kind::infinite: throw std::domain_error("derivative of the infinite outer funnel");
    case Kind::affine: return -b_;
    case Kind::exponential: return -a_ * b_ * std::exp(-b_ * t);
  }
  return 0.0;
}

double sup_outer_derivative(const OuterFunnel& psi, double a, double b) {
  if (psi.is_infinite()) throw std::domain_error("sup_outer_derivative on the infinite variant");
  if (!(a <= b)) throw std::invalid_argument("sup_outer_derivative: window out of order");
  switch (psi.kind()) {
    case OuterFunnel::Kind::affine: return psi.b();
    case OuterFunnel::Kind::exponential:
      // |psi'| = a b e^{-b t} decays, so the sup sits at the left endpoint.
      return psi.a() * psi.b() * std::exp(-psi.b() * a);
    default: return 0.0;
  }
}

const char* infeasible_reason_name(InfeasibleReason r) {
  switch (r) {
    case InfeasibleReason::none: return "none";
    case InfeasibleReason::positivity: return "positivity";
    case InfeasibleReason::horizon: return "horizon";
    case InfeasibleReason::entry: return "entry";
    case InfeasibleReason::slope: return "slope";
  }
  return "none";
}

namespace {

// phi(tau) <= psi(t_hat + tau) for all tau in [0, T), decided in closed
// form. gap(tau) = psi(t_hat + tau) - c (T - tau).
bool contained_under(const OuterFunnel& psi, double t_hat, FunnelParams p) {
  if (psi.is_infinite()) return true;
  auto gap = [&](double tau) { return psi.value(t_hat + tau) - p.c * (p.T - tau); };
  switch (psi.kind()) {
    case OuterFunnel::Kind::affine:
      // Both sides affine: the infimum over [0, T] is at an endpoint.
      return gap(0.0) >= 0.0 && gap(p.T) >= 0.0;
    case OuterFunnel::Kind::exponential: {
      // gap' = -a b e^{-b(t_hat+tau)} + c is increasing, so gap has at most
      // one interior minimum, at the tangency point.
      if (gap(0.0) < 0.0 || gap(p.T) < 0.0) return false;
      double ab = psi.a() * psi.b();
      if (psi.b() > 0.0 && ab > p.c) {
        double tau_star = std::log(ab / p.c) / psi.b() - t_hat;
        if (tau_star > 0.0 && tau_star < p.T && gap(tau_star) < 0.0) return false;
      }
      return true;
    }
    default: return true;
  }
}

} // namespace

Feasibility is_feasible_norm(FunnelParams p, const FeasibilityContext& ctx, double norm_yhat) {
  if (!(p.c > 0.0) || !(p.T > 0.0)) return {false, InfeasibleReason::positivity};
  if (p.T > ctx.horizon) return {false, InfeasibleReason::horizon};
  if (!(norm_yhat < p.c * p.T)) return {false, InfeasibleReason::entry};
  if (!contained_under(ctx.outer, ctx.t_hat, p)) return {false, InfeasibleReason::slope};
  return {true, InfeasibleReason::none};
}

Feasibility is_feasible(FunnelParams p, const FeasibilityContext& ctx,
                        const Eigen::VectorXd& yhat) {
  return is_feasible_norm(p, ctx, yhat.norm());
}

FunnelParams make_candidate_norm(const FeasibilityContext& ctx, double norm_yhat) {
  const double H = ctx.horizon;
  if (!(H > 0.0)) throw std::domain_error("make_candidate: horizon must be positive");
  if (ctx.outer.is_infinite()) return {(norm_yhat + 1.0) / H, H};

  double psi0 = ctx.outer.value(ctx.t_hat);
  if (!(norm_yhat < psi0))
    throw std::domain_error("make_candidate: |yhat| >= psi(t_hat), no feasible funnel exists");
  double sup_dpsi = sup_outer_derivative(ctx.outer, ctx.t_hat, ctx.t_hat + H);
  double T_hat = sup_dpsi == 0.0 ? H : std::min((psi0 + norm_yhat) / (2.0 * sup_dpsi), H);
  double c_hat = (psi0 + norm_yhat) / (2.0 * T_hat);
  return {c_hat, T_hat};
}

FunnelParams make_candidate(const FeasibilityContext& ctx, const Eigen::VectorXd& yhat) {
  return make_candidate_norm(ctx, yhat.norm());
}

std::optional<FunnelParams> shift_candidate(FunnelParams p, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("shift_candidate: h must be positive");
  if (p.T > h) return FunnelParams{p.c, p.T - h};
  return std::nullopt;
}

} // namespace mpfc
