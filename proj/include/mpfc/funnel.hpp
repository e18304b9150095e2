#pragma once

#include <Eigen/Dense>

#include <functional>

#include "mpfc/errors.hpp"
#include "mpfc/stage_cost.hpp"
#include "mpfc/system.hpp"

namespace mpfc {

/// The decision pair of the controller: boundary slope magnitude c and
/// terminal time T. The boundary is phi(t) = c (T - t), pinching to zero
/// at t = T. T may go nonpositive in shifted-candidate arithmetic; a live
/// funnel requires T > 0.
struct FunnelParams {
  double c = 0.0;
  double T = 0.0;
};

/// Gain surjection choices for the feedback law. The bijection is fixed
/// to alpha_c(s) = 2c / (1 - s).
enum class Surjection { identity, negated, exploratory };

struct GainSpec {
  Surjection n = Surjection::identity;

  double surject(double s) const {
    switch (n) {
      case Surjection::identity: return s;
      case Surjection::negated: return -s;
      case Surjection::exploratory: return s * std::cos(s);
    }
    return s;
  }
};

Surjection surjection_from_name(const std::string& name);
const char* surjection_name(Surjection s);

/// phi(tau; c, T) = c (T - tau). Domain 0 <= tau < T; throws
/// std::domain_error outside it.
double funnel_value(double tau, FunnelParams p);

/// alpha_c(s) = 2c / (1 - s) on 0 <= s < 1; throws std::domain_error
/// outside it (s >= 1 means the funnel was violated).
double gain_alpha(double s, double c);

// Strict-containment guard: the feedback refuses to evaluate once
// |y| >= (1 - kFunnelGuard) * phi. Analysis guarantees strict containment;
// the guard only catches numerical escapes.
inline constexpr double kFunnelGuard = 1e-12;

/// The funnel feedback law: u = N(alpha_c(|y/phi|^2)) y / phi for tau < T
/// and u = 0 for tau >= T. Throws FunnelViolation when the state touches
/// the guard band.
Eigen::VectorXd feedback(const Eigen::VectorXd& y, double tau, FunnelParams p, const GainSpec& g);

/// Time-dependent ODE right-hand side over an augmented state [y; J]:
/// dy = f(y, u(tau, y)), dJ = l(y, u(tau, y)).
using OdeRhs = std::function<void(double t, const Eigen::VectorXd& x, Eigen::VectorXd& dx)>;

/// Closed-loop dynamics of `model` under the funnel law, with the running
/// cost carried as one extra quadrature state.
OdeRhs closed_loop_rhs(const SystemModel& model, FunnelParams p, GainSpec g, const StageCost& stage);

} // namespace mpfc
