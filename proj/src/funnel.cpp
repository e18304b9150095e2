#include "mpfc/funnel.hpp"

#include <cmath>
#include <string>

namespace mpfc {

Surjection surjection_from_name(const std::string& name) {
  if (name == "identity") return Surjection::identity;
  if (name == "negated") return Surjection::negated;
  if (name == "exploratory") return Surjection::exploratory;
  throw std::invalid_argument("unknown surjection '" + name +
                              "' (expected identity | negated | exploratory)");
}

const char* surjection_name(Surjection s) {
  switch (s) {
    case Surjection::identity: return "identity";
    case Surjection::negated: return "negated";
    case Surjection::exploratory: return "exploratory";
  }
  return "identity";
}

double funnel_value(double tau, FunnelParams p) {
  if (!(p.c > 0.0)) throw std::domain_error("funnel_value: c must be positive");
  if (tau < 0.0 || tau >= p.T)
    throw std::domain_error("funnel_value: tau=" + std::to_string(tau) +
                            " outside [0, T=" + std::to_string(p.T) + ")");
  return p.c * (p.T - tau);
}

double gain_alpha(double s, double c) {
  if (!(c > 0.0)) throw std::domain_error("gain_alpha: c must be positive");
  if (s < 0.0 || s >= 1.0)
    throw std::domain_error("gain_alpha: s=" + std::to_string(s) + " outside [0, 1)");
  return 2.0 * c / (1.0 - s);
}

Eigen::VectorXd feedback(const Eigen::VectorXd& y, double tau, FunnelParams p, const GainSpec& g) {
  if (tau >= p.T) return Eigen::VectorXd::Zero(y.size());
  double phi = funnel_value(tau, p);
  double norm_y = y.norm();
  if (norm_y >= (1.0 - kFunnelGuard) * phi) throw FunnelViolation(tau, norm_y, phi);
  double s = (norm_y * norm_y) / (phi * phi);
  double gain = g.surject(gain_alpha(s, p.c));
  return (gain / phi) * y;
}

OdeRhs closed_loop_rhs(const SystemModel& model, FunnelParams p, GainSpec g,
                       const StageCost& stage) {
  const int m = model.dim();
  return [&model, p, g, &stage, m, u = Eigen::VectorXd(m),
          f = Eigen::VectorXd(m)](double tau, const Eigen::VectorXd& x,
                                  Eigen::VectorXd& dx) mutable {
    const Eigen::VectorXd y = x.head(m);
    u = feedback(y, tau, p, g);
    model.rhs_into(y, u, f);
    dx.resize(m + 1);
    dx.head(m) = f;
    dx[m] = stage(y, u);
  };
}

} // namespace mpfc
