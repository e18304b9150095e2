#include "mpfc/integrator.hpp"

#include <algorithm>
#include <cmath>

namespace mpfc {

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::reached_end: return "reached-end";
    case Termination::hit_t_max: return "hit-t-max";
    case Termination::equilibrium: return "equilibrium";
    case Termination::error: return "error";
  }
  return "error";
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;

constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// Embedded 4th-order weights.
constexpr double bh1 = 5179.0 / 57600, bh3 = 7571.0 / 16695, bh4 = 393.0 / 640,
                 bh5 = -92097.0 / 339200, bh6 = 187.0 / 2100, bh7 = 1.0 / 40;
// Dense-output weights (Hairer's contd5).
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

struct DenseCoeffs {
  Eigen::VectorXd r1, r2, r3, r4, r5;

  Eigen::VectorXd at(double theta) const {
    double s1 = 1.0 - theta;
    return r1 + theta * (r2 + s1 * (r3 + theta * (r4 + s1 * r5)));
  }
};

class Dopri5 {
public:
  Dopri5(const OdeRhs& rhs, int n) : rhs_(rhs) {
    for (Eigen::VectorXd* k : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &xt_, &err_})
      k->resize(n);
  }

  /// One trial step from (t, x) of size h. Returns the scaled error norm,
  /// or infinity when a stage could not be evaluated (domain escape or
  /// non-finite values), in which case the step must be retried smaller.
  double attempt(double t, const Eigen::VectorXd& x, double h, bool have_k1,
                 Eigen::VectorXd& xnew) {
    // k1 sits at the already-accepted state: a failure there is not a
    // step-size problem, so it propagates.
    if (!have_k1) rhs_(t, x, k1_);
    try {
      xt_ = x + h * (a21 * k1_);
      rhs_(t + c2 * h, xt_, k2_);
      xt_ = x + h * (a31 * k1_ + a32 * k2_);
      rhs_(t + c3 * h, xt_, k3_);
      xt_ = x + h * (a41 * k1_ + a42 * k2_ + a43 * k3_);
      rhs_(t + c4 * h, xt_, k4_);
      xt_ = x + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
      rhs_(t + c5 * h, xt_, k5_);
      xt_ = x + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
      rhs_(t + h, xt_, k6_);
      xnew = x + h * (b1 * k1_ + b3 * k3_ + b4 * k4_ + b5 * k5_ + b6 * k6_);
      rhs_(t + h, xnew, k7_); // FSAL stage
    } catch (const FunnelViolation&) {
      return std::numeric_limits<double>::infinity();
    } catch (const EvalError&) {
      return std::numeric_limits<double>::infinity();
    }
    if (!xnew.allFinite() || !k7_.allFinite()) return std::numeric_limits<double>::infinity();

    err_ = h * ((b1 - bh1) * k1_ + (b3 - bh3) * k3_ + (b4 - bh4) * k4_ + (b5 - bh5) * k5_ +
                (b6 - bh6) * k6_ - bh7 * k7_);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < err_.size(); ++i) {
      double sc = abs_tol_ + rel_tol_ * std::max(std::abs(x[i]), std::abs(xnew[i]));
      double e = err_[i] / sc;
      sum += e * e;
    }
    return std::sqrt(sum / static_cast<double>(err_.size()));
  }

  DenseCoeffs dense(const Eigen::VectorXd& x, const Eigen::VectorXd& xnew, double h) const {
    DenseCoeffs dc;
    dc.r1 = x;
    dc.r2 = xnew - x;
    dc.r3 = h * k1_ - dc.r2;
    dc.r4 = dc.r2 - h * k7_ - dc.r3;
    dc.r5 = h * (d1 * k1_ + d3 * k3_ + d4 * k4_ + d5 * k5_ + d6 * k6_ + d7 * k7_);
    return dc;
  }

  void advance_fsal() { k1_.swap(k7_); }

  double abs_tol_ = 1e-9, rel_tol_ = 1e-6;

private:
  const OdeRhs& rhs_;
  Eigen::VectorXd k1_, k2_, k3_, k4_, k5_, k6_, k7_, xt_, err_;
};

std::vector<double> prepare_nodes(std::span<const double> nodes, double a, double b) {
  std::vector<double> out(nodes.begin(), nodes.end());
  std::sort(out.begin(), out.end());
  double tol = 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
  out.erase(std::remove_if(out.begin(), out.end(),
                           [&](double t) { return t < a - tol || t > b + tol; }),
            out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [&](double x, double y) { return std::abs(x - y) <= tol; }),
            out.end());
  for (double& t : out) t = std::clamp(t, a, b);
  return out;
}

} // namespace

Trajectory integrate(const OdeRhs& rhs, const Eigen::VectorXd& x0, double a, double b,
                     const IntegratorConfig& cfg, std::span<const double> nodes) {
  if (!(a < b)) throw std::invalid_argument("integrate: requires a < b");
  if (!(cfg.abs_tol > 0 && cfg.rel_tol > 0 && cfg.initial_step > 0 && cfg.min_step > 0))
    throw std::invalid_argument("integrate: tolerances and steps must be positive");
  if (!(cfg.min_step < cfg.initial_step))
    throw std::invalid_argument("integrate: min_step must be below initial_step");
  if (!x0.allFinite()) throw std::invalid_argument("integrate: non-finite initial state");

  std::vector<double> out_nodes = prepare_nodes(nodes, a, b);

  Trajectory traj;
  traj.t.reserve(out_nodes.size());
  traj.y.reserve(out_nodes.size());
  std::size_t next_node = 0;
  while (next_node < out_nodes.size() && out_nodes[next_node] <= a) {
    traj.t.push_back(out_nodes[next_node]);
    traj.y.push_back(x0);
    ++next_node;
  }

  Dopri5 stepper(rhs, static_cast<int>(x0.size()));
  stepper.abs_tol_ = cfg.abs_tol;
  stepper.rel_tol_ = cfg.rel_tol;

  Eigen::VectorXd x = x0, xnew(x0.size());
  double t = a;
  double h = std::min(cfg.initial_step, b - a);
  bool have_k1 = false;
  long steps = 0;

  while (t < b) {
    if (++steps > cfg.max_steps)
      throw IntegrationError(IntegrationError::Kind::max_steps, t,
                             "integrate: exceeded " + std::to_string(cfg.max_steps) + " steps");
    bool last = false;
    if (t + h >= b) {
      h = b - t;
      last = true;
    }

    double err = stepper.attempt(t, x, h, have_k1, xnew);
    have_k1 = true;

    if (std::isinf(err)) {
      // Stage evaluation escaped its domain; retry smaller.
      h *= 0.5;
      have_k1 = true; // k1 at (t, x) is still valid
      if (h < cfg.min_step)
        throw IntegrationError(IntegrationError::Kind::step_underflow, t,
                               "integrate: stage evaluation failed at the minimum step size near t=" +
                                   std::to_string(t));
      continue;
    }

    if (err <= 1.0) {
      double t1 = last ? b : t + h;
      if (next_node < out_nodes.size() && out_nodes[next_node] <= t1) {
        DenseCoeffs dc = stepper.dense(x, xnew, h);
        while (next_node < out_nodes.size() && out_nodes[next_node] <= t1) {
          double theta = (out_nodes[next_node] - t) / h;
          traj.t.push_back(out_nodes[next_node]);
          traj.y.push_back(theta >= 1.0 ? xnew : dc.at(theta));
          ++next_node;
        }
      }
      x.swap(xnew);
      stepper.advance_fsal();
      t = t1;
      if (last) break;
    }

    double factor = err == 0.0 ? 5.0 : 0.9 * std::pow(err, -0.2);
    factor = std::clamp(factor, 0.2, err <= 1.0 ? 5.0 : 1.0);
    h *= factor;
    if (h < cfg.min_step)
      throw IntegrationError(IntegrationError::Kind::step_underflow, t,
                             "integrate: step size underflow near t=" + std::to_string(t));
  }

  traj.termination = Termination::reached_end;
  return traj;
}

Trajectory integrate_funnel_phase(const SystemModel& model, FunnelParams p, GainSpec g,
                                  const StageCost& stage, const Eigen::VectorXd& y0,
                                  const IntegratorConfig& cfg, const FunnelPhaseSpec& spec) {
  const int m = model.dim();
  if (y0.size() != m) throw std::invalid_argument("integrate_funnel_phase: y0 dimension mismatch");
  if (!(p.c > 0.0 && p.T > 0.0))
    throw std::invalid_argument("integrate_funnel_phase: requires c > 0 and T > 0");
  double entry = p.c * p.T;
  if (!(y0.norm() < entry)) throw FunnelViolation(0.0, y0.norm(), entry);

  const double t_max = p.T - cfg.spatial_accuracy / p.c;
  const double end = spec.until < 0.0 ? t_max : spec.until;
  const double live_end = std::min(end, t_max);

  // Uniform output grid over [0, end], plus t_max and any extra nodes.
  std::vector<double> nodes;
  if (end > 0.0) {
    long n = std::max<long>(1, static_cast<long>(std::ceil(end / std::max(cfg.output_dt, 1e-12))));
    nodes.reserve(static_cast<std::size_t>(n) + spec.extra_nodes.size() + 2);
    for (long k = 0; k <= n; ++k) nodes.push_back(end * static_cast<double>(k) / static_cast<double>(n));
  } else {
    nodes.push_back(0.0);
  }
  if (spec.include_t_max_node && t_max > 0.0 && t_max <= end) nodes.push_back(t_max);
  for (double x : spec.extra_nodes)
    if (x >= 0.0 && x <= end) nodes.push_back(x);
  std::sort(nodes.begin(), nodes.end());
  double ntol = 1e-12 * std::max(1.0, end);
  nodes.erase(std::unique(nodes.begin(), nodes.end(),
                          [&](double x, double y) { return std::abs(x - y) <= ntol; }),
              nodes.end());

  Trajectory traj;
  double tail_cost = 0.0;
  if (live_end > 0.0) {
    Eigen::VectorXd x0(m + 1);
    x0.head(m) = y0;
    x0[m] = 0.0;
    OdeRhs rhs = closed_loop_rhs(model, p, g, stage);

    std::vector<double> live_nodes;
    for (double x : nodes)
      if (x <= live_end + ntol) live_nodes.push_back(std::min(x, live_end));

    // The running cost must be sampled at the integration endpoint even
    // when that node is not wanted in the output.
    bool drop_endpoint = false;
    if (live_nodes.empty() || live_nodes.back() < live_end - ntol) {
      live_nodes.push_back(live_end);
      drop_endpoint = !spec.include_t_max_node;
    }

    Trajectory raw = integrate(rhs, x0, 0.0, live_end, cfg, live_nodes);
    traj.t = std::move(raw.t);
    for (const Eigen::VectorXd& x : raw.y) {
      traj.y.push_back(x.head(m));
      traj.cost.push_back(x[m]);
    }
    tail_cost = traj.cost.back();
    if (drop_endpoint) {
      traj.t.pop_back();
      traj.y.pop_back();
      traj.cost.pop_back();
    }
  } else {
    // Funnel shorter than the spatial accuracy: the entry condition already
    // bounds |y0| by delta, so the whole phase collapses into the snap.
    traj.t.push_back(0.0);
    traj.y.push_back(y0);
    traj.cost.push_back(0.0);
  }

  // Monotonicity repair of interpolation wiggle in the quadrature state.
  for (std::size_t k = 1; k < traj.cost.size(); ++k)
    traj.cost[k] = std::max(traj.cost[k], traj.cost[k - 1]);

  // Controls at the nodes. From t_max on, the snap convention u = 0 applies
  // (the boundary there is within delta of zero and the interpolated state
  // may graze it).
  for (std::size_t k = 0; k < traj.t.size(); ++k)
    traj.u.push_back(traj.t[k] < t_max - ntol ? feedback(traj.y[k], traj.t[k], p, g)
                                              : Eigen::VectorXd::Zero(m));

  if (end > live_end + ntol) {
    // Snap-to-equilibrium tail: y = 0, u = 0, cost frozen.
    if (!traj.cost.empty()) tail_cost = std::max(tail_cost, traj.cost.back());
    for (double x : nodes) {
      if (x <= live_end + ntol) continue;
      traj.t.push_back(x);
      traj.y.push_back(Eigen::VectorXd::Zero(m));
      traj.u.push_back(Eigen::VectorXd::Zero(m));
      traj.cost.push_back(tail_cost);
    }
    traj.termination = Termination::equilibrium;
  } else {
    traj.termination = spec.until < 0.0 ? Termination::hit_t_max : Termination::reached_end;
  }
  return traj;
}

} // namespace mpfc
