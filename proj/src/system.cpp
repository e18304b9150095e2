#include "mpfc/system.hpp"

#include <cmath>
#include <memory>
#include <numbers>

namespace mpfc {

SystemModel::SystemModel(std::string label, int dim, RhsFn rhs, std::string source)
    : label_(std::move(label)), dim_(dim), rhs_(std::move(rhs)), source_(std::move(source)) {
  if (dim_ < 1) throw std::invalid_argument("system dimension must be positive");
  Vec zero = Vec::Zero(dim_), out(dim_);
  rhs_(zero, zero, out);
  for (int i = 0; i < dim_; ++i) {
    if (std::abs(out[i]) > 1e-12)
      throw std::invalid_argument("model '" + label_ + "' violates f(0,0)=0 in component " +
                                  std::to_string(i + 1) + " (got " + std::to_string(out[i]) + ")");
  }
}

void SystemModel::rhs_into(const Vec& y, const Vec& u, Vec& out) const {
  if (y.size() != dim_ || u.size() != dim_)
    throw std::invalid_argument("model '" + label_ + "': state/input dimension mismatch");
  out.resize(dim_);
  rhs_(y, u, out);
  for (int i = 0; i < dim_; ++i) {
    if (!std::isfinite(out[i]))
      throw EvalError("non-finite right-hand side in component " + std::to_string(i + 1), i);
  }
}

Vec SystemModel::rhs(const Vec& y, const Vec& u) const {
  Vec out(dim_);
  rhs_into(y, u, out);
  return out;
}

SystemModel model_from_expression(const std::string& label, int m, const std::string& source) {
  auto field = std::make_shared<VectorFieldExpr>(parse_vector_field(source, m));
  return SystemModel(
      label, m,
      [field](const Vec& y, const Vec& u, Vec& out) {
        field->eval({y.data(), static_cast<std::size_t>(y.size())},
                    {u.data(), static_cast<std::size_t>(u.size())},
                    {out.data(), static_cast<std::size_t>(out.size())});
      },
      source);
}

SystemModel builtin_model(const std::string& label) {
  if (label == "paper-example") {
    return SystemModel("paper-example", 2, [](const Vec& y, const Vec& u, Vec& out) {
      out[0] = y[0] * y[0] + y[0] - u[0];
      out[1] = y[1] * y[1] + y[0] - u[1];
    });
  }
  if (label == "scalar-neg-u") {
    return SystemModel("scalar-neg-u", 1,
                       [](const Vec&, const Vec& u, Vec& out) { out[0] = -u[0]; });
  }
  if (label == "zero") {
    return SystemModel("zero", 2, [](const Vec&, const Vec&, Vec& out) { out.setZero(); });
  }
  throw std::invalid_argument("unknown builtin model '" + label + "'");
}

std::vector<std::string> builtin_model_labels() {
  return {"paper-example", "scalar-neg-u", "zero"};
}

namespace {

// Deterministic unit directions: the sign pair for m=1, equally spaced
// angles for m=2, seeded normalized Gaussians above that.
std::vector<Vec> unit_directions(int m, int count) {
  std::vector<Vec> dirs;
  if (m == 1) {
    dirs.push_back(Vec::Constant(1, 1.0));
    dirs.push_back(Vec::Constant(1, -1.0));
    return dirs;
  }
  if (m == 2) {
    for (int k = 0; k < count; ++k) {
      double angle = 2.0 * std::numbers::pi * k / count;
      Vec v(2);
      v << std::cos(angle), std::sin(angle);
      dirs.push_back(std::move(v));
    }
    return dirs;
  }
  std::uint64_t state = 0x9e3779b97f4a7c15ULL;
  auto next = [&state]() {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  auto uniform = [&]() { return (next() >> 11) * 0x1.0p-53; };
  for (int k = 0; k < count; ++k) {
    Vec v(m);
    for (int i = 0; i < m; ++i) {
      double u1 = uniform(), u2 = uniform();
      v[i] = std::sqrt(-2.0 * std::log(u1 + 1e-300)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    double n = v.norm();
    if (n < 1e-12) { --k; continue; }
    dirs.push_back(v / n);
  }
  return dirs;
}

void state_grid(const HighGainProbe& probe, int axis, Vec& z, std::vector<Vec>& out) {
  int n = probe.state_samples;
  for (int k = 0; k < n; ++k) {
    double t = n == 1 ? 0.5 : static_cast<double>(k) / (n - 1);
    z[axis] = probe.box_lo[axis] + t * (probe.box_hi[axis] - probe.box_lo[axis]);
    if (axis + 1 == z.size())
      out.push_back(z);
    else
      state_grid(probe, axis + 1, z, out);
  }
}

} // namespace

HighGainReport check_high_gain(const SystemModel& model, const HighGainProbe& probe) {
  const int m = model.dim();
  if (probe.box_lo.size() != m || probe.box_hi.size() != m)
    throw std::invalid_argument("high-gain probe box dimension mismatch");
  if (!(probe.nu > 0.0 && probe.nu < 1.0))
    throw std::invalid_argument("high-gain probe requires 0 < nu < 1");
  for (int i = 0; i < m; ++i)
    if (probe.box_lo[i] > probe.box_hi[i])
      throw std::invalid_argument("high-gain probe box bounds out of order");
  if (probe.state_samples < 1 || probe.direction_samples < 1 || probe.radial_samples < 1)
    throw std::invalid_argument("high-gain probe sample counts must be >= 1");

  std::vector<Vec> states;
  Vec z(m);
  state_grid(probe, 0, z, states);

  std::vector<Vec> vs;
  for (const Vec& d : unit_directions(m, probe.direction_samples)) {
    for (int r = 0; r < probe.radial_samples; ++r) {
      double radius = probe.radial_samples == 1
                          ? probe.nu
                          : probe.nu + (1.0 - probe.nu) * r / (probe.radial_samples - 1);
      vs.push_back(radius * d);
    }
  }

  HighGainReport report;
  Vec f(m);
  for (double s : probe.gains) {
    double chi = std::numeric_limits<double>::infinity();
    for (const Vec& state : states) {
      for (const Vec& v : vs) {
        Vec input = -s * v;
        model.rhs_into(state, input, f);
        chi = std::min(chi, v.dot(f));
      }
    }
    report.chi.emplace_back(s, chi);
  }

  double best = -std::numeric_limits<double>::infinity();
  for (auto& [s, chi] : report.chi) best = std::max(best, chi);
  report.consistent = best >= probe.chi_min;
  report.verdict = report.consistent ? "consistent" : "falsified at samples";
  return report;
}

} // namespace mpfc
