#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "mpfc/errors.hpp"
#include "mpfc/expression.hpp"

namespace mpfc {

using Vec = Eigen::VectorXd;

/// A square control system ydot = f(y, u) with f(0,0) = 0.
///
/// Immutable after construction; evaluation is pure, so models can be
/// shared freely between threads.
class SystemModel {
public:
  using RhsFn = std::function<void(const Vec& y, const Vec& u, Vec& out)>;

  /// Checks f(0,0) = 0 componentwise within 1e-12 and throws
  /// std::invalid_argument otherwise. `source` is the declaring expression
  /// text for parsed models, empty for native ones.
  SystemModel(std::string label, int dim, RhsFn rhs, std::string source = "");

  int dim() const { return dim_; }
  const std::string& label() const { return label_; }
  const std::string& source() const { return source_; }

  /// Evaluates f(y, u). Throws EvalError (with the offending component
  /// index) if the result is non-finite, std::invalid_argument on a size
  /// mismatch.
  Vec rhs(const Vec& y, const Vec& u) const;

  /// Same as rhs() but writes into a caller-provided buffer.
  void rhs_into(const Vec& y, const Vec& u, Vec& out) const;

private:
  std::string label_;
  int dim_;
  RhsFn rhs_;
  std::string source_;
};

/// Builds a model from a text vector field (see parse_vector_field).
SystemModel model_from_expression(const std::string& label, int m, const std::string& source);

/// Built-in models: "paper-example" (2-d polynomial benchmark),
/// "scalar-neg-u" (f = -u), "zero" (2-d zero field).
/// Throws std::invalid_argument for unknown labels.
SystemModel builtin_model(const std::string& label);

/// Names accepted by builtin_model.
std::vector<std::string> builtin_model_labels();

/// Sampling plan for the high-gain falsification check: a compact box of
/// states, a ring nu <= |v| <= 1 of directions, and a list of gain values s.
struct HighGainProbe {
  Vec box_lo, box_hi;            // per-axis bounds of K
  double nu = 0.5;               // inner radius, in (0,1)
  std::vector<double> gains;     // s values, ascending
  int state_samples = 11;        // grid points per axis in K
  int direction_samples = 16;    // unit directions
  int radial_samples = 8;        // radii between nu and 1
  double chi_min = 1.0;          // growth threshold for the verdict
};

struct HighGainReport {
  std::vector<std::pair<double, double>> chi; // (s, sampled chi(s))
  bool consistent = false;
  std::string verdict;
};

/// Samples chi(s) = min over (z in K, nu <= |v| <= 1) of <v, f(z, -s v)>
/// on the probe's lattice. The sampled minimum is an upper bound of the
/// true minimum, so a "consistent" verdict is evidence, not proof; only
/// "falsified at samples" is conclusive.
HighGainReport check_high_gain(const SystemModel& model, const HighGainProbe& probe);

} // namespace mpfc
