#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpfc {

/// Syntax error while parsing a vector-field expression. `position` is the
/// zero-based byte offset into the source text.
class ParseError : public std::runtime_error {
public:
  ParseError(std::string message, std::size_t position)
      : std::runtime_error("parse error at position " + std::to_string(position) + ": " +
                           message),
        position_(position) {}

  std::size_t position() const { return position_; }

private:
  std::size_t position_;
};

/// Non-finite value produced while evaluating a vector field.
class EvalError : public std::runtime_error {
public:
  EvalError(std::string message, int component)
      : std::runtime_error(std::move(message)), component_(component) {}

  /// Zero-based index of the offending component.
  int component() const { return component_; }

private:
  int component_;
};

/// The state touched or left the funnel boundary while the boundary was
/// still open. Carries the local funnel time, the state norm and the
/// boundary value for diagnostics.
class FunnelViolation : public std::runtime_error {
public:
  FunnelViolation(double tau, double norm_y, double phi)
      : std::runtime_error("funnel violation at tau=" + std::to_string(tau) +
                           ": |y|=" + std::to_string(norm_y) + " >= phi=" + std::to_string(phi)),
        tau_(tau), norm_y_(norm_y), phi_(phi) {}

  double tau() const { return tau_; }
  double norm_y() const { return norm_y_; }
  double phi() const { return phi_; }

private:
  double tau_, norm_y_, phi_;
};

/// Integration aborted: step underflow, step budget exhausted or a
/// non-finite state that persisted down to the minimum step size.
class IntegrationError : public std::runtime_error {
public:
  enum class Kind { step_underflow, max_steps, non_finite };

  IntegrationError(Kind kind, double t, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind), t_(t) {}

  Kind kind() const { return kind_; }
  double t() const { return t_; }

private:
  Kind kind_;
  double t_;
};

/// Configuration rejected. Aggregates every violated invariant so the user
/// sees the whole report at once.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(std::vector<std::string> issues)
      : std::runtime_error(join(issues)), issues_(std::move(issues)) {}

  const std::vector<std::string>& issues() const { return issues_; }

private:
  static std::string join(const std::vector<std::string>& issues) {
    std::string out = "invalid configuration:";
    for (const auto& s : issues) out += "\n  - " + s;
    return out;
  }

  std::vector<std::string> issues_;
};

/// A CSV file does not match the emitted schema.
class SchemaError : public std::runtime_error {
public:
  explicit SchemaError(std::string message) : std::runtime_error(std::move(message)) {}
};

} // namespace mpfc
