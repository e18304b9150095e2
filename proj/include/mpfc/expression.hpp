#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mpfc/errors.hpp"

namespace mpfc {

/// One parsed scalar expression over the variables y1..ym, u1..um.
///
/// Grammar: + - * /, unary minus, ^ with an integer exponent, and the
/// functions sin, cos, exp. Numeric literals use the usual C float syntax.
class Expr {
public:
  struct Node;
  using NodePtr = std::unique_ptr<Node>;

  enum class Op { constant, state_var, input_var, add, sub, mul, div, neg, pow_int, sin, cos, exp };

  struct Node {
    Op op;
    double value = 0.0; // constant
    int index = 0;      // variable index (0-based) or integer exponent
    NodePtr lhs, rhs;
  };

  Expr() = default;
  explicit Expr(NodePtr root) : root_(std::move(root)) {}

  double eval(std::span<const double> y, std::span<const double> u) const;

  bool empty() const { return root_ == nullptr; }

private:
  NodePtr root_;
};

/// A system right-hand side declared as text: one expression per component,
/// components separated by ';' or newlines.
class VectorFieldExpr {
public:
  VectorFieldExpr(std::vector<Expr> components, int dim, std::string source);

  int dim() const { return dim_; }
  const std::string& source() const { return source_; }

  /// Evaluates all components into `out` (length == dim).
  void eval(std::span<const double> y, std::span<const double> u, std::span<double> out) const;

private:
  std::vector<Expr> components_;
  int dim_;
  std::string source_;
};

/// Parses `source` as an m-component vector field.
///
/// Throws ParseError (position-annotated) on bad syntax, unknown
/// identifiers, variable indices above m, or a component count != m.
VectorFieldExpr parse_vector_field(const std::string& source, int m);

} // namespace mpfc
