#include "mpfc/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

namespace mpfc {

namespace {

double eval_node(const Expr::Node& n, std::span<const double> y, std::span<const double> u) {
  using Op = Expr::Op;
  switch (n.op) {
    case Op::constant: return n.value;
    case Op::state_var: return y[static_cast<std::size_t>(n.index)];
    case Op::input_var: return u[static_cast<std::size_t>(n.index)];
    case Op::add: return eval_node(*n.lhs, y, u) + eval_node(*n.rhs, y, u);
    case Op::sub: return eval_node(*n.lhs, y, u) - eval_node(*n.rhs, y, u);
    case Op::mul: return eval_node(*n.lhs, y, u) * eval_node(*n.rhs, y, u);
    case Op::div: return eval_node(*n.lhs, y, u) / eval_node(*n.rhs, y, u);
    case Op::neg: return -eval_node(*n.lhs, y, u);
    case Op::pow_int: return std::pow(eval_node(*n.lhs, y, u), n.index);
    case Op::sin: return std::sin(eval_node(*n.lhs, y, u));
    case Op::cos: return std::cos(eval_node(*n.lhs, y, u));
    case Op::exp: return std::exp(eval_node(*n.lhs, y, u));
  }
  return 0.0; // unreachable
}

class Parser {
public:
  Parser(const std::string& src, std::size_t begin, std::size_t end, int m)
      : src_(src), pos_(begin), end_(end), m_(m) {}

  Expr::NodePtr parse() {
    auto node = expression();
    skip_ws();
    if (pos_ != end_) fail("unexpected trailing input");
    return node;
  }

private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < end_ && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < end_ ? src_[pos_] : '\0';
  }

  bool consume(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr::NodePtr make(Expr::Op op, Expr::NodePtr lhs = nullptr, Expr::NodePtr rhs = nullptr) {
    auto n = std::make_unique<Expr::Node>();
    n->op = op;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
  }

  Expr::NodePtr expression() {
    auto node = term();
    for (;;) {
      if (consume('+'))
        node = make(Expr::Op::add, std::move(node), term());
      else if (consume('-'))
        node = make(Expr::Op::sub, std::move(node), term());
      else
        return node;
    }
  }

  Expr::NodePtr term() {
    auto node = unary();
    for (;;) {
      if (consume('*'))
        node = make(Expr::Op::mul, std::move(node), unary());
      else if (consume('/'))
        node = make(Expr::Op::div, std::move(node), unary());
      else
        return node;
    }
  }

  Expr::NodePtr unary() {
    if (consume('-')) return make(Expr::Op::neg, unary());
    return power();
  }

  Expr::NodePtr power() {
    auto base = atom();
    if (consume('^')) {
      auto node = make(Expr::Op::pow_int, std::move(base));
      node->index = integer_exponent();
      return node;
    }
    return base;
  }

  int integer_exponent() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ < end_ && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
    std::size_t digits = pos_;
    while (pos_ < end_ && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (pos_ == digits) fail("integer exponent expected after '^'");
    if (pos_ < end_ && (src_[pos_] == '.' || src_[pos_] == 'e' || src_[pos_] == 'E'))
      fail("integer exponent expected after '^'");
    return std::atoi(src_.substr(start, pos_ - start).c_str());
  }

  Expr::NodePtr atom() {
    char c = peek();
    if (c == '(') {
      ++pos_;
      auto node = expression();
      if (!consume(')')) fail("expected ')'");
      return node;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    if (c == '\0') fail("unexpected end of expression");
    fail(std::string("unexpected character '") + c + "'");
  }

  Expr::NodePtr number() {
    skip_ws();
    const char* begin = src_.c_str() + pos_;
    char* after = nullptr;
    double v = std::strtod(begin, &after);
    if (after == begin) fail("malformed number");
    std::size_t len = static_cast<std::size_t>(after - begin);
    if (pos_ + len > end_) fail("number extends past component boundary");
    pos_ += len;
    auto n = make(Expr::Op::constant);
    n->value = v;
    return n;
  }

  Expr::NodePtr identifier() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < end_ && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    std::string name = src_.substr(start, pos_ - start);

    if (name == "sin" || name == "cos" || name == "exp") {
      if (!consume('(')) fail("expected '(' after function name");
      auto arg = expression();
      if (!consume(')')) fail("expected ')'");
      Expr::Op op = name == "sin" ? Expr::Op::sin : name == "cos" ? Expr::Op::cos : Expr::Op::exp;
      return make(op, std::move(arg));
    }

    if ((name[0] == 'y' || name[0] == 'u') && name.size() > 1) {
      bool all_digits = true;
      for (std::size_t i = 1; i < name.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(name[i]))) all_digits = false;
      if (all_digits) {
        int idx = std::atoi(name.c_str() + 1);
        if (idx < 1 || idx > m_) {
          pos_ = start;
          fail("variable '" + name + "' out of range: indices run 1.." + std::to_string(m_));
        }
        auto n = make(name[0] == 'y' ? Expr::Op::state_var : Expr::Op::input_var);
        n->index = idx - 1;
        return n;
      }
    }

    pos_ = start;
    fail("unknown identifier '" + name + "'");
  }

  const std::string& src_;
  std::size_t pos_;
  std::size_t end_;
  int m_;
};

} // namespace

double Expr::eval(std::span<const double> y, std::span<const double> u) const {
  return eval_node(*root_, y, u);
}

VectorFieldExpr::VectorFieldExpr(std::vector<Expr> components, int dim, std::string source)
    : components_(std::move(components)), dim_(dim), source_(std::move(source)) {}

void VectorFieldExpr::eval(std::span<const double> y, std::span<const double> u,
                           std::span<double> out) const {
  for (std::size_t i = 0; i < components_.size(); ++i) out[i] = components_[i].eval(y, u);
}

VectorFieldExpr parse_vector_field(const std::string& source, int m) {
  if (m < 1) throw ParseError("dimension must be positive", 0);

  // Split on ';' and newlines, keeping byte offsets for error positions.
  std::vector<std::pair<std::size_t, std::size_t>> segments;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= source.size(); ++i) {
    if (i == source.size() || source[i] == ';' || source[i] == '\n') {
      bool blank = true;
      for (std::size_t j = start; j < i; ++j)
        if (!std::isspace(static_cast<unsigned char>(source[j]))) blank = false;
      if (!blank) segments.emplace_back(start, i);
      start = i + 1;
    }
  }

  if (static_cast<int>(segments.size()) != m)
    throw ParseError("dimension mismatch: " + std::to_string(segments.size()) +
                         " component(s) for m=" + std::to_string(m),
                     segments.empty() ? 0 : segments.back().first);

  std::vector<Expr> components;
  components.reserve(segments.size());
  for (auto [b, e] : segments) {
    Parser p(source, b, e, m);
    components.emplace_back(p.parse());
  }
  return VectorFieldExpr(std::move(components), m, source);
}

} // namespace mpfc
