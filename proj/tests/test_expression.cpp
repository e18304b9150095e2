#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mpfc/expression.hpp"

using namespace mpfc;

namespace {

double eval2(const VectorFieldExpr& f, double y1, double y2, double u1, double u2, int comp) {
  double y[2] = {y1, y2}, u[2] = {u1, u2}, out[2];
  f.eval(y, u, out);
  return out[comp];
}

} // namespace

TEST_CASE("paper benchmark field parses and evaluates") {
  auto f = parse_vector_field("y1^2 + y1 - u1; y2^2 + y1 - u2", 2);
  CHECK(f.dim() == 2);
  CHECK(eval2(f, 3, -3, 0, 0, 0) == doctest::Approx(12.0).epsilon(1e-14));
  CHECK(eval2(f, 3, -3, 0, 0, 1) == doctest::Approx(12.0).epsilon(1e-14));
  CHECK(eval2(f, 0, 0, 0, 0, 0) == 0.0);
  CHECK(eval2(f, 1, 2, 0.5, -1, 0) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(eval2(f, 1, 2, 0.5, -1, 1) == doctest::Approx(6.0).epsilon(1e-14));
}

TEST_CASE("zero field evaluates to zero everywhere") {
  auto f = parse_vector_field("0; 0", 2);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(-10, 10);
  for (int k = 0; k < 20; ++k) {
    CHECK(eval2(f, dist(rng), dist(rng), dist(rng), dist(rng), 0) == 0.0);
    CHECK(eval2(f, dist(rng), dist(rng), dist(rng), dist(rng), 1) == 0.0);
  }
}

TEST_CASE("component count must match the dimension") {
  CHECK_THROWS_AS(parse_vector_field("y1 + u2", 2), ParseError);
  CHECK_THROWS_AS(parse_vector_field("y1; y2; y1", 2), ParseError);
  CHECK_THROWS_AS(parse_vector_field("", 1), ParseError);
}

TEST_CASE("syntax errors carry a position") {
  try {
    parse_vector_field("y1 + * u1", 1);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.position() == 5);
  }
}

TEST_CASE("unknown identifiers and bad indices are rejected") {
  CHECK_THROWS_AS(parse_vector_field("foo + y1", 1), ParseError);
  CHECK_THROWS_AS(parse_vector_field("y3", 2), ParseError);
  CHECK_THROWS_AS(parse_vector_field("u0", 2), ParseError);
  CHECK_THROWS_AS(parse_vector_field("y1^2.5", 1), ParseError);
  CHECK_THROWS_AS(parse_vector_field("(y1", 1), ParseError);
}

TEST_CASE("newlines separate components like semicolons") {
  auto f = parse_vector_field("u1 * 2\n-y2", 2);
  CHECK(eval2(f, 0, 3, 4, 0, 0) == doctest::Approx(8.0));
  CHECK(eval2(f, 0, 3, 4, 0, 1) == doctest::Approx(-3.0));
}

TEST_CASE("parsed evaluation matches hand-built closures on random points") {
  struct Case {
    const char* source;
    int m;
    std::function<double(const double*, const double*, int)> ref;
  };
  const Case cases[] = {
      {"y1^2 + y1 - u1; y2^2 + y1 - u2", 2,
       [](const double* y, const double* u, int i) {
         return i == 0 ? y[0] * y[0] + y[0] - u[0] : y[1] * y[1] + y[0] - u[1];
       }},
      {"sin(y1) * cos(u1) + exp(-y1^2)", 1,
       [](const double* y, const double* u, int) {
         return std::sin(y[0]) * std::cos(u[0]) + std::exp(-y[0] * y[0]);
       }},
      {"-y1 / (1 + u1^2) + 0.5 * y1^3", 1,
       [](const double* y, const double* u, int) {
         return -y[0] / (1 + u[0] * u[0]) + 0.5 * y[0] * y[0] * y[0];
       }},
      {"2e-3 * y1 - u1 * u2; y1 * y2 * u1", 2,
       [](const double* y, const double* u, int i) {
         return i == 0 ? 2e-3 * y[0] - u[0] * u[1] : y[0] * y[1] * u[0];
       }},
  };

  std::mt19937 rng(42);
  std::uniform_real_distribution<double> dist(-3, 3);
  for (const auto& c : cases) {
    auto f = parse_vector_field(c.source, c.m);
    for (int trial = 0; trial < 12; ++trial) {
      double y[2] = {dist(rng), dist(rng)};
      double u[2] = {dist(rng), dist(rng)};
      double out[2];
      f.eval({y, 2}, {u, 2}, {out, 2});
      for (int i = 0; i < c.m; ++i) {
        double expect = c.ref(y, u, i);
        CHECK(out[i] == doctest::Approx(expect).epsilon(1e-12));
      }
    }
  }
}
