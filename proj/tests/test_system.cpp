#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mpfc/system.hpp"

using namespace mpfc;

namespace {

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

} // namespace

TEST_CASE("builtin paper model matches direct substitution") {
  SystemModel model = builtin_model("paper-example");
  CHECK(model.dim() == 2);
  Vec f = model.rhs(vec2(3, -3), vec2(0, 0));
  CHECK(f[0] == doctest::Approx(12.0).epsilon(1e-14));
  CHECK(f[1] == doctest::Approx(12.0).epsilon(1e-14));
}

TEST_CASE("all registered models vanish at the origin") {
  for (const auto& label : builtin_model_labels()) {
    SystemModel model = builtin_model(label);
    Vec zero = Vec::Zero(model.dim());
    CHECK(model.rhs(zero, zero).norm() <= 1e-12);
  }
}

TEST_CASE("scalar -u model evaluates directly") {
  SystemModel model = builtin_model("scalar-neg-u");
  Vec y(1), u(1);
  y << 5;
  u << 2;
  CHECK(model.rhs(y, u)[0] == -2.0);
}

TEST_CASE("a model with f(0,0) != 0 is rejected at construction") {
  CHECK_THROWS_AS(model_from_expression("bad", 1, "y1 + 1"), std::invalid_argument);
  CHECK_THROWS_AS(
      SystemModel("bad-native", 1, [](const Vec&, const Vec&, Vec& out) { out[0] = 0.5; }),
      std::invalid_argument);
}

TEST_CASE("non-finite evaluation reports the offending component") {
  SystemModel model = model_from_expression("divide", 2, "y1 / (1 + u1) - y1; y2");
  Vec y = vec2(1, 2), u = vec2(-1, 0);
  try {
    model.rhs(y, u);
    FAIL("expected EvalError");
  } catch (const EvalError& e) {
    CHECK(e.component() == 0);
  }
}

TEST_CASE("expression-backed model agrees with the native paper model") {
  SystemModel native = builtin_model("paper-example");
  SystemModel parsed = model_from_expression("paper-parsed", 2, "y1^2 + y1 - u1; y2^2 + y1 - u2");
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> dist(-4, 4);
  for (int k = 0; k < 25; ++k) {
    Vec y = vec2(dist(rng), dist(rng)), u = vec2(dist(rng), dist(rng));
    Vec a = native.rhs(y, u), b = parsed.rhs(y, u);
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("high-gain check: f = -u gives chi(s) = s nu^2, increasing") {
  SystemModel model = builtin_model("scalar-neg-u");
  HighGainProbe probe;
  probe.box_lo = Vec::Constant(1, -1.0);
  probe.box_hi = Vec::Constant(1, 1.0);
  probe.nu = 0.5;
  probe.gains = {1, 10, 100};
  probe.chi_min = 10.0;
  HighGainReport report = check_high_gain(model, probe);
  REQUIRE(report.chi.size() == 3);
  CHECK(report.chi[0].second == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(report.chi[1].second == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(report.chi[2].second == doctest::Approx(25.0).epsilon(1e-12));
  CHECK(report.chi[0].second < report.chi[1].second);
  CHECK(report.chi[1].second < report.chi[2].second);
  CHECK(report.consistent);
  CHECK(report.verdict == "consistent");
}

TEST_CASE("high-gain check: wrong input sign is falsified") {
  SystemModel model("scalar-pos-u", 1, [](const Vec&, const Vec& u, Vec& out) { out[0] = u[0]; });
  HighGainProbe probe;
  probe.box_lo = Vec::Constant(1, -1.0);
  probe.box_hi = Vec::Constant(1, 1.0);
  probe.nu = 0.5;
  probe.gains = {1, 10, 100};
  probe.chi_min = 1.0;
  HighGainReport report = check_high_gain(model, probe);
  CHECK(report.chi[0].second > report.chi[1].second);
  CHECK(report.chi[1].second > report.chi[2].second);
  CHECK_FALSE(report.consistent);
  CHECK(report.verdict == "falsified at samples");
}

TEST_CASE("high-gain check: paper system consistent on [-5,5]^2") {
  SystemModel model = builtin_model("paper-example");
  HighGainProbe probe;
  probe.box_lo = vec2(-5, -5);
  probe.box_hi = vec2(5, 5);
  probe.nu = 0.5;
  probe.gains = {10, 100, 1000, 10000};
  probe.state_samples = 21;
  probe.direction_samples = 64;
  probe.radial_samples = 8;
  probe.chi_min = 100.0;
  HighGainReport report = check_high_gain(model, probe);
  REQUIRE(report.chi.size() == 4);
  for (std::size_t k = 1; k < report.chi.size(); ++k)
    CHECK(report.chi[k - 1].second < report.chi[k].second);
  CHECK(report.consistent);
}

TEST_CASE("probe validation") {
  SystemModel model = builtin_model("scalar-neg-u");
  HighGainProbe probe;
  probe.box_lo = Vec::Constant(1, 1.0);
  probe.box_hi = Vec::Constant(1, -1.0); // out of order
  probe.gains = {1};
  CHECK_THROWS_AS(check_high_gain(model, probe), std::invalid_argument);
  probe.box_lo = Vec::Constant(1, -1.0);
  probe.box_hi = Vec::Constant(1, 1.0);
  probe.nu = 1.5;
  CHECK_THROWS_AS(check_high_gain(model, probe), std::invalid_argument);
}
