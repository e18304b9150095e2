#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "mpfc/config.hpp"
#include "mpfc/toml.hpp"

using namespace mpfc;

namespace {

std::string config_path(const char* name) {
  return std::string(MPFC_CONFIG_DIR) + "/" + name;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

} // namespace

TEST_CASE("toml reader basics") {
  auto doc = toml::parse("a = 1\nb = 2.5\nc = \"text\"\nd = true\n"
                         "e = [1, 2, 3]\nf = { x = 1.0, y = \"z\" }\n"
                         "# comment\n[sec]\ng = -1e-9\n");
  CHECK(doc.at("a").as_integer() == 1);
  CHECK(doc.at("b").as_number() == 2.5);
  CHECK(doc.at("c").as_string() == "text");
  CHECK(doc.at("d").as_bool());
  CHECK(doc.at("e").as_array().size() == 3);
  CHECK(doc.at("e").as_array()[2].as_integer() == 3);
  CHECK(doc.at("f").as_table().at("y").as_string() == "z");
  CHECK(doc.at("sec").as_table().at("g").as_number() == -1e-9);
}

TEST_CASE("toml errors carry line and column") {
  try {
    toml::parse("a = 1\nb = = 2\n");
    FAIL("expected TomlError");
  } catch (const toml::TomlError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() >= 5);
  }
  CHECK_THROWS_AS(toml::parse("a = 1\na = 2\n"), toml::TomlError); // duplicate key
  CHECK_THROWS_AS(toml::parse("a = \"unterminated\n"), toml::TomlError);
}

TEST_CASE("the shipped 2-d scenario loads verbatim") {
  RunConfig cfg = load_config(config_path("paper-example.toml"));
  CHECK(cfg.label == "paper-example");
  CHECK(cfg.loop.plant.label() == "paper-example");
  CHECK(cfg.loop.plant.dim() == 2);
  CHECK(cfg.loop.h == 0.25);
  CHECK(cfg.loop.n == 20);
  CHECK(cfg.loop.horizon() == 5.0);
  CHECK(cfg.loop.t_end == 3.0);
  CHECK(cfg.loop.y0[0] == 3.0);
  CHECK(cfg.loop.y0[1] == -3.0);
  CHECK(cfg.loop.outer.is_infinite());
  CHECK(cfg.loop.gains.n == Surjection::identity);
  CHECK(cfg.loop.stage.Q() == Eigen::MatrixXd::Identity(2, 2));
  CHECK(cfg.loop.stage.R() == 0.2 * Eigen::MatrixXd::Identity(2, 2));
  CHECK(cfg.loop.integrator.abs_tol == 1e-9);
  CHECK(cfg.loop.integrator.rel_tol == 1e-6);
  CHECK(cfg.loop.integrator.spatial_accuracy == 1e-9);
  CHECK(cfg.loop.optimizer.max_evals == 200);
}

TEST_CASE("embedded demo config equals the shipped file") {
  CHECK(paper_example_toml() == slurp(config_path("paper-example.toml")));
}

TEST_CASE("all shipped scenario files load") {
  CHECK_NOTHROW(load_config(config_path("scalar-neg-u.toml")));
  RunConfig affine = load_config(config_path("affine-psi.toml"));
  CHECK(affine.loop.outer.kind() == OuterFunnel::Kind::affine);
  CHECK(affine.loop.outer.a() == 4.0);
  CHECK(affine.loop.outer.b() == 0.5);
}

TEST_CASE("horizon that is not a step multiple is rejected") {
  std::string text = R"(
model = "scalar-neg-u"
y0 = [0.5]
[cost]
q = 1.0
r = 0.1
[mpfc]
h = 0.3
horizon = 5.0
t_end = 2.0
)";
  try {
    load_config_text(text);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    REQUIRE(e.issues().size() >= 1);
    CHECK(e.issues()[0].find("integer multiple") != std::string::npos);
  }
}

TEST_CASE("an indefinite cost matrix is rejected") {
  std::string text = R"(
model = "paper-example"
y0 = [3.0, -3.0]
[cost]
q = [[1.0, 0.0], [0.0, 1.0]]
r = [[-0.1, 0.0], [0.0, 0.2]]
[mpfc]
h = 0.25
n = 20
t_end = 3.0
)";
  try {
    load_config_text(text);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    bool mentions_eigenvalue = false;
    for (const auto& s : e.issues())
      mentions_eigenvalue |= s.find("eigenvalue") != std::string::npos;
    CHECK(mentions_eigenvalue);
  }
}

TEST_CASE("violations are aggregated into one report") {
  std::string text = R"(
model = "paper-example"
y0 = [3.0]
surjection = "quadratic"
[cost]
q = [[1.0, 0.5], [-0.5, 1.0]]
r = 0.2
[mpfc]
h = -0.25
n = 20
t_end = 3.0
)";
  try {
    load_config_text(text);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.issues().size() >= 3); // y0 length, surjection, symmetry, h
  }
}

TEST_CASE("affine outer funnel must stay positive over the window") {
  std::string text = R"(
model = "scalar-neg-u"
y0 = [0.5]
outer = { kind = "affine", a = 4.0, b = 0.5 }
[cost]
q = 1.0
r = 0.1
[mpfc]
h = 0.25
n = 4
t_end = 10.0
)";
  // window is t_end + H = 11, psi(11) = -1.5
  CHECK_THROWS_AS(load_config_text(text), ConfigError);
}

TEST_CASE("initial state must sit inside the outer funnel") {
  std::string text = R"(
model = "scalar-neg-u"
y0 = [5.0]
outer = { kind = "affine", a = 4.0, b = 0.1 }
[cost]
q = 1.0
r = 0.1
[mpfc]
h = 0.25
n = 4
t_end = 1.0
)";
  CHECK_THROWS_AS(load_config_text(text), ConfigError);
}

TEST_CASE("expression-declared plants and prediction models") {
  std::string text = R"(
model = { expr = "y1^2 + y1 - u1; y2^2 + y1 - u2", dim = 2 }
prediction_model = "paper-example"
y0 = [1.0, 1.0]
[cost]
q = 1.0
r = 0.2
[mpfc]
h = 0.25
n = 4
t_end = 0.5
)";
  RunConfig cfg = load_config_text(text);
  REQUIRE(cfg.loop.prediction.has_value());
  CHECK(cfg.loop.prediction->label() == "paper-example");
  CHECK(cfg.loop.plant.dim() == 2);

  std::string bad = text;
  bad.replace(bad.find("dim = 2"), 7, "dim = 1");
  CHECK_THROWS_AS(load_config_text(bad), ConfigError);
}

TEST_CASE("config round-trip is idempotent") {
  for (const char* name : {"paper-example.toml", "scalar-neg-u.toml", "affine-psi.toml"}) {
    RunConfig a = load_config(config_path(name));
    std::string emitted = emit_config(a);
    RunConfig b = load_config_text(emitted);
    CHECK(emit_config(b) == emitted);
  }
}

TEST_CASE("expression models survive the round-trip") {
  std::string text = R"(
model = { expr = "sin(y1) - u1; y1 * y2 - u2", dim = 2 }
y0 = [0.5, 0.5]
[cost]
q = 1.0
r = 0.2
[mpfc]
h = 0.25
n = 4
t_end = 0.5
)";
  RunConfig a = load_config_text(text);
  std::string emitted = emit_config(a);
  RunConfig b = load_config_text(emitted);
  CHECK(emit_config(b) == emitted);
  Eigen::VectorXd y(2), u(2);
  y << 0.3, -0.2;
  u << 0.1, 0.4;
  CHECK((a.loop.plant.rhs(y, u) - b.loop.plant.rhs(y, u)).norm() == 0.0);
}
