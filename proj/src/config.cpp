#include "mpfc/config.hpp"

#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>

#include "mpfc/log.hpp"
#include "mpfc/toml.hpp"

namespace mpfc {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class Loader {
public:
  explicit Loader(const toml::Table& root) : root_(root) {}

  RunConfig load() {
    // Models first: everything downstream needs the dimension.
    std::optional<SystemModel> plant = model_at(root_, "model", "model");
    std::optional<SystemModel> prediction;
    if (root_.count("prediction_model"))
      prediction = model_at(root_, "prediction_model", "prediction_model");
    if (plant && prediction && prediction->dim() != plant->dim())
      issue("prediction_model dimension (" + std::to_string(prediction->dim()) +
            ") does not match model dimension (" + std::to_string(plant->dim()) + ")");

    int m = plant ? plant->dim() : 1;

    Eigen::VectorXd y0 = vector_field("y0", m);
    std::optional<StageCost> stage = stage_cost(m);
    OuterFunnel outer = outer_funnel();
    GainSpec gains = gain_spec();

    double h = number_in("mpfc", "h", 0.25);
    double t_end = number_in("mpfc", "t_end", 1.0);
    int n = horizon_multiplier(h);

    if (!plant || !stage) throw_if_issues(); // cannot assemble anything further

    MpfcConfig loop(std::move(*plant), std::move(*stage), std::move(y0));
    loop.prediction = std::move(prediction);
    loop.h = h;
    loop.n = n;
    loop.t_end = t_end;
    loop.gains = gains;
    loop.outer = outer;
    loop.equilibrium_threshold = number_in("mpfc", "equilibrium_threshold", 1e-8);
    loop.nodes_per_interval = static_cast<int>(integer_in("mpfc", "nodes_per_interval", 200));
    loop.measurement_noise = number_in("mpfc", "measurement_noise", 0.0);
    loop.noise_seed = static_cast<std::uint64_t>(integer_in("mpfc", "noise_seed", 0));

    load_integrator(loop.integrator);
    load_optimizer(loop.optimizer);

    validate(loop);
    throw_if_issues();

    RunConfig cfg(std::move(loop));
    cfg.label = string_at(root_, "label", "unnamed");
    cfg.seed = static_cast<std::uint64_t>(integer_at(root_, "seed", 0));
    cfg.loop.optimizer.seed = cfg.seed;
    cfg.out_dir = string_at(root_, "out_dir", "out");
    cfg.formats = formats();
    return cfg;
  }

private:
  void issue(std::string s) { issues_.push_back(std::move(s)); }

  void throw_if_issues() {
    if (!issues_.empty()) throw ConfigError(std::move(issues_));
  }

  const toml::Value* find(const toml::Table& t, const std::string& key) {
    auto it = t.find(key);
    return it == t.end() ? nullptr : &it->second;
  }

  const toml::Table* section(const std::string& name) {
    const toml::Value* v = find(root_, name);
    if (!v) return nullptr;
    if (!v->is_table()) {
      issue("[" + name + "] must be a table");
      return nullptr;
    }
    return &v->as_table();
  }

  std::string string_at(const toml::Table& t, const std::string& key, std::string fallback) {
    const toml::Value* v = find(t, key);
    if (!v) return fallback;
    if (!v->is_string()) {
      issue("'" + key + "' must be a string");
      return fallback;
    }
    return v->as_string();
  }

  double number_at(const toml::Table& t, const std::string& key, double fallback) {
    const toml::Value* v = find(t, key);
    if (!v) return fallback;
    if (!v->is_number()) {
      issue("'" + key + "' must be a number");
      return fallback;
    }
    return v->as_number();
  }

  std::int64_t integer_at(const toml::Table& t, const std::string& key, std::int64_t fallback) {
    const toml::Value* v = find(t, key);
    if (!v) return fallback;
    if (!v->is_integer()) {
      issue("'" + key + "' must be an integer");
      return fallback;
    }
    return v->as_integer();
  }

  double number_in(const std::string& sec, const std::string& key, double fallback) {
    const toml::Table* t = section(sec);
    return t ? number_at(*t, key, fallback) : fallback;
  }

  std::int64_t integer_in(const std::string& sec, const std::string& key, std::int64_t fallback) {
    const toml::Table* t = section(sec);
    return t ? integer_at(*t, key, fallback) : fallback;
  }

  std::optional<SystemModel> model_at(const toml::Table& t, const std::string& key,
                                      const std::string& what) {
    const toml::Value* v = find(t, key);
    if (!v) {
      issue("missing '" + key + "'");
      return std::nullopt;
    }
    try {
      if (v->is_string()) return builtin_model(v->as_string());
      if (v->is_table()) {
        const toml::Table& mt = v->as_table();
        const toml::Value* expr = find(mt, "expr");
        const toml::Value* dim = find(mt, "dim");
        if (!expr || !expr->is_string() || !dim || !dim->is_integer()) {
          issue("'" + what + "' table needs expr (string) and dim (integer)");
          return std::nullopt;
        }
        return model_from_expression(what, static_cast<int>(dim->as_integer()),
                                     expr->as_string());
      }
      issue("'" + what + "' must be a builtin label or an { expr, dim } table");
    } catch (const std::exception& e) {
      issue(what + ": " + e.what());
    }
    return std::nullopt;
  }

  Eigen::VectorXd vector_field(const std::string& key, int m) {
    const toml::Value* v = find(root_, key);
    if (!v) {
      issue("missing '" + key + "'");
      return Eigen::VectorXd::Zero(m);
    }
    if (!v->is_array()) {
      issue("'" + key + "' must be an array of numbers");
      return Eigen::VectorXd::Zero(m);
    }
    const toml::Array& a = v->as_array();
    Eigen::VectorXd out(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!a[i].is_number()) {
        issue("'" + key + "' must contain numbers only");
        return Eigen::VectorXd::Zero(m);
      }
      out[static_cast<Eigen::Index>(i)] = a[i].as_number();
    }
    if (out.size() != m)
      issue("'" + key + "' has length " + std::to_string(out.size()) +
            " but the model dimension is " + std::to_string(m));
    return out;
  }

  std::optional<Eigen::MatrixXd> matrix_at(const toml::Table& t, const std::string& key, int m) {
    const toml::Value* v = find(t, key);
    if (!v) {
      issue("missing 'cost." + key + "'");
      return std::nullopt;
    }
    if (v->is_number()) return v->as_number() * Eigen::MatrixXd::Identity(m, m);
    if (!v->is_array()) {
      issue("'cost." + key + "' must be a scalar or a matrix (array of rows)");
      return std::nullopt;
    }
    const toml::Array& rows = v->as_array();
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(rows.size()));
    if (static_cast<int>(rows.size()) != m) {
      issue("'cost." + key + "' must be " + std::to_string(m) + "x" + std::to_string(m));
      return std::nullopt;
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!rows[i].is_array() || rows[i].as_array().size() != rows.size()) {
        issue("'cost." + key + "' must be square");
        return std::nullopt;
      }
      const toml::Array& row = rows[i].as_array();
      for (std::size_t j = 0; j < row.size(); ++j) {
        if (!row[j].is_number()) {
          issue("'cost." + key + "' must contain numbers only");
          return std::nullopt;
        }
        out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j].as_number();
      }
    }
    return out;
  }

  std::optional<StageCost> stage_cost(int m) {
    const toml::Table* t = section("cost");
    if (!t) {
      issue("missing [cost] section");
      return std::nullopt;
    }
    auto Q = matrix_at(*t, "q", m);
    auto R = matrix_at(*t, "r", m);
    if (!Q || !R) return std::nullopt;
    try {
      StageCost sc(*Q, *R);
      if (!sc.q_positive_definite())
        log::warn("cost.q is only positive semidefinite: the asymptotic-convergence guarantee "
                  "needs a positive definite Q");
      return sc;
    } catch (const std::exception& e) {
      issue(e.what());
      return std::nullopt;
    }
  }

  OuterFunnel outer_funnel() {
    const toml::Value* v = find(root_, "outer");
    if (!v) return OuterFunnel::infinite();
    try {
      if (v->is_string()) {
        if (v->as_string() == "infinite") return OuterFunnel::infinite();
        issue("outer: unknown variant '" + v->as_string() + "' (expected \"infinite\" or a table)");
        return OuterFunnel::infinite();
      }
      if (v->is_table()) {
        const toml::Table& t = v->as_table();
        std::string kind = string_at(t, "kind", "");
        double a = number_at(t, "a", 1.0);
        double b = number_at(t, "b", 0.0);
        if (kind == "affine") return OuterFunnel::affine(a, b);
        if (kind == "exponential") return OuterFunnel::exponential(a, b, number_at(t, "r", 0.0));
        if (kind == "infinite") return OuterFunnel::infinite();
        issue("outer.kind must be one of infinite | affine | exponential");
      } else {
        issue("outer must be a string or a table");
      }
    } catch (const std::exception& e) {
      issue(std::string("outer: ") + e.what());
    }
    return OuterFunnel::infinite();
  }

  GainSpec gain_spec() {
    std::string name = string_at(root_, "surjection", "identity");
    try {
      return GainSpec{surjection_from_name(name)};
    } catch (const std::exception& e) {
      issue(e.what());
      return GainSpec{};
    }
  }

  int horizon_multiplier(double h) {
    const toml::Table* t = section("mpfc");
    if (!t) {
      issue("missing [mpfc] section");
      return 2;
    }
    const toml::Value* n_v = find(*t, "n");
    const toml::Value* H_v = find(*t, "horizon");
    if (!n_v && !H_v) {
      issue("[mpfc] needs 'n' or 'horizon'");
      return 2;
    }
    int n = 2;
    if (n_v) {
      if (!n_v->is_integer()) {
        issue("mpfc.n must be an integer");
        return 2;
      }
      n = static_cast<int>(n_v->as_integer());
    }
    if (H_v) {
      double H = H_v->as_number();
      double ratio = H / h;
      int rounded = static_cast<int>(std::llround(ratio));
      if (std::abs(rounded * h - H) > 1e-9 * std::max(1.0, std::abs(H)))
        issue("horizon H = " + fmt(H) + " is not an integer multiple of h = " + fmt(h));
      else if (n_v && rounded != n)
        issue("mpfc.n and mpfc.horizon disagree");
      else
        n = rounded;
    }
    return n;
  }

  void load_integrator(IntegratorConfig& icfg) {
    icfg.abs_tol = number_in("integrator", "abs_tol", icfg.abs_tol);
    icfg.rel_tol = number_in("integrator", "rel_tol", icfg.rel_tol);
    icfg.spatial_accuracy = number_in("integrator", "spatial_accuracy", icfg.spatial_accuracy);
    icfg.initial_step = number_in("integrator", "initial_step", icfg.initial_step);
    icfg.min_step = number_in("integrator", "min_step", icfg.min_step);
    icfg.max_steps = integer_in("integrator", "max_steps", icfg.max_steps);
    icfg.output_dt = number_in("integrator", "output_dt", icfg.output_dt);
  }

  void load_optimizer(OptimizerConfig& ocfg) {
    std::string method = "nelder-mead";
    if (const toml::Table* t = section("optimizer")) method = string_at(*t, "method", method);
    if (method == "grid")
      ocfg.method = SearchMethod::grid;
    else if (method == "nelder-mead")
      ocfg.method = SearchMethod::nelder_mead;
    else
      issue("optimizer.method must be nelder-mead or grid");
    ocfg.max_evals = static_cast<int>(integer_in("optimizer", "max_evals", ocfg.max_evals));
    ocfg.simplex_spread = number_in("optimizer", "simplex_spread", ocfg.simplex_spread);
    ocfg.j_tol = number_in("optimizer", "j_tol", ocfg.j_tol);
    ocfg.c_min = number_in("optimizer", "c_min", ocfg.c_min);
    ocfg.c_max = number_in("optimizer", "c_max", ocfg.c_max);
    ocfg.grid.c_lo = number_in("optimizer", "grid_c_lo", ocfg.grid.c_lo);
    ocfg.grid.c_hi = number_in("optimizer", "grid_c_hi", ocfg.grid.c_hi);
    ocfg.grid.c_count = static_cast<int>(integer_in("optimizer", "grid_c", ocfg.grid.c_count));
    ocfg.grid.T_lo = number_in("optimizer", "grid_T_lo", ocfg.grid.T_lo);
    ocfg.grid.T_hi = number_in("optimizer", "grid_T_hi", ocfg.grid.T_hi);
    ocfg.grid.T_count = static_cast<int>(integer_in("optimizer", "grid_T", ocfg.grid.T_count));
  }

  OutputFormats formats() {
    std::string f = string_at(root_, "formats", "both");
    if (f == "csv") return OutputFormats::csv;
    if (f == "report") return OutputFormats::report;
    if (f == "both") return OutputFormats::both;
    issue("formats must be csv | report | both");
    return OutputFormats::both;
  }

  void validate(const MpfcConfig& loop) {
    if (!(loop.h > 0.0)) issue("mpfc.h must be positive");
    if (loop.n < 2) issue("horizon must span at least two steps (n >= 2)");
    if (!(loop.t_end > 0.0)) issue("mpfc.t_end must be positive");
    if (!(loop.equilibrium_threshold > 0.0)) issue("mpfc.equilibrium_threshold must be positive");
    if (loop.nodes_per_interval < 1) issue("mpfc.nodes_per_interval must be >= 1");
    if (loop.measurement_noise < 0.0) issue("mpfc.measurement_noise must be >= 0");

    const IntegratorConfig& icfg = loop.integrator;
    if (!(icfg.abs_tol > 0.0) || !(icfg.rel_tol > 0.0) || !(icfg.spatial_accuracy > 0.0) ||
        !(icfg.initial_step > 0.0) || !(icfg.min_step > 0.0) || !(icfg.output_dt > 0.0))
      issue("integrator tolerances and steps must be positive");
    if (!(icfg.min_step < icfg.initial_step))
      issue("integrator.min_step must be below integrator.initial_step");
    if (icfg.max_steps < 1) issue("integrator.max_steps must be positive");

    const OptimizerConfig& ocfg = loop.optimizer;
    if (ocfg.max_evals < 10) issue("optimizer.max_evals must be >= 10");
    if (!(ocfg.c_min > 0.0) || !(ocfg.c_max > ocfg.c_min))
      issue("optimizer c bounds must satisfy 0 < c_min < c_max");
    if (!(ocfg.simplex_spread > 0.0)) issue("optimizer.simplex_spread must be positive");
    if (!(ocfg.j_tol > 0.0)) issue("optimizer.j_tol must be positive");
    if (ocfg.grid.c_count < 1 || ocfg.grid.T_count < 1) issue("optimizer grid counts must be >= 1");

    // Outer funnel positivity over the whole window the run can touch.
    if (loop.outer.kind() == OuterFunnel::Kind::affine) {
      double window = loop.t_end + loop.horizon();
      if (!(loop.outer.value(window) > 0.0))
        issue("outer funnel psi(t) = " + fmt(loop.outer.a()) + " - " + fmt(loop.outer.b()) +
              " t is not positive over the simulation window [0, " + fmt(window) + "]");
    }
    if (!(loop.y0.norm() < loop.outer.value(0.0)))
      issue("|y0| = " + fmt(loop.y0.norm()) + " must be below psi(0) = " +
            fmt(loop.outer.value(0.0)));
  }

  const toml::Table& root_;
  std::vector<std::string> issues_;
};

} // namespace

RunConfig load_config_text(const std::string& text) {
  return Loader(toml::parse(text)).load();
}

RunConfig load_config(const std::string& path) {
  return Loader(toml::parse_file(path)).load();
}

namespace {

void emit_matrix(std::ostream& os, const char* key, const Eigen::MatrixXd& M) {
  os << key << " = [";
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    os << (i ? ", [" : "[");
    for (Eigen::Index j = 0; j < M.cols(); ++j) os << (j ? ", " : "") << fmt(M(i, j));
    os << "]";
  }
  os << "]\n";
}

void emit_model(std::ostream& os, const char* key, const SystemModel& model) {
  bool builtin = false;
  for (const auto& label : builtin_model_labels()) builtin |= label == model.label();
  if (builtin) {
    os << key << " = \"" << model.label() << "\"\n";
    return;
  }
  if (model.source().empty())
    throw std::logic_error("cannot serialize native model '" + model.label() +
                           "' without an expression source");
  std::string escaped;
  for (char c : model.source()) {
    if (c == '"' || c == '\\') escaped += '\\';
    escaped += c == '\n' ? ';' : c;
  }
  os << key << " = { expr = \"" << escaped << "\", dim = " << model.dim() << " }\n";
}

} // namespace

std::string emit_config(const RunConfig& cfg) {
  const MpfcConfig& loop = cfg.loop;
  std::ostringstream os;
  os << "label = \"" << cfg.label << "\"\n";
  os << "seed = " << cfg.seed << "\n";
  os << "out_dir = \"" << cfg.out_dir << "\"\n";
  os << "formats = \""
     << (cfg.formats == OutputFormats::csv ? "csv"
                                           : cfg.formats == OutputFormats::report ? "report"
                                                                                  : "both")
     << "\"\n";
  emit_model(os, "model", loop.plant);
  if (loop.prediction) emit_model(os, "prediction_model", *loop.prediction);
  os << "y0 = [";
  for (Eigen::Index i = 0; i < loop.y0.size(); ++i) os << (i ? ", " : "") << fmt(loop.y0[i]);
  os << "]\n";
  switch (loop.outer.kind()) {
    case OuterFunnel::Kind::infinite: os << "outer = \"infinite\"\n"; break;
    case OuterFunnel::Kind::affine:
      os << "outer = { kind = \"affine\", a = " << fmt(loop.outer.a())
         << ", b = " << fmt(loop.outer.b()) << " }\n";
      break;
    case OuterFunnel::Kind::exponential:
      os << "outer = { kind = \"exponential\", a = " << fmt(loop.outer.a())
         << ", b = " << fmt(loop.outer.b()) << ", r = " << fmt(loop.outer.r()) << " }\n";
      break;
  }
  os << "surjection = \"" << surjection_name(loop.gains.n) << "\"\n";

  os << "\n[cost]\n";
  emit_matrix(os, "q", loop.stage.Q());
  emit_matrix(os, "r", loop.stage.R());

  os << "\n[mpfc]\n";
  os << "h = " << fmt(loop.h) << "\n";
  os << "n = " << loop.n << "\n";
  os << "t_end = " << fmt(loop.t_end) << "\n";
  os << "equilibrium_threshold = " << fmt(loop.equilibrium_threshold) << "\n";
  os << "nodes_per_interval = " << loop.nodes_per_interval << "\n";
  os << "measurement_noise = " << fmt(loop.measurement_noise) << "\n";
  os << "noise_seed = " << loop.noise_seed << "\n";

  const IntegratorConfig& icfg = loop.integrator;
  os << "\n[integrator]\n";
  os << "abs_tol = " << fmt(icfg.abs_tol) << "\n";
  os << "rel_tol = " << fmt(icfg.rel_tol) << "\n";
  os << "spatial_accuracy = " << fmt(icfg.spatial_accuracy) << "\n";
  os << "initial_step = " << fmt(icfg.initial_step) << "\n";
  os << "min_step = " << fmt(icfg.min_step) << "\n";
  os << "max_steps = " << icfg.max_steps << "\n";
  os << "output_dt = " << fmt(icfg.output_dt) << "\n";

  const OptimizerConfig& ocfg = loop.optimizer;
  os << "\n[optimizer]\n";
  os << "method = \"" << (ocfg.method == SearchMethod::grid ? "grid" : "nelder-mead") << "\"\n";
  os << "max_evals = " << ocfg.max_evals << "\n";
  os << "simplex_spread = " << fmt(ocfg.simplex_spread) << "\n";
  os << "j_tol = " << fmt(ocfg.j_tol) << "\n";
  os << "c_min = " << fmt(ocfg.c_min) << "\n";
  os << "c_max = " << fmt(ocfg.c_max) << "\n";
  os << "grid_c_lo = " << fmt(ocfg.grid.c_lo) << "\n";
  os << "grid_c_hi = " << fmt(ocfg.grid.c_hi) << "\n";
  os << "grid_c = " << ocfg.grid.c_count << "\n";
  os << "grid_T_lo = " << fmt(ocfg.grid.T_lo) << "\n";
  os << "grid_T_hi = " << fmt(ocfg.grid.T_hi) << "\n";
  os << "grid_T = " << ocfg.grid.T_count << "\n";
  return os.str();
}

const std::string& paper_example_toml() {
  static const std::string text = R"(# 2-d polynomial benchmark under the receding-horizon funnel controller
label = "paper-example"
seed = 0

model = "paper-example"
y0 = [3.0, -3.0]
outer = "infinite"
surjection = "identity"

[cost]
q = [[1.0, 0.0], [0.0, 1.0]]
r = [[0.2, 0.0], [0.0, 0.2]]

[mpfc]
h = 0.25
n = 20          # horizon H = 5
t_end = 3.0

[integrator]
abs_tol = 1e-9
rel_tol = 1e-6
spatial_accuracy = 1e-9

[optimizer]
method = "nelder-mead"
max_evals = 200
grid_c_lo = 0.5
grid_c_hi = 20.0
grid_T_lo = 0.25
grid_T_hi = 5.0
)";
  return text;
}

} // namespace mpfc
