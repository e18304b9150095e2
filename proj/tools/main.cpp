#include <CLI11.hpp>

#include <cstdio>
#include <optional>
#include <string>

#include "mpfc/commands.hpp"
#include "mpfc/log.hpp"

namespace {

// "--grid CxT", e.g. "30x30"
std::optional<mpfc::GridSpec> parse_grid_flag(const std::string& flag, const mpfc::GridSpec& base) {
  if (flag.empty()) return std::nullopt;
  mpfc::GridSpec grid = base;
  auto x = flag.find('x');
  if (x == std::string::npos) throw CLI::ValidationError("--grid expects CxT, e.g. 30x30");
  grid.c_count = std::stoi(flag.substr(0, x));
  grid.T_count = std::stoi(flag.substr(x + 1));
  if (grid.c_count < 1 || grid.T_count < 1)
    throw CLI::ValidationError("--grid counts must be positive");
  return grid;
}

mpfc::RunConfig load_or_die(const std::string& path, const std::string& out_override,
                            std::optional<std::uint64_t> seed_override) {
  mpfc::RunConfig cfg = mpfc::load_config(path);
  if (!out_override.empty()) cfg.out_dir = out_override;
  if (seed_override) {
    cfg.seed = *seed_override;
    cfg.loop.optimizer.seed = *seed_override;
  }
  return cfg;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"receding-horizon funnel controller: simulation, landscape export, audits"};
  app.require_subcommand(1);

  std::string config_path, out_dir, grid_flag, check_path;
  std::string trajectory_path, steps_path, audit_config_path;
  std::optional<std::uint64_t> seed;

  CLI::App* simulate = app.add_subcommand("simulate", "run a scenario and emit CSV + audit report");
  simulate->add_option("--config", config_path, "TOML run configuration")->required();
  simulate->add_option("--out", out_dir, "output directory (overrides the config)");
  simulate->add_option("--seed", seed, "optimizer seed (overrides the config)");

  CLI::App* oracle = app.add_subcommand("oracle", "grid-evaluate the first step's (c,T) landscape");
  oracle->add_option("--config", config_path, "TOML run configuration")->required();
  oracle->add_option("--grid", grid_flag, "lattice size CxT, e.g. 30x30");
  oracle->add_option("--check", check_path, "compare against a golden landscape.csv");
  oracle->add_option("--out", out_dir, "output directory");

  CLI::App* audit = app.add_subcommand("audit", "re-audit previously emitted run files");
  audit->add_option("trajectory", trajectory_path, "trajectory.csv")->required();
  audit->add_option("steps", steps_path, "steps.csv")->required();
  audit->add_option("--config", audit_config_path,
                    "run config (supplies the outer funnel for containment)");
  audit->add_option("--out", out_dir, "output directory");

  CLI::App* demo = app.add_subcommand("demo-paper", "run the shipped 2-d demo scenario");
  demo->add_option("--out", out_dir, "output directory");
  demo->add_option("--seed", seed, "optimizer seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      return mpfc::cmd_simulate(load_or_die(config_path, out_dir, seed));
    }
    if (oracle->parsed()) {
      mpfc::RunConfig cfg = load_or_die(config_path, "", std::nullopt);
      std::optional<std::string> check;
      if (!check_path.empty()) check = check_path;
      return mpfc::cmd_oracle(cfg, parse_grid_flag(grid_flag, cfg.loop.optimizer.grid), check,
                              out_dir.empty() ? cfg.out_dir : out_dir);
    }
    if (audit->parsed()) {
      std::optional<mpfc::RunConfig> cfg;
      if (!audit_config_path.empty()) cfg = mpfc::load_config(audit_config_path);
      return mpfc::cmd_audit(trajectory_path, steps_path, cfg,
                             out_dir.empty() ? "." : out_dir);
    }
    if (demo->parsed()) {
      mpfc::RunConfig cfg = mpfc::load_config_text(mpfc::paper_example_toml());
      cfg.out_dir = out_dir.empty() ? "out-paper" : out_dir;
      if (seed) {
        cfg.seed = *seed;
        cfg.loop.optimizer.seed = *seed;
      }
      return mpfc::cmd_simulate(cfg);
    }
  } catch (const std::exception& e) {
    mpfc::log::error("%s", e.what());
    return mpfc::kExitError;
  }
  return mpfc::kExitError;
}
