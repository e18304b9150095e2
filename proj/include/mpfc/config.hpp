#pragma once

#include <string>

#include "mpfc/mpfc_loop.hpp"

namespace mpfc {

enum class OutputFormats { csv, report, both };

/// A fully validated run configuration: the loop config plus run metadata.
struct RunConfig {
  explicit RunConfig(MpfcConfig loop_) : loop(std::move(loop_)) {}

  MpfcConfig loop;
  std::string label = "unnamed";
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  OutputFormats formats = OutputFormats::both;
};

/// Loads and validates a TOML run config. Every violated invariant is
/// collected and reported in one ConfigError; parse errors carry
/// line/column.
RunConfig load_config(const std::string& path);

/// Same, from an in-memory document.
RunConfig load_config_text(const std::string& text);

/// Canonical TOML serialization of a config; load(emit(load(x))) is
/// idempotent.
std::string emit_config(const RunConfig& cfg);

/// The text of the shipped 2-d demo scenario (also present under configs/).
const std::string& paper_example_toml();

} // namespace mpfc
