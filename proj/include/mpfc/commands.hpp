#pragma once

#include <optional>
#include <string>

#include "mpfc/config.hpp"
#include "mpfc/csv.hpp"

namespace mpfc {

// Exit statuses shared by the CLI: 0 all audits pass, 1 an audit failed,
// 2 a run or I/O error aborted the command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitAuditFailed = 1;
inline constexpr int kExitError = 2;

/// Renders the three audit reports (and an overall line) exactly the same
/// way for online and offline audits.
std::string format_audit_reports(const AuditReport& containment, const AuditReport& descent,
                                 const AuditReport& bounds);

/// Runs the scenario, writes trajectory.csv / steps.csv / audit.txt into
/// cfg.out_dir per cfg.formats, prints the audit summary, and returns the
/// exit status.
int cmd_simulate(const RunConfig& cfg);

/// Evaluates the first step's (c, T) landscape on the configured lattice
/// and writes landscape.csv. With `check`, compares against a golden file
/// at 1e-6 relative tolerance on J instead of overwriting it.
int cmd_oracle(const RunConfig& cfg, std::optional<GridSpec> grid_override,
               const std::optional<std::string>& check, const std::string& out_dir);

/// Offline re-audit of previously emitted files. The outer funnel is taken
/// from `config` when given (needed to reproduce finite-psi containment
/// verdicts); otherwise it is treated as infinite.
int cmd_audit(const std::string& trajectory_path, const std::string& steps_path,
              const std::optional<RunConfig>& config, const std::string& out_dir);

} // namespace mpfc
