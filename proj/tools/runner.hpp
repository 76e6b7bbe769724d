#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace diffspace::cli {

/// Command-line overrides; unset fields fall back to the config, then to the
/// built-in defaults.
struct RunOptions {
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> quad_order;
  std::optional<double> tolerance;
  std::optional<std::string> out_dir;
  std::optional<int> workers;
};

inline constexpr int kExitPass = 0;
inline constexpr int kExitNumericFailure = 1;
inline constexpr int kExitConfigError = 2;

/// Runs verify, orbit-demo, flow, cohomology or report.  The text report goes
/// to `out`, diagnostics to `err`; report files are written under the output
/// directory.  Returns the exit status.
int run_command(const std::string& command, const RunOptions& options, std::ostream& out, std::ostream& err);

}  // namespace diffspace::cli
