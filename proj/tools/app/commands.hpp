#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "run_config.hpp"

namespace conekit::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

const std::vector<std::string>& command_names();

struct RunContext {
  std::filesystem::path out_base = "runs";
  /// Overrides the wall-clock timestamp (YYYYmmdd-HHMMSS) when non-empty.
  std::string timestamp;
  std::ostream* log = nullptr;  // human-readable tables; null for silence
};

struct DispatchResult {
  int exit_code = kExitOk;
  std::filesystem::path run_dir;
  std::string status;
};

using Summary = std::vector<std::pair<std::string, std::string>>;

/// Runs `cmd` and writes its artifacts into a fresh run directory
/// out_base/<timestamp>-<cmd>[-n]. Numerical aborts map to exit 3.
DispatchResult dispatch(const std::string& cmd, const RunConfig& cfg, const RunContext& ctx);

std::filesystem::path make_run_dir(const std::filesystem::path& base, const std::string& cmd,
                                   const std::string& timestamp);
std::string current_timestamp();

/// INI manifest: [run] (command, version, timestamp, warnings), the config
/// sections in fixed order, then [summary].
void write_manifest(const std::filesystem::path& dir, const std::string& cmd, const RunConfig& cfg,
                    const std::string& timestamp, const Summary& summary);

/// Seeded smooth analytic field used by the `norms` command so that mesh
/// refinement sees the same function.
Field smooth_test_field(geometry::MeshPtr mesh, int max_mode, std::uint64_t seed, double amplitude);

}  // namespace conekit::app
