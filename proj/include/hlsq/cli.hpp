#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hlsq {

enum class Command { solve, trace, sections, audit, recover, equivalence };

const char* to_string(Command c);

/// Throws InvalidArgument for unknown names.
Command parse_command(const std::string& name);

struct RunConfig {
  std::string problem;  // catalog name or problem file
  Command command = Command::solve;
  std::optional<std::vector<int>> x_indices;
  std::optional<std::vector<int>> y_indices;
  std::optional<int> grid_density;  // per swept axis; per axis of the seed grid for audit
  std::optional<double> grid_lo;    // overrides the box on the swept coordinates
  std::optional<double> grid_hi;
  std::optional<double> inner_tol;
  std::optional<double> outer_tol;
  std::optional<double> x_tol;
  std::optional<int> anchor_index;
  std::optional<double> anchor_value;
  int starts = 10;
  std::uint64_t seed = 0;
  std::vector<double> levels;  // sub-level heights exported by `sections`
  std::filesystem::path output_dir = ".";
};

/// Exit codes of run().
inline constexpr int kExitOk = 0;
inline constexpr int kExitRefused = 1;
inline constexpr int kExitBadInput = 2;

/// Dispatches one command, writes its artifacts into output_dir and a summary
/// to `out`. Diagnostics go to `err`. Returns kExitOk, kExitRefused (a solver
/// precondition or convergence failure) or kExitBadInput.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses command-line flags into a RunConfig and calls run().
int run_command_line(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hlsq
