#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hlsq/hierarchical.hpp"
#include "hlsq/minimal_section.hpp"
#include "hlsq/morse.hpp"

namespace hlsq {

/// Writes to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// A text rendering for people and a JSON rendering with the same fields.
struct Rendered {
  std::string text;
  std::string json;
};

Rendered render_solve(const std::string& problem, const SolveReport& report);

Rendered render_census(const std::string& problem, const DomainBox& box, const CriticalPointSearch& search,
                       const OutwardCheck& outward, const MorseCensus& census);

Rendered render_recovery(const std::string& problem, const RegularizationRecovery& recovery);

Rendered render_equivalence(const std::string& problem, const EquivalenceReport& report);

/// Columns x_<i>..., g_<j>..., F, residual, y_index.
std::string trace_csv(const ImplicitTrace& trace);

/// Header `x_<i>,F,comp_0,...,comp_{M-2},residual`, one row per grid node,
/// then `# sublevel z=<z> lo=<lo> hi=<hi>` lines.
std::string section_csv(const MinimalSection1D& section, const std::vector<SubLevelInterval>& intervals);

}  // namespace hlsq
