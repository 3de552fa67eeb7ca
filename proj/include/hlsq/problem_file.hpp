#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hlsq/problem.hpp"

namespace hlsq {

/// A problem resolved from a catalog name or a problem-definition file.
struct ProblemDefinition {
  std::string name;
  MeritFunction merit;
  std::optional<ParameterSplit> split;  // from the file, if given
};

/// Problem-definition file (JSON, UTF-8). Recognised keys:
///
///   dimension          integer M
///   split.x_indices    integer array
///   split.y_indices    integer array
///   domain_box         array of M [lo, hi] pairs; default [-10, 10]^M
///   model.kind         "catalog" | "partially_linear"
///   model.name         catalog entry (kind = catalog)
///   model.basis[]      basis terms (kind = partially_linear)
///   model.offset       a basis term or an array of terms, summed
///   data_file          CSV with header t,d, relative to the problem file
///
/// A basis term is {"type": "constant" | "polynomial" | "exponential" |
/// "sine" | "cosine", "degree": d, "x_index": i, "scale": s}.
///
/// Errors are InvalidArgument naming the line (syntax) or field (schema).
ProblemDefinition load_problem_file(const std::filesystem::path& path);

/// Parses problem-definition text; `base_dir` resolves data_file.
ProblemDefinition parse_problem(const std::string& text, const std::filesystem::path& base_dir);

/// Observation CSV: header line `t,d`, then one `t,d` pair per line.
std::vector<Sample> load_data_csv(const std::filesystem::path& path);
std::vector<Sample> parse_data_csv(const std::string& text, const std::string& source = "data");

/// Catalog name first, then a file path.
ProblemDefinition resolve_problem(const std::string& name_or_path);

}  // namespace hlsq
