#include "hlsq/report.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hlsq/errors.hpp"
#include "hlsq/format.hpp"

namespace hlsq {

namespace {

using nlohmann::json;

json to_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json to_json(const ConvexityCertificate& c) {
  json j;
  if (c.split) {
    j["x_indices"] = c.split->x_indices();
    j["y_indices"] = c.split->y_indices();
  }
  j["grid_density"] = c.grid_density;
  j["sampled_points"] = c.sampled_points;
  j["min_eig_over_samples"] = c.min_eig_over_samples;
  j["positive"] = c.positive();
  if (c.witness) {
    j["witness"] = to_json(*c.witness);
    j["witness_eig"] = c.witness_eig;
  }
  return j;
}

json to_json(const SolveReport& r) {
  json j;
  j["method"] = to_string(r.method);
  j["minimizer"] = to_json(r.minimizer);
  j["value"] = r.value;
  j["gradient_norm"] = r.gradient_norm;
  j["iterations"] = r.iterations;
  j["inner_solves"] = r.inner_solves;
  j["outer_evaluations"] = r.outer_evaluations;
  j["outer_evaluations_by_coordinate"] = r.outer_evaluations_by_coordinate;
  if (r.split) {
    j["x_indices"] = r.split->x_indices();
    j["y_indices"] = r.split->y_indices();
  }
  if (r.convexity) j["convexity"] = to_json(*r.convexity);
  json brackets = json::array();
  for (const auto& b : r.brackets) {
    brackets.push_back({{"a", b.a}, {"b", b.b}, {"c", b.c}, {"fa", b.fa}, {"fb", b.fb}, {"fc", b.fc}});
  }
  j["brackets"] = brackets;
  return j;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string vec(const Vector& v) { return "(" + format_vector(v, ", ") + ")"; }

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

void write_solve_text(std::ostream& os, const SolveReport& r) {
  const auto d = format_double;
  os << "method: " << to_string(r.method) << "\n";
  if (r.split) os << "split: x={" << join(r.split->x_indices()) << "} y={" << join(r.split->y_indices()) << "}\n";
  os << "minimizer: " << vec(r.minimizer) << "\n";
  os << "value: " << d(r.value) << "\n";
  os << "gradient_norm: " << d(r.gradient_norm) << "\n";
  os << "iterations: " << r.iterations << "\n";
  os << "inner_solves: " << r.inner_solves << "\n";
  os << "outer_evaluations: " << r.outer_evaluations << "\n";
  os << "outer_evaluations_by_coordinate: " << join(r.outer_evaluations_by_coordinate) << "\n";
  if (r.convexity) {
    const auto& c = *r.convexity;
    os << "convexity: " << (c.positive() ? "positive" : "violated") << " (density " << c.grid_density << ", "
       << c.sampled_points << " samples, min eigenvalue " << d(c.min_eig_over_samples) << ")\n";
  }
  for (const auto& b : r.brackets) {
    os << "bracket: a=" << d(b.a) << " b=" << d(b.b) << " c=" << d(b.c) << " fa=" << d(b.fa) << " fb=" << d(b.fb)
       << " fc=" << d(b.fc) << "\n";
  }
}

}  // namespace

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw InvalidArgument("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw InvalidArgument("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
  }
}

Rendered render_solve(const std::string& problem, const SolveReport& report) {
  std::ostringstream os;
  os << "problem: " << problem << "\n";
  write_solve_text(os, report);
  json j = to_json(report);
  j["problem"] = problem;
  return {os.str(), dump(j)};
}

Rendered render_census(const std::string& problem, const DomainBox& box, const CriticalPointSearch& search,
                       const OutwardCheck& outward, const MorseCensus& census) {
  const auto d = format_double;
  std::ostringstream os;
  os << "problem: " << problem << "\n";
  os << "box: " << vec(box.lower()) << " .. " << vec(box.upper()) << "\n";
  os << "seeds: " << search.seeds << " (dropped " << search.dropped << ")\n";
  os << "critical_tol: " << d(search.critical_tol) << "\n";
  os << "critical points: " << search.points.size() << "\n";
  json points = json::array();
  for (const auto& p : search.points) {
    os << "  " << vec(p.location) << " value=" << d(p.value) << " index=" << p.index_gamma
       << " degenerate=" << (p.degenerate ? "yes" : "no") << " grad_norm=" << d(p.grad_norm) << "\n";
    points.push_back({{"location", to_json(p.location)},
                      {"value", p.value},
                      {"index", p.index_gamma},
                      {"degenerate", p.degenerate},
                      {"grad_norm", p.grad_norm},
                      {"eigenvalues", to_json(p.eigen.eigenvalues)}});
  }
  os << "boundary_outward: " << (outward.outward ? "yes" : "no") << " (" << outward.sampled << " samples)\n";
  if (outward.violation) os << "boundary_violation: " << vec(*outward.violation) << "\n";
  json counts = json::object();
  os << "counts:";
  for (const auto& [k, c] : census.counts) {
    os << " " << k << ":" << c;
    counts[std::to_string(k)] = c;
  }
  os << "\nalternating_sum: " << census.alternating_sum << "\n";
  os << "verdict: " << (census.pass ? "pass" : "fail") << "\n";
  os << "diagnosis: " << census.diagnosis << "\n";

  json j;
  j["problem"] = problem;
  j["box_lower"] = to_json(box.lower());
  j["box_upper"] = to_json(box.upper());
  j["seeds"] = search.seeds;
  j["dropped"] = search.dropped;
  j["critical_tol"] = search.critical_tol;
  j["points"] = points;
  j["boundary_outward"] = outward.outward;
  j["boundary_samples"] = outward.sampled;
  if (outward.violation) j["boundary_violation"] = to_json(*outward.violation);
  j["counts"] = counts;
  j["alternating_sum"] = census.alternating_sum;
  j["pass"] = census.pass;
  j["diagnosis"] = census.diagnosis;
  return {os.str(), dump(j)};
}

Rendered render_recovery(const std::string& problem, const RegularizationRecovery& r) {
  const auto d = format_double;
  std::ostringstream os;
  os << "problem: " << problem << "\n";
  os << "anchor_index: " << r.anchor_index << "\n";
  os << "anchor_value: " << d(r.anchor_value) << "\n";
  os << "recovered: " << vec(r.recovered) << "\n";
  os << "value: " << d(r.value) << "\n";
  os << "section_residual: " << d(r.section_residual) << "\n";
  os << "inner_tol: " << d(r.inner_tol) << "\n";
  json j{{"problem", problem},
         {"anchor_index", r.anchor_index},
         {"anchor_value", r.anchor_value},
         {"recovered", to_json(r.recovered)},
         {"value", r.value},
         {"section_residual", r.section_residual},
         {"inner_tol", r.inner_tol}};
  return {os.str(), dump(j)};
}

Rendered render_equivalence(const std::string& problem, const EquivalenceReport& r) {
  const auto d = format_double;
  std::ostringstream os;
  os << "problem: " << problem << "\n";
  os << "[hierarchical]\n";
  write_solve_text(os, r.hierarchical);
  os << "candidates: " << r.candidates.size() << "\n";
  for (const auto& c : r.candidates) os << "  " << vec(c) << "\n";
  os << "[direct]\n";
  json direct = json::array();
  for (const auto& o : r.direct) {
    json e{{"start", to_json(o.start)}};
    os << "start " << vec(o.start) << ": ";
    if (o.report) {
      os << "minimizer " << vec(o.report->minimizer) << " value " << d(o.report->value) << " distance "
         << d(o.distance) << " value_gap " << d(o.value_gap) << "\n";
      e["minimizer"] = to_json(o.report->minimizer);
      e["value"] = o.report->value;
      e["iterations"] = o.report->iterations;
      e["distance"] = o.distance;
      e["value_gap"] = o.value_gap;
    } else {
      os << "not converged: " << o.error << "\n";
      e["error"] = o.error;
    }
    direct.push_back(e);
  }
  os << "converged: " << r.converged << "/" << r.direct.size() << "\n";
  os << "max_distance: " << d(r.max_distance) << "\n";
  os << "max_value_gap: " << d(r.max_value_gap) << "\n";

  json candidates = json::array();
  for (const auto& c : r.candidates) candidates.push_back(to_json(c));
  json j{{"problem", problem},
         {"hierarchical", to_json(r.hierarchical)},
         {"candidates", candidates},
         {"direct", direct},
         {"converged", r.converged},
         {"max_distance", r.max_distance},
         {"max_value_gap", r.max_value_gap}};
  return {os.str(), dump(j)};
}

std::string trace_csv(const ImplicitTrace& trace) {
  std::ostringstream os;
  const auto& split = trace.split;
  for (int i : split.x_indices()) os << "x_" << i << ",";
  for (int i : split.y_indices()) os << "g_" << i << ",";
  os << "F,residual,y_index\n";
  for (std::size_t k = 0; k < trace.x_samples.size(); ++k) {
    os << format_vector(trace.x_samples[k]) << "," << format_vector(trace.g_values[k]) << ","
       << format_double(trace.values[k]) << "," << format_double(trace.residual_norms[k]) << ","
       << trace.y_index_along_trace[k] << "\n";
  }
  return os.str();
}

std::string section_csv(const MinimalSection1D& section, const std::vector<SubLevelInterval>& intervals) {
  std::ostringstream os;
  os << "x_" << section.parameter_index << ",F";
  const Eigen::Index comps = section.companions.empty() ? 0 : section.companions.front().size();
  for (Eigen::Index c = 0; c < comps; ++c) os << ",comp_" << c;
  os << ",residual\n";
  for (std::size_t k = 0; k < section.grid.size(); ++k) {
    os << format_double(section.grid[k]) << "," << format_double(section.values[k]) << ","
       << format_vector(section.companions[k]) << "," << format_double(section.residuals[k]) << "\n";
  }
  for (const auto& iv : intervals) {
    os << "# sublevel z=" << format_double(iv.level_z) << " lo=" << format_double(iv.lo)
       << " hi=" << format_double(iv.hi) << "\n";
  }
  return os.str();
}

}  // namespace hlsq
