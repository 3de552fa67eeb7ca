#include "hlsq/cli.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "hlsq/errors.hpp"
#include "hlsq/format.hpp"
#include "hlsq/hierarchical.hpp"
#include "hlsq/minimal_section.hpp"
#include "hlsq/morse.hpp"
#include "hlsq/problem_file.hpp"
#include "hlsq/report.hpp"

namespace hlsq {

namespace {

constexpr int kDefaultSweepDensity = 21;
constexpr int kDefaultAuditDensity = 9;

std::string vec(const Vector& v) { return "(" + format_vector(v, ", ") + ")"; }

ParameterSplit choose_split(const RunConfig& c, const ProblemDefinition& def) {
  const int m = def.merit.dimension();
  if (c.x_indices && c.y_indices) return ParameterSplit(*c.x_indices, *c.y_indices);
  if (c.x_indices) return ParameterSplit::from_x(*c.x_indices, m);
  if (c.y_indices) {
    std::vector<int> x;
    for (int i = 0; i < m; ++i) {
      if (std::find(c.y_indices->begin(), c.y_indices->end(), i) == c.y_indices->end()) x.push_back(i);
    }
    return ParameterSplit(std::move(x), *c.y_indices);
  }
  if (def.split) return *def.split;
  if (auto natural = def.merit.natural_split()) return *natural;
  return ParameterSplit::single(0, m);
}

// Box with the grid-bounds override applied to `coords`.
DomainBox swept_box(const RunConfig& c, const DomainBox& box, const std::vector<int>& coords) {
  if (!c.grid_lo && !c.grid_hi) return box;
  std::vector<Interval> bounds = box.bounds();
  for (int i : coords) {
    auto& b = bounds[static_cast<std::size_t>(i)];
    if (c.grid_lo) b.lo = *c.grid_lo;
    if (c.grid_hi) b.hi = *c.grid_hi;
  }
  return DomainBox(std::move(bounds));
}

std::vector<int> all_coordinates(int m) {
  std::vector<int> v(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) v[static_cast<std::size_t>(i)] = i;
  return v;
}

int density_or(const RunConfig& c, int fallback) {
  const int d = c.grid_density.value_or(fallback);
  if (d < 3) throw InvalidArgument("--grid-density must be at least 3");
  return d;
}

std::vector<Vector> tensor_grid(const DomainBox& box, const std::vector<int>& coords, int density) {
  const std::size_t n = coords.size();
  std::vector<std::vector<double>> axes;
  for (int i : coords) axes.push_back(uniform_grid(box[i].lo, box[i].hi, density));
  std::vector<Vector> grid;
  std::vector<int> counter(n, 0);
  while (true) {
    Vector x(static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) x[static_cast<Eigen::Index>(k)] = axes[k][static_cast<std::size_t>(counter[k])];
    grid.push_back(std::move(x));
    // Last coordinate varies slowest, so a 1D grid stays in increasing order.
    std::size_t a = 0;
    while (a < n && ++counter[a] == density) counter[a++] = 0;
    if (a == n) break;
  }
  return grid;
}

void emit(const RunConfig& c, const std::string& stem, const Rendered& r) {
  write_atomic(c.output_dir / (stem + ".txt"), r.text);
  write_atomic(c.output_dir / (stem + ".json"), r.json);
}

HierarchicalOptions hierarchical_options(const RunConfig& c, int density) {
  HierarchicalOptions o;
  o.tolerances.inner_tol = c.inner_tol;
  if (c.outer_tol) o.tolerances.outer_tol = *c.outer_tol;
  o.tolerances.x_tol = c.x_tol;
  o.grid_density = density;
  return o;
}

void check_tolerances(const RunConfig& c) {
  for (const auto& [name, v] : {std::pair{"--inner-tol", c.inner_tol}, std::pair{"--outer-tol", c.outer_tol},
                                std::pair{"--x-tol", c.x_tol}}) {
    if (v && !(*v > 0.0)) throw InvalidArgument(std::string(name) + " must be positive");
  }
  if (c.grid_lo && c.grid_hi && !(*c.grid_lo < *c.grid_hi)) {
    throw InvalidArgument("--grid-lo must be below --grid-hi");
  }
  if (c.command == Command::recover && (!c.anchor_index || !c.anchor_value)) {
    throw InvalidArgument("recover requires --anchor-index and --anchor-value");
  }
  if (c.command == Command::equivalence && c.starts < 1) throw InvalidArgument("--starts must be positive");
}

int dispatch(const RunConfig& c, std::ostream& out, std::ostream& err) {
  check_tolerances(c);
  if (c.problem.empty()) throw InvalidArgument("--problem is required");
  const ProblemDefinition def = resolve_problem(c.problem);
  const int m = def.merit.dimension();
  if (!std::filesystem::is_directory(c.output_dir)) {
    std::error_code ec;
    std::filesystem::create_directories(c.output_dir, ec);
    if (ec) throw InvalidArgument("cannot create output directory '" + c.output_dir.string() + "'");
  }

  switch (c.command) {
    case Command::solve: {
      const ParameterSplit split = choose_split(c, def);
      const MeritFunction merit = def.merit.with_box(swept_box(c, def.merit.box(), split.x_indices()));
      const SolveReport report =
          solve_hierarchical(merit, split, hierarchical_options(c, density_or(c, kDefaultSweepDensity)));
      emit(c, "report", render_solve(def.name, report));
      out << "minimizer " << vec(report.minimizer) << " value " << format_double(report.value) << "\n";
      return kExitOk;
    }
    case Command::trace: {
      const ParameterSplit split = choose_split(c, def);
      const DomainBox box = swept_box(c, def.merit.box(), split.x_indices());
      const MeritFunction merit = def.merit.with_box(box);
      const auto grid = tensor_grid(box.restrict_to(split.x_indices()), all_coordinates(split.n()),
                                    density_or(c, kDefaultSweepDensity));
      TraceOptions opts;
      opts.inner_tol = c.inner_tol;
      const ImplicitTrace trace = trace_implicit(merit, split, grid, opts);
      write_atomic(c.output_dir / "trace.csv", trace_csv(trace));
      out << "traced " << trace.x_samples.size() << " points\n";
      return kExitOk;
    }
    case Command::sections: {
      const std::vector<int> indices = c.x_indices ? *c.x_indices : all_coordinates(m);
      for (int i : indices) {
        if (i < 0 || i >= m) throw InvalidArgument("section index out of range: " + std::to_string(i));
        const DomainBox box = swept_box(c, def.merit.box(), {i});
        const MeritFunction merit = def.merit.with_box(box);
        TraceOptions opts;
        opts.inner_tol = c.inner_tol;
        const auto section =
            minimal_section_1d(merit, i, uniform_grid(box[i].lo, box[i].hi, density_or(c, kDefaultSweepDensity)), opts);
        std::vector<SubLevelInterval> intervals;
        for (double z : c.levels) {
          try {
            intervals.push_back(sublevel_interval(section, z));
          } catch (const InvalidArgument& e) {
            err << "section " << i << ": no sub-level interval at z=" << format_double(z) << ": " << e.what() << "\n";
          }
        }
        write_atomic(c.output_dir / ("section_" + std::to_string(i) + ".csv"), section_csv(section, intervals));
        out << "section " << i << ":";
        for (const auto& mn : section.local_minima) {
          out << " min x=" << format_double(mn.x) << " F=" << format_double(mn.value) << (mn.plateau ? " (plateau)" : "");
        }
        out << "\n";
      }
      return kExitOk;
    }
    case Command::audit: {
      const int density = density_or(c, kDefaultAuditDensity);
      const DomainBox box = swept_box(c, def.merit.box(), all_coordinates(m));
      const auto search = find_critical_points(def.merit, box, density);
      const auto outward = check_outward_gradient(def.merit, box, density);
      MorseCensus census;
      try {
        census = morse_equality_audit(search.points, outward.outward);
      } catch (const DegeneracyError&) {
        MorseCensus refused;
        refused.boundary_outward = outward.outward;
        refused.diagnosis = "refused: degenerate critical points";
        emit(c, "census", render_census(def.name, box, search, outward, refused));
        throw;
      }
      emit(c, "census", render_census(def.name, box, search, outward, census));
      out << "census";
      for (const auto& [k, n] : census.counts) out << " " << k << ":" << n;
      out << " alternating_sum " << census.alternating_sum << " " << (census.pass ? "pass" : "fail") << "\n";
      return kExitOk;
    }
    case Command::recover: {
      const int i = *c.anchor_index;
      if (i < 0 || i >= m) throw InvalidArgument("--anchor-index out of range");
      if (!def.merit.box()[i].contains(*c.anchor_value)) throw InvalidArgument("--anchor-value outside the box");
      TraceOptions opts;
      opts.inner_tol = c.inner_tol;
      const auto rec = recover_from_anchor(def.merit, i, *c.anchor_value, opts);
      emit(c, "recovery", render_recovery(def.name, rec));
      out << "recovered " << vec(rec.recovered) << " value " << format_double(rec.value) << "\n";
      return kExitOk;
    }
    case Command::equivalence: {
      const ParameterSplit split = choose_split(c, def);
      const MeritFunction merit = def.merit.with_box(swept_box(c, def.merit.box(), split.x_indices()));
      const auto starts = random_starts(merit.box(), c.starts, c.seed);
      const auto report =
          equivalence_report(merit, split, starts, hierarchical_options(c, density_or(c, kDefaultSweepDensity)));
      emit(c, "equivalence", render_equivalence(def.name, report));
      out << "converged " << report.converged << "/" << starts.size() << " max_distance "
          << format_double(report.max_distance) << " max_value_gap " << format_double(report.max_value_gap) << "\n";
      return kExitOk;
    }
  }
  return kExitBadInput;
}

}  // namespace

const char* to_string(Command c) {
  switch (c) {
    case Command::solve: return "solve";
    case Command::trace: return "trace";
    case Command::sections: return "sections";
    case Command::audit: return "audit";
    case Command::recover: return "recover";
    case Command::equivalence: return "equivalence";
  }
  return "unknown";
}

Command parse_command(const std::string& name) {
  for (Command c : {Command::solve, Command::trace, Command::sections, Command::audit, Command::recover,
                    Command::equivalence}) {
    if (name == to_string(c)) return c;
  }
  throw InvalidArgument("unknown command '" + name +
                        "' (expected solve, trace, sections, audit, recover or equivalence)");
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(config, out, err);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const ConvexityViolation& e) {
    err << "refused: " << e.what() << "\n"
        << "witness: " << vec(e.witness()) << " min eigenvalue " << format_double(e.min_eigenvalue()) << "\n";
    return kExitRefused;
  } catch (const ConvergenceError& e) {
    err << "refused: " << e.what() << "\n"
        << "best iterate: " << vec(e.best_iterate()) << " gradient norm " << format_double(e.gradient_norm())
        << "\n";
    return kExitRefused;
  } catch (const TraceError& e) {
    err << "refused: " << e.what() << "\n" << "failing x: " << vec(e.failing_x()) << "\n";
    return kExitRefused;
  } catch (const Error& e) {
    err << "refused: " << e.what() << "\n";
    return kExitRefused;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
}

int run_command_line(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hierarchical least-squares toolkit"};
  RunConfig c;
  std::string command;
  std::vector<int> x_indices, y_indices;
  int grid_density = 0, anchor_index = 0;
  double grid_lo = 0, grid_hi = 0, inner_tol = 0, outer_tol = 0, x_tol = 0, anchor_value = 0;
  std::string out_dir = ".";

  app.add_option("--problem", c.problem, "Catalog name or problem file")->required();
  app.add_option("--command", command, "solve | trace | sections | audit | recover | equivalence")->required();
  auto* xo = app.add_option("--x-indices", x_indices, "Outer coordinates (comma separated)")->delimiter(',');
  auto* yo = app.add_option("--y-indices", y_indices, "Eliminated coordinates (comma separated)")->delimiter(',');
  auto* go = app.add_option("--grid-density", grid_density, "Grid nodes per axis");
  auto* glo = app.add_option("--grid-lo", grid_lo, "Lower bound of the swept coordinates");
  auto* ghi = app.add_option("--grid-hi", grid_hi, "Upper bound of the swept coordinates");
  auto* io = app.add_option("--inner-tol", inner_tol, "Slice gradient tolerance");
  auto* oo = app.add_option("--outer-tol", outer_tol, "Gradient tolerance at the minimizer");
  auto* xt = app.add_option("--x-tol", x_tol, "Outer step tolerance");
  auto* ai = app.add_option("--anchor-index", anchor_index, "Anchored coordinate for recover");
  auto* av = app.add_option("--anchor-value", anchor_value, "Anchor value for recover");
  app.add_option("--starts", c.starts, "Random direct starts for equivalence");
  app.add_option("--seed", c.seed, "Seed for random starts");
  app.add_option("--levels", c.levels, "Sub-level heights for sections (comma separated)")->delimiter(',');
  app.add_option("--out", out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  try {
    c.command = parse_command(command);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  if (*xo) c.x_indices = x_indices;
  if (*yo) c.y_indices = y_indices;
  if (*go) c.grid_density = grid_density;
  if (*glo) c.grid_lo = grid_lo;
  if (*ghi) c.grid_hi = grid_hi;
  if (*io) c.inner_tol = inner_tol;
  if (*oo) c.outer_tol = outer_tol;
  if (*xt) c.x_tol = x_tol;
  if (*ai) c.anchor_index = anchor_index;
  if (*av) c.anchor_value = anchor_value;
  c.output_dir = out_dir;
  return run(c, out, err);
}

}  // namespace hlsq
