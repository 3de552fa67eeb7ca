#include "hlsq/problem_file.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hlsq/errors.hpp"

namespace hlsq {

namespace {

using nlohmann::json;

[[noreturn]] void field_error(const std::string& field, const std::string& message) {
  throw InvalidArgument("problem file: field '" + field + "': " + message);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) field_error(path, "missing");
  return obj.at(key);
}

int as_int(const json& v, const std::string& field) {
  if (!v.is_number_integer()) field_error(field, "expected an integer");
  return v.get<int>();
}

double as_number(const json& v, const std::string& field) {
  if (!v.is_number()) field_error(field, "expected a number");
  return v.get<double>();
}

std::vector<int> as_index_list(const json& v, const std::string& field) {
  if (!v.is_array()) field_error(field, "expected an integer array");
  std::vector<int> out;
  for (std::size_t k = 0; k < v.size(); ++k) out.push_back(as_int(v[k], field + "[" + std::to_string(k) + "]"));
  return out;
}

BasisTerm parse_term(const json& v, const std::string& field, int nonlinear_dim) {
  if (!v.is_object()) field_error(field, "expected a basis term object");
  const json& type = require(v, "type", field + ".type");
  if (!type.is_string()) field_error(field + ".type", "expected a string");
  const auto name = type.get<std::string>();
  BasisTerm term;
  if (name == "constant") {
    term.kind = BasisTerm::Kind::constant;
  } else if (name == "polynomial") {
    term.kind = BasisTerm::Kind::polynomial;
    term.degree = as_int(require(v, "degree", field + ".degree"), field + ".degree");
    if (term.degree < 0) field_error(field + ".degree", "must be non-negative");
  } else if (name == "exponential" || name == "sine" || name == "cosine") {
    term.kind = name == "exponential" ? BasisTerm::Kind::exponential
                : name == "sine"      ? BasisTerm::Kind::sine
                                      : BasisTerm::Kind::cosine;
    term.x_index = as_int(require(v, "x_index", field + ".x_index"), field + ".x_index");
    if (term.x_index < 0 || term.x_index >= nonlinear_dim) {
      field_error(field + ".x_index", "must name a nonlinear parameter in 0.." +
                                          std::to_string(nonlinear_dim - 1));
    }
  } else {
    field_error(field + ".type", "unknown basis type '" + name + "'");
  }
  if (v.contains("scale")) term.scale = as_number(v.at("scale"), field + ".scale");
  return term;
}

std::size_t line_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

}  // namespace

std::vector<Sample> parse_data_csv(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  std::vector<Sample> samples;
  auto strip = [](std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
    return s;
  };
  auto parse = [&](const std::string& s, double& out) {
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
  };
  while (std::getline(in, line)) {
    ++lineno;
    line = strip(line);
    if (lineno == 1) {
      if (line != "t,d") {
        throw InvalidArgument(source + ":1: expected header 't,d', got '" + line + "'");
      }
      continue;
    }
    if (line.empty()) continue;
    const auto comma = line.find(',');
    Sample s;
    if (comma == std::string::npos || !parse(line.substr(0, comma), s.t) ||
        !parse(line.substr(comma + 1), s.d)) {
      throw InvalidArgument(source + ":" + std::to_string(lineno) + ": expected two numbers 't,d'");
    }
    samples.push_back(s);
  }
  if (lineno == 0) throw InvalidArgument(source + ": empty data file");
  return samples;
}

std::vector<Sample> load_data_csv(const std::filesystem::path& path) {
  return parse_data_csv(read_text(path), path.string());
}

ProblemDefinition parse_problem(const std::string& text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument("problem file: syntax error at line " + std::to_string(line_of(text, e.byte)) +
                          ": " + e.what());
  }
  if (!doc.is_object()) throw InvalidArgument("problem file: top level must be an object");

  const int dimension = as_int(require(doc, "dimension", "dimension"), "dimension");
  if (dimension < 2) field_error("dimension", "must be at least 2");

  DomainBox box = DomainBox::uniform(dimension);
  if (doc.contains("domain_box")) {
    const json& b = doc.at("domain_box");
    if (!b.is_array() || static_cast<int>(b.size()) != dimension) {
      field_error("domain_box", "expected " + std::to_string(dimension) + " [lo, hi] pairs");
    }
    std::vector<Interval> bounds;
    for (std::size_t i = 0; i < b.size(); ++i) {
      const std::string f = "domain_box[" + std::to_string(i) + "]";
      if (!b[i].is_array() || b[i].size() != 2) field_error(f, "expected [lo, hi]");
      const Interval iv{as_number(b[i][0], f), as_number(b[i][1], f)};
      if (!(iv.lo < iv.hi)) field_error(f, "lo must be below hi");
      bounds.push_back(iv);
    }
    box = DomainBox(std::move(bounds));
  }

  const json& model = require(doc, "model", "model");
  const json& kind_v = require(model, "kind", "model.kind");
  if (!kind_v.is_string()) field_error("model.kind", "expected a string");
  const auto kind = kind_v.get<std::string>();

  ProblemDefinition def{"", MeritFunction::general(2, [](const Vector&) { return 0.0; }, DomainBox::uniform(2)),
                        std::nullopt};
  if (kind == "catalog") {
    const json& name = require(model, "name", "model.name");
    if (!name.is_string()) field_error("model.name", "expected a string");
    const ProblemCatalogEntry* entry = nullptr;
    try {
      entry = &catalog_entry(name.get<std::string>());
    } catch (const InvalidArgument& e) {
      field_error("model.name", e.what());
    }
    if (entry->merit.dimension() != dimension) {
      field_error("dimension", "catalog problem " + entry->name + " has dimension " +
                                   std::to_string(entry->merit.dimension()));
    }
    def.name = entry->name;
    def.merit = doc.contains("domain_box") ? entry->merit.with_box(box) : entry->merit;
  } else if (kind == "partially_linear") {
    const json& basis = require(model, "basis", "model.basis");
    if (!basis.is_array() || basis.empty()) field_error("model.basis", "expected a non-empty array");
    const int linear = static_cast<int>(basis.size());
    const int nonlinear = dimension - linear;
    if (nonlinear < 1) {
      field_error("model.basis", "leaves no nonlinear parameter (dimension " + std::to_string(dimension) +
                                     ", " + std::to_string(linear) + " basis terms)");
    }
    PartiallyLinearModel m;
    m.nonlinear_dim = nonlinear;
    for (std::size_t j = 0; j < basis.size(); ++j) {
      m.basis.push_back(parse_term(basis[j], "model.basis[" + std::to_string(j) + "]", nonlinear).to_map());
    }
    if (model.contains("offset") && !model.at("offset").is_null()) {
      const json& off = model.at("offset");
      std::vector<BasisMap> terms;
      if (off.is_array()) {
        for (std::size_t j = 0; j < off.size(); ++j) {
          terms.push_back(parse_term(off[j], "model.offset[" + std::to_string(j) + "]", nonlinear).to_map());
        }
      } else {
        terms.push_back(parse_term(off, "model.offset", nonlinear).to_map());
      }
      m.offset = [terms](double t, const Vector& x) {
        double v = 0.0;
        for (const auto& term : terms) v += term(t, x);
        return v;
      };
    }
    const json& data = require(doc, "data_file", "data_file");
    if (!data.is_string()) field_error("data_file", "expected a path string");
    std::filesystem::path data_path = data.get<std::string>();
    if (data_path.is_relative()) data_path = base_dir / data_path;
    m.samples = load_data_csv(data_path);
    if (static_cast<int>(m.samples.size()) < linear) {
      field_error("data_file", "has " + std::to_string(m.samples.size()) + " samples, fewer than the " +
                                   std::to_string(linear) + " basis terms");
    }
    def.name = "partially_linear";
    def.merit = build_partially_linear(std::move(m), box);
  } else {
    field_error("model.kind", "expected 'catalog' or 'partially_linear', got '" + kind + "'");
  }

  if (doc.contains("split")) {
    const json& split = doc.at("split");
    const auto x = as_index_list(require(split, "x_indices", "split.x_indices"), "split.x_indices");
    const auto y = as_index_list(require(split, "y_indices", "split.y_indices"), "split.y_indices");
    try {
      def.split = ParameterSplit(x, y);
    } catch (const InvalidArgument& e) {
      field_error("split", e.what());
    }
    if (def.split->dimension() != dimension) field_error("split", "does not cover the dimension");
  }
  return def;
}

ProblemDefinition load_problem_file(const std::filesystem::path& path) {
  return parse_problem(read_text(path), path.parent_path());
}

ProblemDefinition resolve_problem(const std::string& name_or_path) {
  for (const auto& e : catalog()) {
    if (e.name == name_or_path) return {e.name, e.merit, std::nullopt};
  }
  if (!std::filesystem::exists(name_or_path)) {
    throw InvalidArgument("'" + name_or_path + "' is neither a catalog problem nor an existing file");
  }
  return load_problem_file(name_or_path);
}

}  // namespace hlsq
