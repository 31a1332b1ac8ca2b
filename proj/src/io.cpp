#include "wgq/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace wgq {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_matrix_market(std::ostream& os, const SparseMatrix& m, const std::string& comment) {
  std::size_t lower = 0;
  for (int r = 0; r < m.rows(); ++r)
    for (int c : m.row_cols(r))
      if (c <= r) ++lower;
  os << "%%MatrixMarket matrix coordinate real symmetric\n";
  if (!comment.empty()) {
    std::istringstream lines(comment);
    for (std::string line; std::getline(lines, line);) os << "% " << line << '\n';
  }
  os << m.rows() << ' ' << m.rows() << ' ' << lower << '\n';
  for (int r = 0; r < m.rows(); ++r) {
    const auto cols = m.row_cols(r);
    const auto vals = m.row_values(r);
    for (std::size_t q = 0; q < cols.size(); ++q)
      if (cols[q] <= r) os << r + 1 << ' ' << cols[q] + 1 << ' ' << format_double(vals[q]) << '\n';
  }
  if (!os) throw IoError("failed writing MatrixMarket stream");
}

SparseMatrix read_matrix_market(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("%%MatrixMarket", 0) != 0)
    throw IoError("missing MatrixMarket banner");
  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (object != "matrix" || format != "coordinate" || field != "real")
    throw IoError("only real coordinate matrices are supported");
  if (symmetry != "symmetric" && symmetry != "general") throw IoError("unsupported symmetry '" + symmetry + "'");
  while (std::getline(is, line))
    if (!line.empty() && line[0] != '%') break;
  int rows = 0, cols = 0;
  std::size_t count = 0;
  if (!(std::istringstream(line) >> rows >> cols >> count) || rows != cols)
    throw IoError("bad MatrixMarket size line");
  std::vector<SparseMatrix::Entry> entries;
  for (std::size_t k = 0; k < count; ++k) {
    int r, c;
    double v;
    if (!(is >> r >> c >> v)) throw IoError("truncated MatrixMarket data");
    entries.push_back({r - 1, c - 1, v});
    if (symmetry == "symmetric" && r != c) entries.push_back({c - 1, r - 1, v});
  }
  return SparseMatrix::from_entries(rows, std::move(entries));
}

void write_matrix_market_file(const std::string& path, const SparseMatrix& m, const std::string& comment) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path);
  write_matrix_market(os, m, comment);
}

nlohmann::json band_json(const SparseMatrix& m, const TensorSpace& space) {
  std::set<int> offsets;
  for (int r = 0; r < m.rows(); ++r)
    for (int c : m.row_cols(r))
      if (c >= r) offsets.insert(c - r);
  nlohmann::json bands = nlohmann::json::array();
  for (int off : offsets) {
    std::vector<double> values(m.rows() - off);
    for (int r = 0; r + off < m.rows(); ++r) values[r] = m.at(r, r + off);
    bands.push_back({{"offset", off}, {"values", values}});
  }
  return {{"n", m.rows()}, {"p", space.degrees()}, {"d", space.d()}, {"bands", bands}};
}

nlohmann::json counter_json(const EvalCounter& counter) {
  nlohmann::json out = nlohmann::json::array();
  for (Strategy s : {Strategy::StandardGauss, Strategy::NcWeighted, Strategy::GaussWeighted}) {
    const EvalTally& t = counter[s];
    if (t.empty()) continue;
    out.push_back({{"strategy", to_string(s)},
                   {"value_evals", t.value_evals},
                   {"deriv_evals", t.deriv_evals},
                   {"tensor_evals", t.tensor_evals}});
  }
  return out;
}

nlohmann::json rule_json(const WeightedRule& rule) {
  nlohmann::json j = {{"kind", to_string(rule.kind)},
                      {"degree", rule.degree},
                      {"nodes", rule.nodes},
                      {"weights", rule.weights},
                      {"node_elements", rule.node_elements},
                      {"node_locals", rule.node_locals},
                      {"residual_max", rule.residual_max}};
  j["weight_index"] = rule.weight_index ? nlohmann::json(*rule.weight_index) : nlohmann::json(nullptr);
  return j;
}

WeightedRule rule_from_json(const nlohmann::json& j) {
  try {
    WeightedRule rule;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "mass") rule.kind = RuleKind::Mass;
    else if (kind == "stiffness") rule.kind = RuleKind::Stiffness;
    else throw IoError("unknown rule kind '" + kind + "'");
    rule.degree = j.at("degree").get<int>();
    if (j.contains("weight_index") && !j["weight_index"].is_null()) rule.weight_index = j["weight_index"].get<int>();
    rule.nodes = j.at("nodes").get<std::vector<double>>();
    rule.weights = j.at("weights").get<std::vector<double>>();
    rule.node_elements = j.at("node_elements").get<std::vector<int>>();
    rule.node_locals = j.at("node_locals").get<std::vector<double>>();
    rule.residual_max = j.value("residual_max", 0.0);
    const std::size_t n = rule.nodes.size();
    if (rule.weights.size() != n || rule.node_elements.size() != n || rule.node_locals.size() != n)
      throw IoError("rule arrays differ in length");
    return rule;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed rule JSON: ") + e.what());
  }
}

namespace {

void dump(std::ostream& os, const nlohmann::json& j, int indent) {
  const std::string pad(indent, ' ');
  const std::string inner(indent + 2, ' ');
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << inner << nlohmann::json(it.key()).dump() << ": ";
        dump(os, it.value(), indent + 2);
      }
      os << '\n' << pad << '}';
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      const bool flat = std::all_of(j.begin(), j.end(), [](const auto& v) { return v.is_primitive(); });
      os << '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) os << ',';
        os << (flat ? (first ? "" : " ") : "\n" + inner);
        first = false;
        dump(os, v, indent + 2);
      }
      if (!flat) os << '\n' << pad;
      os << ']';
      return;
    }
    case nlohmann::json::value_t::number_float: {
      const double v = j.get<double>();
      if (std::isfinite(v)) os << format_double(v);
      else os << "null";
      return;
    }
    default:
      os << j.dump();
  }
}

}  // namespace

std::string dump_json(const nlohmann::json& j) {
  std::ostringstream os;
  dump(os, j, 0);
  os << '\n';
  return os.str();
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path);
  os << dump_json(j);
  if (!os) throw IoError("failed writing " + path);
}

}  // namespace wgq
