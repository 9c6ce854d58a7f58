#pragma once

#include <fstream>
#include <optional>
#include <regex>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "pid/model.hpp"
#include "pid/oracle.hpp"

namespace pid {

// A diagram file: the node list plus an optional realization.
//
//   {"nodes": [{"id": "A", "kind": "chance", "states": ["a1","a2"], "parents": []}, ...],
//    "realization": {"cpts": {"A": [0.5, 0.5]}, "utilities": {"U": [...]}}}
struct Document {
  Diagram diagram;
  std::optional<Realization> realization;
};

// Parse or validation failure located in a file. line and column are
// 1-based; 0 means unknown.
class DocumentError : public std::runtime_error {
 public:
  DocumentError(std::string file, std::size_t line, std::size_t column, const std::string& what)
      : std::runtime_error(format(file, line, column, what)), file_(std::move(file)), line_(line), column_(column) {}

  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  static std::string format(const std::string& file, std::size_t line, std::size_t column, const std::string& what) {
    std::string loc = file;
    if (line > 0) loc += ":" + std::to_string(line);
    if (column > 0) loc += ":" + std::to_string(column);
    return loc + ": " + what;
  }
  std::string file_;
  std::size_t line_, column_;
};

namespace detail {

inline std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

// Line of the first `"id": "<name>"` occurrence, 0 if absent.
inline std::size_t line_of_id(const std::string& text, const std::string& id) {
  std::string escaped;
  for (char c : id) {
    if (std::string_view("\\^$.|?*+()[]{}").find(c) != std::string_view::npos) escaped += '\\';
    escaped += c;
  }
  std::smatch m;
  if (!std::regex_search(text, m, std::regex("\"id\"\\s*:\\s*\"" + escaped + "\""))) return 0;
  return line_col(text, static_cast<std::size_t>(m.position(0))).first;
}

inline std::vector<std::string> string_list(const nlohmann::json& j, const char* key, const std::string& where) {
  std::vector<std::string> out;
  if (!j.contains(key)) return out;
  const auto& a = j.at(key);
  if (!a.is_array()) throw std::invalid_argument(where + ": '" + key + "' must be a list");
  for (const auto& s : a) {
    if (!s.is_string()) throw std::invalid_argument(where + ": '" + key + "' entries must be strings");
    out.push_back(s.get<std::string>());
  }
  return out;
}

inline std::vector<double> number_list(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array()) throw std::invalid_argument(where + " must be a list of numbers");
  std::vector<double> out;
  for (const auto& x : j) {
    if (!x.is_number()) throw std::invalid_argument(where + " must be a list of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

}  // namespace detail

inline Document parse_document(const std::string& text, const std::string& file = "<input>") {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    auto [line, col] = detail::line_col(text, e.byte > 0 ? e.byte - 1 : 0);
    throw DocumentError(file, line, col, std::string("parse error: ") + e.what());
  }

  DiagramSpec spec;
  try {
    if (!j.is_object() || !j.contains("nodes") || !j.at("nodes").is_array())
      throw std::invalid_argument("document must be an object with a 'nodes' list");
    std::size_t i = 0;
    for (const auto& n : j.at("nodes")) {
      std::string where = "node #" + std::to_string(i++);
      if (!n.is_object() || !n.contains("id") || !n.at("id").is_string())
        throw std::invalid_argument(where + ": missing string 'id'");
      NodeSpec s;
      s.id = n.at("id").get<std::string>();
      where = "node '" + s.id + "'";
      if (!n.contains("kind") || !n.at("kind").is_string()) throw std::invalid_argument(where + ": missing 'kind'");
      auto kind = parse_kind(n.at("kind").get<std::string>());
      if (!kind) throw std::invalid_argument(where + ": unknown kind '" + n.at("kind").get<std::string>() + "'");
      s.kind = *kind;
      s.states = detail::string_list(n, "states", where);
      s.parents = detail::string_list(n, "parents", where);
      spec.nodes.push_back(std::move(s));
    }
  } catch (const std::invalid_argument& e) {
    throw DocumentError(file, 0, 0, e.what());
  }

  Document doc;
  try {
    doc.diagram = validate(spec);
  } catch (const ValidationError& e) {
    const auto& v = e.violations().front();
    throw DocumentError(file, detail::line_of_id(text, v.node), 0, e.what());
  }

  if (!j.contains("realization")) return doc;
  const Diagram& d = doc.diagram;
  const auto& r = j.at("realization");
  std::string current;
  try {
    if (!r.is_object()) throw std::invalid_argument("'realization' must be an object");
    Realization out;
    out.tables.resize(d.size());
    for (const char* section : {"cpts", "utilities"}) {
      if (!r.contains(section)) continue;
      if (!r.at(section).is_object()) throw std::invalid_argument(std::string("'") + section + "' must be an object");
      for (const auto& [id, values] : r.at(section).items()) {
        current = id;
        auto v = d.find(id);
        if (!v) throw std::invalid_argument("table for unknown node '" + id + "'");
        bool cpt = std::string(section) == "cpts";
        if (cpt ? !d.is_chance(*v) : !d.is_value(*v))
          throw std::invalid_argument("'" + id + "' is not a " + (cpt ? "chance" : "value") + " node");
        out.tables[*v] = detail::number_list(values, "table for '" + id + "'");
      }
    }
    current.clear();
    for (NodeId v = 0; v < d.size(); ++v)
      if (!d.is_decision(v) && out.tables[v].empty() && expected_table_size(d, v) > 0) {
        current = d.name(v);
        throw std::invalid_argument("missing table for '" + d.name(v) + "'");
      }
    current.clear();
    check_realization(d, out);
    doc.realization = std::move(out);
  } catch (const std::invalid_argument& e) {
    throw DocumentError(file, current.empty() ? 0 : detail::line_of_id(text, current), 0, e.what());
  }
  return doc;
}

inline Document load_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DocumentError(path, 0, 0, "cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_document(buf.str(), path);
}

inline nlohmann::json document_json(const Diagram& d, const std::optional<Realization>& r = std::nullopt) {
  nlohmann::json nodes = nlohmann::json::array();
  for (NodeId v = 0; v < d.size(); ++v) {
    nlohmann::json n{{"id", d.name(v)}, {"kind", std::string(to_string(d.kind(v)))}};
    if (!d.is_value(v)) n["states"] = d.node(v).states;
    nlohmann::json ps = nlohmann::json::array();
    for (NodeId p : d.parents(v)) ps.push_back(d.name(p));
    n["parents"] = ps;
    nodes.push_back(std::move(n));
  }
  nlohmann::json out{{"nodes", nodes}};
  if (r) {
    nlohmann::json cpts = nlohmann::json::object(), utilities = nlohmann::json::object();
    for (NodeId v = 0; v < d.size(); ++v) {
      if (d.is_chance(v)) cpts[d.name(v)] = r->tables[v];
      if (d.is_value(v)) utilities[d.name(v)] = r->tables[v];
    }
    out["realization"] = {{"cpts", cpts}, {"utilities", utilities}};
  }
  return out;
}

// Doubles are written in shortest round-trip form, so parse/serialize
// cycles are bit-stable.
inline std::string serialize_document(const Diagram& d, const std::optional<Realization>& r = std::nullopt) {
  return document_json(d, r).dump(2) + "\n";
}

}  // namespace pid
