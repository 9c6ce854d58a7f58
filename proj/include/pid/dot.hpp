#pragma once

#include <set>
#include <sstream>
#include <string>

#include "pid/analysis.hpp"
#include "pid/model.hpp"

namespace pid {

namespace detail {

inline std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

// Graphviz text. Chance nodes are circles, decisions boxes, value nodes
// diamonds. With a report, informational arcs are dashed and the members
// of every significant pair are filled red and joined by a dotted edge.
inline std::string export_dot(const Diagram& d, const Report* report = nullptr) {
  std::ostringstream out;
  out << "digraph pid {\n";
  std::set<NodeId> flagged;
  if (report)
    for (const auto& w : report->witnesses) {
      flagged.insert(w.chance);
      flagged.insert(w.decision);
    }
  for (NodeId v = 0; v < d.size(); ++v) {
    const char* shape = d.is_chance(v) ? "circle" : d.is_decision(v) ? "box" : "diamond";
    out << "  " << detail::dot_quote(d.name(v)) << " [shape=" << shape;
    if (flagged.count(v)) out << ", style=filled, fillcolor=\"#f4a3a3\"";
    out << "];\n";
  }
  for (NodeId v = 0; v < d.size(); ++v)
    for (NodeId p : d.parents(v)) {
      out << "  " << detail::dot_quote(d.name(p)) << " -> " << detail::dot_quote(d.name(v));
      if (report && d.is_decision(v)) out << " [style=dashed]";
      out << ";\n";
    }
  if (report)
    for (const auto& w : report->witnesses)
      out << "  " << detail::dot_quote(d.name(w.chance)) << " -> " << detail::dot_quote(d.name(w.decision))
          << " [dir=none, style=dotted, color=red, constraint=false];\n";
  out << "}\n";
  return out.str();
}

}  // namespace pid
